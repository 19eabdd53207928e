"""Render qecenergy sweep CSVs as error-vs-energy line plots and heatmaps.

Strictly a CSV consumer: nothing here recomputes physics, and identical input
bytes always produce identical plotted data series.
"""

__version__ = "0.1.0"

from .render import FigureSpec, SweepRow, read_sweep_csv, render_heatmap, render_line

__all__ = [
    "FigureSpec",
    "SweepRow",
    "read_sweep_csv",
    "render_heatmap",
    "render_line",
]
