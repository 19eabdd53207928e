"""CSV parsing and the two figure kinds.

Consumes the harness schema bit-exactly:
code_id,encoder_variant,epsilon,energy,p_x,shots,error_rate,std_error,master_seed
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

CSV_COLUMNS = (
    "code_id",
    "encoder_variant",
    "epsilon",
    "energy",
    "p_x",
    "shots",
    "error_rate",
    "std_error",
    "master_seed",
)


class SchemaError(ValueError):
    pass


class SweepRow(NamedTuple):
    code_id: str
    encoder_variant: str
    epsilon: float
    energy: float
    p_x: float
    shots: int
    error_rate: float
    std_error: float
    master_seed: int


def read_sweep_csv(path) -> list[SweepRow]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    if not lines:
        raise SchemaError(f"{path}: empty file (not even a header)")
    header = lines[0].split(",")
    missing = [c for c in CSV_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
    idx = {c: header.index(c) for c in CSV_COLUMNS}
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(header):
            raise SchemaError(f"{path}: malformed row {ln!r}")
        rows.append(
            SweepRow(
                code_id=parts[idx["code_id"]],
                encoder_variant=parts[idx["encoder_variant"]],
                epsilon=float(parts[idx["epsilon"]]),
                energy=float(parts[idx["energy"]]),
                p_x=float(parts[idx["p_x"]]),
                shots=int(parts[idx["shots"]]),
                error_rate=float(parts[idx["error_rate"]]),
                std_error=float(parts[idx["std_error"]]),
                master_seed=int(parts[idx["master_seed"]]),
            )
        )
    return rows


@dataclass
class FigureSpec:
    kind: str  # "line" | "heatmap"
    inputs: list
    output: str
    p_x: float | None = None  # line: select one channel rate (default: only/first)
    title: str = ""
    dpi: int = 150
    labels: dict = field(default_factory=dict)  # code_id -> series label


def _series_label(row: SweepRow, labels: dict) -> str:
    if row.code_id in labels:
        return labels[row.code_id]
    return row.code_id


def _select_px(rows: list[SweepRow], wanted: float | None) -> tuple[float | None, list[SweepRow]]:
    if not rows:
        return wanted, rows
    values = sorted({r.p_x for r in rows})
    if wanted is None:
        if len(values) > 1:
            warnings.warn(
                f"multiple p_x values {values}; plotting p_x={values[0]}", stacklevel=2
            )
        wanted = values[0]
    if wanted not in values:
        raise SchemaError(f"p_x={wanted} not present; file has {values}")
    return wanted, [r for r in rows if r.p_x == wanted]


def render_line(spec: FigureSpec) -> str:
    """Error vs energy, one curve per (code_id, encoder_variant), error bars
    from std_error, log energy axis. Empty input yields empty axes + warning."""
    rows: list[SweepRow] = []
    for path in spec.inputs:
        rows.extend(read_sweep_csv(path))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if rows:
        p_x, rows = _select_px(rows, spec.p_x)
        series: dict[tuple[str, str], list[SweepRow]] = {}
        for r in rows:
            series.setdefault((r.code_id, r.encoder_variant), []).append(r)
        for key in sorted(series):
            pts = sorted(series[key], key=lambda r: r.energy)
            ax.errorbar(
                [p.energy for p in pts],
                [p.error_rate for p in pts],
                yerr=[p.std_error for p in pts],
                marker="o",
                markersize=3,
                capsize=2,
                label=_series_label(pts[0], spec.labels),
            )
        ax.set_xscale("log")
        ax.legend(fontsize=8)
        if spec.title:
            ax.set_title(spec.title)
        elif p_x is not None:
            ax.set_title(f"P_X = {p_x:g}")
    else:
        warnings.warn("no records; producing empty axes", stacklevel=2)
    ax.set_xlabel(r"control energy [$\hbar\omega_0$]")
    ax.set_ylabel("logical error rate")
    fig.tight_layout()
    fig.savefig(spec.output, dpi=spec.dpi)
    plt.close(fig)
    return spec.output


def _grid_for(rows: list[SweepRow], code_id: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    sub = [r for r in rows if r.code_id == code_id]
    energies = sorted({r.energy for r in sub})
    p_values = sorted({r.p_x for r in sub})
    table = {}
    for r in sub:
        key = (r.energy, r.p_x)
        if key in table:
            raise SchemaError(f"duplicate cell {key} for {code_id}")
        table[key] = r.error_rate
    grid = np.empty((len(p_values), len(energies)))
    for i, p in enumerate(p_values):
        for j, e in enumerate(energies):
            if (e, p) not in table:
                raise SchemaError(
                    f"ragged grid: {code_id} misses the (energy={e!r}, p_x={p!r}) cell"
                )
            grid[i, j] = table[(e, p)]
    return np.array(energies), np.array(p_values), grid


def render_heatmap(spec: FigureSpec) -> str:
    """One panel per code over the (energy x p_x) grid, shared color scale."""
    rows: list[SweepRow] = []
    for path in spec.inputs:
        rows.extend(read_sweep_csv(path))
    codes = sorted({r.code_id for r in rows})
    if not codes:
        warnings.warn("no records; producing empty axes", stacklevel=2)
        fig, ax = plt.subplots(figsize=(5.0, 4.0))
        ax.set_xlabel(r"control energy [$\hbar\omega_0$]")
        ax.set_ylabel("P_X")
        fig.tight_layout()
        fig.savefig(spec.output, dpi=spec.dpi)
        plt.close(fig)
        return spec.output
    grids = {c: _grid_for(rows, c) for c in codes}
    vmin = min(g[2].min() for g in grids.values())
    vmax = max(g[2].max() for g in grids.values())
    fig, axes = plt.subplots(
        1, len(codes), figsize=(3.6 * len(codes) + 1.2, 3.4), squeeze=False, sharey=True
    )
    mesh = None
    for ax, code in zip(axes[0], codes):
        energies, p_values, grid = grids[code]
        mesh = ax.pcolormesh(
            energies, p_values, grid, shading="nearest", vmin=vmin, vmax=vmax
        )
        ax.set_xscale("log")
        ax.set_title(code, fontsize=9)
        ax.set_xlabel(r"energy [$\hbar\omega_0$]")
    axes[0][0].set_ylabel("P_X")
    fig.colorbar(mesh, ax=axes[0], label="logical error rate", fraction=0.05)
    if spec.title:
        fig.suptitle(spec.title)
    fig.savefig(spec.output, dpi=spec.dpi)
    plt.close(fig)
    return spec.output
