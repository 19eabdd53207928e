"""Closed-form oracles and post-processing.

Binomial sums and energy coefficients are computed in exact rational
arithmetic (floats enter exactly via Fraction); only simulation outputs are
floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError


def _check_rep(p, n: int):
    if n < 1 or n % 2 == 0:
        raise InvalidArgumentError(f"repetition size must be odd >= 1, got {n}")
    if not 0 <= p <= 1:
        raise InvalidArgumentError(f"p must be a probability, got {p}")


def repetition_failure_rate(p, n: int):
    """Exact failure rate of the N-qubit repetition code under bit-flip rate p
    (no gate noise): 1 - sum_{k<=(N-1)/2} C(N,k) p^k (1-p)^(N-k).

    Fraction in -> Fraction out; float in -> float out (computed exactly).
    """
    _check_rep(p, n)
    pf = Fraction(p)
    total = Fraction(0)
    for k in range((n - 1) // 2 + 1):
        total += math.comb(n, k) * pf**k * (1 - pf) ** (n - k)
    result = 1 - total
    return result if isinstance(p, Fraction) else float(result)


def repetition_failure_rate_leading(p, n: int):
    """Leading order in p: C(N, (N+1)/2) * p^((N+1)/2)."""
    _check_rep(p, n)
    pf = Fraction(p)
    result = math.comb(n, (n + 1) // 2) * pf ** ((n + 1) // 2)
    return result if isinstance(p, Fraction) else float(result)


def expected_corrections(p, n: int):
    """Mean number of correction NOTs: sum_{k<=(N-1)/2} k C(N,k) p^k (1-p)^(N-k)."""
    _check_rep(p, n)
    pf = Fraction(p)
    total = Fraction(0)
    for k in range((n - 1) // 2 + 1):
        total += k * math.comb(n, k) * pf**k * (1 - pf) ** (n - k)
    return total if isinstance(p, Fraction) else float(total)


def code_energy_total(code_id: str) -> Fraction:
    """Exact energy coefficient (pi^2/eps^2 units) of a registered pipeline,
    from its assembled gate tally. Repetition gives (5N-3)/16, bare 1/8."""
    from .codes import pipeline

    return pipeline(code_id).energy_coefficient()


def ft_overhead_coefficient(n: int, v: int, cats: int | None = None) -> Fraction:
    """Energy coefficient of the fault-tolerant readout stage: cats*(7+2v)/16."""
    if cats is None:
        cats = n
    return Fraction(cats * (7 + 2 * v), 16)


def ft_budget_ratio(n: int, v: int) -> Fraction:
    """Total-budget ratio FT vs non-FT in the additive bookkeeping
    ((5N-3)/16 + N(7+2v)/16) / ((5N-3)/16); 13/4 = 3.25 at N=3, v=1."""
    base = Fraction(5 * n - 3, 16)
    return (base + ft_overhead_coefficient(n, v)) / base


def ft_budget_ratio_limit(v: int) -> Fraction:
    """N -> infinity limit of ft_budget_ratio: (12+2v)/5; 14/5 = 2.8 at v=1."""
    return Fraction(12 + 2 * v, 5)


@dataclass(frozen=True)
class ErrorCurve:
    """Monotone-energy list of (energy, error, std_error) points."""

    points: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        pts = tuple((float(e), float(r), float(s)) for e, r, s in self.points)
        energies = [p[0] for p in pts]
        if any(b <= a for a, b in zip(energies, energies[1:])):
            raise InvalidArgumentError("energies must be strictly increasing")
        if any(not 0.0 <= p[1] <= 1.0 for p in pts):
            raise InvalidArgumentError("errors must lie in [0, 1]")
        object.__setattr__(self, "points", pts)

    @property
    def energies(self):
        return [p[0] for p in self.points]

    @property
    def errors(self):
        return [p[1] for p in self.points]


def _interp(curve: ErrorCurve, energy: float) -> float:
    return float(np.interp(energy, curve.energies, curve.errors))


def find_crossover(a: ErrorCurve, b: ErrorCurve, persistent: bool = True) -> float | None:
    """Smallest energy where (a - b) crosses from positive to negative, i.e.
    curve a becomes the better (lower-error) one; linear interpolation between
    grid points. With ``persistent`` (default) a must stay at or below b on
    every later grid point, which suppresses Monte Carlo sign flips. Returns
    None when there is no such crossing.
    """
    lo = max(a.energies[0], b.energies[0])
    hi = min(a.energies[-1], b.energies[-1])
    if lo >= hi:
        raise InvalidArgumentError("curves do not share an overlapping energy range")
    grid = sorted({e for e in a.energies + b.energies if lo <= e <= hi})
    diff = [_interp(a, e) - _interp(b, e) for e in grid]
    for i in range(len(grid) - 1):
        if diff[i] > 0.0 and diff[i + 1] <= 0.0:
            if persistent and any(d > 0.0 for d in diff[i + 1 :]):
                continue
            t = diff[i] / (diff[i] - diff[i + 1])
            return grid[i] + t * (grid[i + 1] - grid[i])
    return None


def fit_exponential(points) -> tuple[float, float, float]:
    """Least-squares fit of E = a * exp(b * N) on (N, E) pairs.

    Returns (a, b, residual) where residual is the RMS misfit of ln E.
    """
    pts = [(float(n), float(e)) for n, e in points]
    if len(pts) < 2:
        raise InvalidArgumentError("need at least two points")
    if any(e <= 0 for _, e in pts):
        raise InvalidArgumentError("energies must be positive")
    ns = np.array([p[0] for p in pts])
    logs = np.log([p[1] for p in pts])
    b, log_a = np.polyfit(ns, logs, 1)
    resid = float(np.sqrt(np.mean((logs - (log_a + b * ns)) ** 2)))
    return float(np.exp(log_a)), float(b), resid
