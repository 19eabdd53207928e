"""Gate catalog: ideal unitaries, generator decompositions, coefficient
multisets, Gaussian coefficient noise, energy lower bounds, gate fidelity.

Each catalog gate G is realized as U_G = exp(-i sum_i lambda_i P_i) with
Hermitian P_i; the coefficient multiset {lambda_i} fixes the control-energy
lower bound E >= (hbar omega0 / 4) sum_i lambda_i^2 / eps^2, where eps is the
standard deviation of the Gaussian coefficient noise. Energies are reported
in hbar*omega0 units throughout (hbar and omega0 stay symbolic).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DivergentEnergyError, InvalidArgumentError
from .statevector import HermitianGenerator, expm_pauli_scalars, herm_expm

SQRT2 = math.sqrt(2.0)

I2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = {"I": I2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


class GateTerm(NamedTuple):
    coefficient: float  # radians
    generator: HermitianGenerator


@dataclass(frozen=True)
class NoiseModel:
    """Uniform coefficient noise (std eps, radians) plus channel bit-flip rate."""

    epsilon: float
    p_x: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise InvalidArgumentError(f"epsilon must be >= 0, got {self.epsilon}")
        if not 0.0 <= self.p_x <= 1.0:
            raise InvalidArgumentError(f"p_x must be in [0, 1], got {self.p_x}")


@dataclass(frozen=True)
class EnergyBudget:
    """Control energy in units of hbar*omega0. Additive under composition."""

    value: float

    def __post_init__(self):
        if self.value < 0:
            raise InvalidArgumentError(f"energy must be >= 0, got {self.value}")

    def __add__(self, other: "EnergyBudget") -> "EnergyBudget":
        return EnergyBudget(self.value + other.value)


@dataclass(frozen=True)
class GateSpec:
    """A named gate: ideal unitary, generator terms, energy coefficient.

    ``energy_coefficient`` is the exact rational c such that the energy lower
    bound is c * pi^2 / eps^2 (Table-style bookkeeping); it always satisfies
    sum(lambda_i^2) = 4 c pi^2.
    """

    name: str
    arity: int
    ideal: np.ndarray
    terms: tuple[GateTerm, ...]
    energy_coefficient: Fraction
    # fast-sampling structure, derived in _finish()
    _lams: np.ndarray = field(repr=False, default=None)
    _gen_stack: np.ndarray = field(repr=False, default=None)
    _pauli_rows: np.ndarray = field(repr=False, default=None)  # 1q: (k, 4) [a, vx, vy, vz]
    _w_kind: str = field(repr=False, default="")  # 2q: target Pauli letter
    _ideal_scalars: tuple = field(repr=False, default=())

    def multiset(self) -> tuple[float, ...]:
        """The coefficient multiset, sorted for comparison against Table I."""
        return tuple(sorted(t.coefficient for t in self.terms))


def _pauli_components(m: np.ndarray) -> tuple[float, float, float, float]:
    a = 0.5 * (m[0, 0].real + m[1, 1].real)
    vz = 0.5 * (m[0, 0].real - m[1, 1].real)
    vx = m[0, 1].real
    vy = -m[0, 1].imag
    return a, vx, vy, vz


def _finish(spec: GateSpec) -> GateSpec:
    lams = np.array([t.coefficient for t in spec.terms], dtype=np.float64)
    stack = np.array([t.generator.matrix for t in spec.terms])
    object.__setattr__(spec, "_lams", lams)
    object.__setattr__(spec, "_gen_stack", stack)
    if spec.arity == 1:
        rows = np.array([_pauli_components(t.generator.matrix) for t in spec.terms])
        object.__setattr__(spec, "_pauli_rows", rows)
        u = spec.ideal
        object.__setattr__(spec, "_ideal_scalars", (u[0, 0], u[0, 1], u[1, 0], u[1, 1]))
    else:
        u = spec.ideal
        object.__setattr__(
            spec,
            "_ideal_scalars",
            (u[0, 0], u[0, 1], u[1, 0], u[1, 1], u[2, 2], u[2, 3], u[3, 2], u[3, 3]),
        )
    return spec


def _kron2(a: str, b: str) -> HermitianGenerator:
    return HermitianGenerator(np.kron(PAULIS[a], PAULIS[b]))


def _ctrl(w: str) -> np.ndarray:
    u = np.eye(4, dtype=np.complex128)
    u[2:, 2:] = PAULIS[w]
    return u


def _one_qubit_spec(name, ideal, terms) -> GateSpec:
    return _finish(GateSpec(name, 1, ideal, tuple(terms), Fraction(1, 8)))


def _controlled_spec(name: str, w: str) -> GateSpec:
    quarter = math.pi / 4
    terms = (
        GateTerm(-quarter, _kron2("I", "I")),
        GateTerm(quarter, _kron2("Z", "I")),
        GateTerm(quarter, _kron2("I", w)),
        GateTerm(-quarter, _kron2("Z", w)),
    )
    spec = GateSpec(name, 2, _ctrl(w), terms, Fraction(1, 16))
    object.__setattr__(spec, "_w_kind", w)
    return _finish(spec)


def _build_catalog() -> dict[str, GateSpec]:
    half = math.pi / 2
    minus_i = HermitianGenerator(-I2)
    h_axis = HermitianGenerator((PAULI_X + PAULI_Z) / SQRT2)
    q_axis = (PAULI_Z + PAULI_Y) / SQRT2
    catalog = {
        "X": _one_qubit_spec(
            "X", PAULI_X, [GateTerm(half, HermitianGenerator(PAULI_X)), GateTerm(half, minus_i)]
        ),
        "Y": _one_qubit_spec(
            "Y", PAULI_Y, [GateTerm(half, HermitianGenerator(PAULI_Y)), GateTerm(half, minus_i)]
        ),
        "Z": _one_qubit_spec(
            "Z", PAULI_Z, [GateTerm(half, HermitianGenerator(PAULI_Z)), GateTerm(half, minus_i)]
        ),
        "H": _one_qubit_spec(
            "H", (PAULI_X + PAULI_Z) / SQRT2, [GateTerm(half, h_axis), GateTerm(half, minus_i)]
        ),
        # The verbatim Table I multiset {pi/2, 2*(-pi/sqrt 8)} exponentiates to
        # -(Z+Y)/sqrt(2); the sign is a global phase and is kept in the ideal.
        "Q": _one_qubit_spec(
            "Q",
            -q_axis,
            [
                GateTerm(half, minus_i),
                GateTerm(-math.pi / math.sqrt(8.0), HermitianGenerator(PAULI_Z)),
                GateTerm(-math.pi / math.sqrt(8.0), HermitianGenerator(PAULI_Y)),
            ],
        ),
        "CX": _controlled_spec("CX", "X"),
        "CY": _controlled_spec("CY", "Y"),
        "CZ": _controlled_spec("CZ", "Z"),
        "S": None,  # placeholder, replaced below
    }
    s_gen = HermitianGenerator((PAULI_Z - I2) / 2.0)
    s_ideal = np.array([[1, 0], [0, 1j]], dtype=np.complex128)
    catalog["S"] = _finish(
        GateSpec("S", 1, s_ideal, (GateTerm(half, s_gen),), Fraction(1, 16))
    )
    return catalog


_CATALOG = _build_catalog()
GATE_NAMES = tuple(_CATALOG)


def gate_catalog(name: str) -> GateSpec:
    """Look up one of the nine catalog gates by name."""
    try:
        return _CATALOG[name]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown gate {name!r}; catalog: {', '.join(GATE_NAMES)}"
        ) from None


def sample_noisy_gate(spec: GateSpec, epsilon: float, rng: np.random.Generator) -> np.ndarray:
    """Draw one noisy realization of the gate.

    Every coefficient is independently perturbed by N(0, eps^2) and the summed
    generator is exponentiated exactly. Reference path; the executor's scalar
    fast path is pinned to this one by tests.
    """
    if epsilon < 0:
        raise InvalidArgumentError("epsilon must be >= 0")
    if epsilon == 0.0:
        return spec.ideal.copy()
    lams = spec._lams + epsilon * rng.standard_normal(len(spec._lams))
    gen = np.tensordot(lams, spec._gen_stack, axes=1)
    return herm_expm(gen)


def sample_noisy_scalars(spec: GateSpec, epsilon: float, rng: np.random.Generator) -> tuple:
    """Entries of one noisy realization, as scalars for the kernels.

    1-qubit gates: (u00, u01, u10, u11). 2-qubit catalog gates are block
    diagonal in the control (all their generator terms commute), so the result
    is (c00, c01, c10, c11, d00, d01, d10, d11) for the control-0/1 blocks.
    Identical rng consumption and identical output (to float precision) as
    sample_noisy_gate.
    """
    if epsilon == 0.0:
        return spec._ideal_scalars
    d = rng.standard_normal(len(spec._lams))
    if spec.arity == 1:
        lams = spec._lams + epsilon * d
        a, vx, vy, vz = lams @ spec._pauli_rows
        return expm_pauli_scalars(a, vx, vy, vz)
    l0 = spec._lams[0] + epsilon * d[0]
    l1 = spec._lams[1] + epsilon * d[1]
    l2 = spec._lams[2] + epsilon * d[2]
    l3 = spec._lams[3] + epsilon * d[3]
    w = spec._w_kind
    out = []
    for sign in (1.0, -1.0):
        a = l0 + sign * l1
        b = l2 + sign * l3
        if w == "X":
            out.extend(expm_pauli_scalars(a, b, 0.0, 0.0))
        elif w == "Y":
            out.extend(expm_pauli_scalars(a, 0.0, b, 0.0))
        else:
            out.extend(expm_pauli_scalars(a, 0.0, 0.0, b))
    return tuple(out)


_W_CODE = {"X": 0, "Y": 1, "Z": 2}


def sample_noisy_scalars_batch(
    spec: GateSpec, epsilon: float, count: int, rng: np.random.Generator
) -> np.ndarray:
    """``count`` independent noisy realizations at once (closed-form kernels).

    Rows have the same layout as sample_noisy_scalars; a batch of one drawn
    from the same stream state reproduces it exactly.
    """
    draws = rng.standard_normal((count, len(spec._lams)))
    if spec.arity == 1:
        out = np.empty((count, 4), dtype=np.complex128)
        _kernels.noisy_1q_batch(spec._lams, spec._pauli_rows, epsilon, draws, out)
    else:
        out = np.empty((count, 8), dtype=np.complex128)
        _kernels.noisy_2q_batch(spec._lams, _W_CODE[spec._w_kind], epsilon, draws, out)
    return out


def scalars_to_matrix(spec: GateSpec, scalars: tuple) -> np.ndarray:
    """Assemble the dense matrix from sample_noisy_scalars output."""
    if spec.arity == 1:
        u00, u01, u10, u11 = scalars
        return np.array([[u00, u01], [u10, u11]], dtype=np.complex128)
    c00, c01, c10, c11, d00, d01, d10, d11 = scalars
    u = np.zeros((4, 4), dtype=np.complex128)
    u[0, 0], u[0, 1], u[1, 0], u[1, 1] = c00, c01, c10, c11
    u[2, 2], u[2, 3], u[3, 2], u[3, 3] = d00, d01, d10, d11
    return u


def gate_energy_bound(spec: GateSpec, epsilon: float) -> EnergyBudget:
    """Eq.-style lower bound (1/4) sum lambda_i^2 / eps^2, in hbar*omega0 units."""
    if epsilon <= 0:
        raise DivergentEnergyError(f"energy bound diverges at epsilon={epsilon}")
    return EnergyBudget(float(spec.energy_coefficient) * math.pi**2 / epsilon**2)


def average_gate_fidelity(u: np.ndarray, u_prime: np.ndarray) -> float:
    """F_ave = (n + |Tr(u^dag u')|^2) / (n(n+1))."""
    u = np.asarray(u)
    u_prime = np.asarray(u_prime)
    if u.shape != u_prime.shape:
        raise InvalidArgumentError(f"dimension mismatch: {u.shape} vs {u_prime.shape}")
    n = u.shape[0]
    tr = np.einsum("ij,ij->", u.conj(), u_prime)
    return (n + abs(tr) ** 2) / (n * (n + 1))


def estimate_gate_error(
    spec: GateSpec, epsilon: float, samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Ensemble mean of 1 - F_ave(ideal, noisy) with its standard error."""
    if samples < 100:
        raise InvalidArgumentError(f"samples must be >= 100, got {samples}")
    if epsilon == 0.0:
        return 0.0, 0.0
    n = spec.ideal.shape[0]
    denom = n * (n + 1)
    ideal_conj = spec.ideal.conj()
    errs = np.empty(samples)
    for i in range(samples):
        u = scalars_to_matrix(spec, sample_noisy_scalars(spec, epsilon, rng))
        tr = np.einsum("ij,ij->", ideal_conj, u)
        errs[i] = 1.0 - (n + abs(tr) ** 2) / denom
    mean = float(errs.mean())
    sem = float(errs.std(ddof=1) / math.sqrt(samples))
    return mean, sem
