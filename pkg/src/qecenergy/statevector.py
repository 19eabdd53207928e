"""Dense statevector register and small-matrix primitives.

Bit ordering: qubit 0 is the most significant bit of the basis index, i.e.
``|q0 q1 ... q_{n-1}>`` maps to index ``q0*2^(n-1) + ... + q_{n-1}``. This
convention is global to the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ContractViolationError, InvalidArgumentError

MAX_QUBITS = 24

# Floor on the collapse probability guarding the renormalization division.
PROB_FLOOR = 1e-300


@dataclass
class StateVector:
    """Unit-norm complex amplitudes over ``num_qubits`` qubits."""

    num_qubits: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def validate(self, tol: float = 1e-10) -> None:
        if self.amplitudes.shape != (2**self.num_qubits,):
            raise ContractViolationError(
                f"amplitude vector has length {self.amplitudes.shape}, expected 2^{self.num_qubits}"
            )
        if abs(self.norm() - 1.0) > tol:
            raise ContractViolationError(f"state norm {self.norm()} deviates from 1 beyond {tol}")

    def _stride(self, qubit: int) -> int:
        return 1 << (self.num_qubits - 1 - qubit)


@dataclass(frozen=True)
class HermitianGenerator:
    """A 2x2 or 4x4 Hermitian matrix used as a gate generator."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape not in {(2, 2), (4, 4)}:
            raise InvalidArgumentError(f"generator must be 2x2 or 4x4, got {m.shape}")
        _check_hermitian(m)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def _check_hermitian(m: np.ndarray, tol: float = 1e-12) -> None:
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > tol * scale:
        raise InvalidArgumentError("matrix is not Hermitian")


def _check_qubit(num_qubits: int, qubit: int) -> None:
    if not 0 <= qubit < num_qubits:
        raise InvalidArgumentError(f"qubit {qubit} out of range for {num_qubits}-qubit register")


def init_basis_state(num_qubits: int, basis_index: int = 0) -> StateVector:
    """Computational basis state with amplitude 1 at ``basis_index``."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise InvalidArgumentError(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}")
    dim = 1 << num_qubits
    if not 0 <= basis_index < dim:
        raise InvalidArgumentError(f"basis_index {basis_index} out of range for {num_qubits} qubits")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[basis_index] = 1.0
    return StateVector(num_qubits, amps)


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < tol)


def apply_unitary(state: StateVector, u: np.ndarray, targets) -> StateVector:
    """Apply a 2x2 or 4x4 unitary to the given qubits (in place).

    ``targets[0]`` is the high bit of the gate's own index space, so for the
    catalog's controlled gates it is the control qubit.
    """
    u = np.ascontiguousarray(u, dtype=np.complex128)
    targets = tuple(targets)
    if len(set(targets)) != len(targets):
        raise InvalidArgumentError(f"duplicate targets {targets}")
    for q in targets:
        _check_qubit(state.num_qubits, q)
    if u.shape != (2 ** len(targets),) * 2:
        raise InvalidArgumentError(f"matrix shape {u.shape} does not match {len(targets)} targets")
    if not is_unitary(u):
        raise ContractViolationError("matrix is not unitary within 1e-10")
    amps = state.amplitudes
    if len(targets) == 1:
        _kernels.apply_1q(amps, u[0, 0], u[0, 1], u[1, 0], u[1, 1], state._stride(targets[0]))
    elif len(targets) == 2:
        _kernels.apply_2q(amps, u, state._stride(targets[0]), state._stride(targets[1]))
    else:
        raise InvalidArgumentError("only 1- and 2-qubit unitaries are supported")
    return state


def measure_z(state: StateVector, qubit: int, rng: np.random.Generator) -> tuple[int, StateVector]:
    """Projective Z measurement; collapses and renormalizes in place."""
    _check_qubit(state.num_qubits, qubit)
    stride = state._stride(qubit)
    amps = state.amplitudes
    total = float(np.vdot(amps, amps).real)
    if total < PROB_FLOOR:
        raise ContractViolationError("both measurement outcomes have zero probability (norm-0 state)")
    p1 = min(max(_kernels.prob_one(amps, stride) / total, 0.0), 1.0)
    outcome = 1 if rng.random() < p1 else 0
    p = p1 if outcome == 1 else 1.0 - p1
    if p * total < PROB_FLOOR:
        raise ContractViolationError("measurement hit a zero-probability branch")
    _kernels.collapse(amps, stride, outcome, 1.0 / math.sqrt(p * total))
    return outcome, state


def expectation_z(state: StateVector, qubit: int) -> float:
    """<Z> on the given qubit; deterministic."""
    _check_qubit(state.num_qubits, qubit)
    p1 = _kernels.prob_one(state.amplitudes, state._stride(qubit))
    return 1.0 - 2.0 * p1


# Pauli basis used by the 2x2 closed form.
_PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def expm_pauli_scalars(a: float, vx: float, vy: float, vz: float):
    """exp(-i (a*I + v.sigma)) as the four entries of the 2x2 unitary.

    Closed form: e^{-ia} (cos|v| I - i sin|v| vhat.sigma); exact for any 2x2
    Hermitian generator.
    """
    r = math.sqrt(vx * vx + vy * vy + vz * vz)
    phase = complex(math.cos(a), -math.sin(a))
    if r < 1e-300:
        return phase, 0.0j, 0.0j, phase
    c = math.cos(r)
    s = math.sin(r) / r
    u00 = phase * complex(c, -s * vz)
    u01 = phase * (s * -vy + s * vx * -1j)
    u10 = phase * (s * vy + s * vx * -1j)
    u11 = phase * complex(c, s * vz)
    return u00, u01, u10, u11


def expm_2x2_scalars(g00, g01, g11) -> tuple[complex, complex, complex, complex]:
    """exp(-i G) for Hermitian G = [[g00, g01], [conj(g01), g11]], as entries."""
    a = 0.5 * (g00.real + g11.real)
    vz = 0.5 * (g00.real - g11.real)
    vx = g01.real
    vy = -g01.imag
    return expm_pauli_scalars(a, vx, vy, vz)


def herm_expm(g) -> np.ndarray:
    """exp(-i g) for a Hermitian generator.

    2x2 inputs use the exact Pauli closed form; larger matrices go through
    eigendecomposition. The result is unitary to 1e-10 by construction.
    """
    if isinstance(g, HermitianGenerator):
        m = g.matrix
    else:
        m = np.asarray(g, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidArgumentError(f"generator must be square, got shape {m.shape}")
        _check_hermitian(m)
    if m.shape == (2, 2):
        u00, u01, u10, u11 = expm_2x2_scalars(m[0, 0], m[0, 1], m[1, 1])
        return np.array([[u00, u01], [u10, u11]], dtype=np.complex128)
    w, v = np.linalg.eigh(m)
    return (v * np.exp(-1j * w)) @ v.conj().T
