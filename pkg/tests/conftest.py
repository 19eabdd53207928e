from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from qecenergy.circuit import ChannelX, Circuit, Gate, Measure, final_state
from qecenergy.gates import NoiseModel
from qecenergy.statevector import StateVector, expectation_z

NOISELESS = NoiseModel(0.0, 0.0)


def pauli_apply(amps: np.ndarray, string: str) -> np.ndarray:
    """Apply a Pauli string (qubit 0 = MSB) to an amplitude vector."""
    n = len(string)
    v = amps.reshape([2] * n).copy()
    for q, ch in enumerate(string):
        if ch == "I":
            continue
        v = np.moveaxis(v, q, 0)
        v0, v1 = v[0].copy(), v[1].copy()
        if ch == "X":
            v[0], v[1] = v1, v0
        elif ch == "Z":
            v[0], v[1] = v0, -v1
        elif ch == "Y":
            v[0], v[1] = -1j * v1, 1j * v0
        v = np.moveaxis(v, 0, q)
    return np.ascontiguousarray(v).reshape(-1)


def pauli_expectation(amps: np.ndarray, string: str) -> complex:
    return complex(np.vdot(amps, pauli_apply(amps, string)))


def forced_error_circuit(base: Circuit, flips, paulis=None) -> Circuit:
    """Copy a pipeline with its ChannelX sites replaced by deterministic
    Paulis on ``flips`` (X by default, or per-qubit letters via ``paulis``)."""
    out = Circuit(base.num_qubits, base.num_clbits)
    flips = set(flips)
    for ins in base.instructions:
        if isinstance(ins, ChannelX):
            if ins.qubit in flips:
                letter = paulis.get(ins.qubit, "X") if paulis else "X"
                out.append(Gate(letter, (ins.qubit,)))
        else:
            out.append(ins)
    out.set_readout(base.readout_clbits, base.readout_mode)
    return out


def single_readout_error_probability(circuit: Circuit) -> float:
    """Exact P(readout flips the ideal bit 1) for a deterministic-syndrome
    single-readout pipeline: drop the trailing measure, evolve, read <Z>."""
    assert circuit.readout_mode == "single"
    last = circuit.instructions[-1]
    assert isinstance(last, Measure) and last.qubit == 0
    cc = Circuit(circuit.num_qubits, circuit.num_clbits)
    for ins in circuit.instructions[:-1]:
        cc.append(ins)
    amps = final_state(cc, NOISELESS, np.random.default_rng(0))
    z = expectation_z(StateVector(circuit.num_qubits, amps), 0)
    return (1.0 + z) / 2.0


def majority_failure_by_enumeration(p: Fraction, n: int) -> Fraction:
    """Independent oracle: enumerate all 2^N flip patterns under majority
    decoding (exact rational arithmetic)."""
    total = Fraction(0)
    for bits in itertools.product((0, 1), repeat=n):
        k = sum(bits)
        if 2 * k > n:
            total += p**k * (1 - p) ** (n - k)
    return total


def combined_sigma(e1: float, n1: int, e2: float, n2: int) -> float:
    return math.sqrt(e1 * (1 - e1) / n1 + e2 * (1 - e2) / n2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240915)
