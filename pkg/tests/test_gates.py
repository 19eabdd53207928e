from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qecenergy.errors import DivergentEnergyError, InvalidArgumentError
from qecenergy.gates import (
    GATE_NAMES,
    NoiseModel,
    average_gate_fidelity,
    estimate_gate_error,
    gate_catalog,
    gate_energy_bound,
    sample_noisy_gate,
    sample_noisy_scalars,
    sample_noisy_scalars_batch,
    scalars_to_matrix,
)
from qecenergy.statevector import herm_expm

HALF_PI = math.pi / 2
QUARTER_PI = math.pi / 4

TABLE_I_MULTISETS = {
    "X": (HALF_PI, HALF_PI),
    "Y": (HALF_PI, HALF_PI),
    "Z": (HALF_PI, HALF_PI),
    "H": (HALF_PI, HALF_PI),
    "Q": (HALF_PI, -math.pi / math.sqrt(8), -math.pi / math.sqrt(8)),
    "CX": (QUARTER_PI, QUARTER_PI, -QUARTER_PI, -QUARTER_PI),
    "CY": (QUARTER_PI, QUARTER_PI, -QUARTER_PI, -QUARTER_PI),
    "CZ": (QUARTER_PI, QUARTER_PI, -QUARTER_PI, -QUARTER_PI),
    "S": (HALF_PI,),
}

TABLE_I_ENERGY = {
    "X": Fraction(1, 8),
    "Y": Fraction(1, 8),
    "Z": Fraction(1, 8),
    "H": Fraction(1, 8),
    "Q": Fraction(1, 8),
    "CX": Fraction(1, 16),
    "CY": Fraction(1, 16),
    "CZ": Fraction(1, 16),
    "S": Fraction(1, 16),
}


def test_catalog_names():
    assert set(GATE_NAMES) == set(TABLE_I_MULTISETS)
    with pytest.raises(InvalidArgumentError):
        gate_catalog("T")


@pytest.mark.parametrize("name", GATE_NAMES)
def test_catalog_reconstruction_including_phase(name):
    spec = gate_catalog(name)
    gen = sum(t.coefficient * t.generator.matrix for t in spec.terms)
    recon = herm_expm(gen)
    assert np.max(np.abs(recon - spec.ideal)) < 1e-10


@pytest.mark.parametrize("name", GATE_NAMES)
def test_catalog_multisets_match_table(name):
    spec = gate_catalog(name)
    assert spec.multiset() == tuple(sorted(TABLE_I_MULTISETS[name]))


@pytest.mark.parametrize("name", GATE_NAMES)
def test_energy_rationals_match_table(name):
    spec = gate_catalog(name)
    assert spec.energy_coefficient == TABLE_I_ENERGY[name]
    lam_sq = sum(t.coefficient**2 for t in spec.terms)
    assert lam_sq == pytest.approx(4 * float(spec.energy_coefficient) * math.pi**2, rel=1e-12)


def test_q_gate_matches_caption_up_to_phase():
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    q = gate_catalog("Q").ideal
    assert np.max(np.abs(q + (z + y) / math.sqrt(2))) < 1e-12  # ideal = -(Z+Y)/sqrt(2)


def test_energy_bound_values():
    eps = 0.1
    assert gate_energy_bound(gate_catalog("X"), eps).value == pytest.approx(
        math.pi**2 / (8 * eps**2)
    )
    assert gate_energy_bound(gate_catalog("CX"), eps).value == pytest.approx(
        math.pi**2 / (16 * eps**2)
    )
    assert gate_energy_bound(gate_catalog("Q"), eps).value == pytest.approx(
        math.pi**2 / (8 * eps**2)
    )


def test_energy_bound_diverges_at_zero():
    with pytest.raises(DivergentEnergyError):
        gate_energy_bound(gate_catalog("X"), 0.0)


def test_noise_model_validation():
    NoiseModel(0.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        NoiseModel(-1e-3, 0.0)
    with pytest.raises(InvalidArgumentError):
        NoiseModel(0.1, 1.5)


def test_zero_noise_returns_ideal(rng):
    for name in GATE_NAMES:
        spec = gate_catalog(name)
        assert np.array_equal(sample_noisy_gate(spec, 0.0, rng), spec.ideal)


@pytest.mark.parametrize("name", GATE_NAMES)
def test_sampled_gates_are_unitary(name, rng):
    spec = gate_catalog(name)
    dim = spec.ideal.shape[0]
    for _ in range(50):
        u = sample_noisy_gate(spec, 0.3, rng)
        assert np.max(np.abs(u.conj().T @ u - np.eye(dim))) < 1e-10


@pytest.mark.parametrize("name", GATE_NAMES)
def test_fast_paths_match_reference(name):
    spec = gate_catalog(name)
    for seed in range(30):
        r1, r2, r3 = (np.random.default_rng(seed) for _ in range(3))
        ref = sample_noisy_gate(spec, 0.11, r1)
        fast = scalars_to_matrix(spec, sample_noisy_scalars(spec, 0.11, r2))
        batch = sample_noisy_scalars_batch(spec, 0.11, 1, r3)[0]
        assert np.max(np.abs(ref - fast)) < 1e-12
        assert np.max(np.abs(np.asarray(sample_noisy_scalars(spec, 0.11, np.random.default_rng(seed))) - batch)) < 1e-12


def test_pauli_small_eps_law_against_quadrature(rng):
    # closed form: E[1-F] = (2/3) E[sin^2 d] = (1 - exp(-2 eps^2)) / 3
    eps = 0.05
    expected = (1 - math.exp(-2 * eps**2)) / 3
    # independent 1D quadrature over the rotation-angle coefficient alone
    x, w = np.polynomial.hermite_e.hermegauss(64)
    quad = float(np.sum(w * (2.0 / 3.0) * np.sin(eps * x) ** 2) / np.sum(w))
    assert quad == pytest.approx(expected, rel=1e-6)
    mean, sem = estimate_gate_error(gate_catalog("X"), eps, 100_000, rng)
    assert mean == pytest.approx(expected, rel=0.05)


@pytest.mark.parametrize("name", ["X", "Y", "Z"])
def test_mean_infidelity_scaling_at_eps_001(name, rng):
    eps = 0.01
    mean, sem = estimate_gate_error(gate_catalog(name), eps, 60_000, rng)
    assert mean == pytest.approx((2.0 / 3.0) * eps**2, rel=0.05)


def test_estimate_gate_error_edges(rng):
    assert estimate_gate_error(gate_catalog("X"), 0.0, 1000, rng) == (0.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        estimate_gate_error(gate_catalog("X"), 0.1, 50, rng)


def test_pauli_noise_symmetry():
    # X, Y, Z share isomorphic decompositions
    results = {}
    for name in ("X", "Y", "Z"):
        results[name] = estimate_gate_error(
            gate_catalog(name), 0.05, 40_000, np.random.default_rng(hash(name) % 2**32)
        )
    names = list(results)
    for a in names:
        for b in names:
            if a < b:
                (ma, sa), (mb, sb) = results[a], results[b]
                assert abs(ma - mb) < 4 * math.hypot(sa, sb)


def test_fidelity_examples():
    x = gate_catalog("X").ideal
    assert average_gate_fidelity(x, x) == pytest.approx(1.0)
    assert average_gate_fidelity(np.eye(2), x) == pytest.approx(1.0 / 3.0)
    cx = gate_catalog("CX").ideal
    cz = gate_catalog("CZ").ideal
    assert average_gate_fidelity(cx, cz) == pytest.approx(0.4)
    with pytest.raises(InvalidArgumentError):
        average_gate_fidelity(x, cx)


@settings(max_examples=40, deadline=None)
@given(
    name=st.sampled_from(GATE_NAMES),
    phi=st.floats(0, 2 * math.pi, allow_nan=False),
    seed=st.integers(0, 1000),
)
def test_fidelity_phase_invariance_and_bounds(name, phi, seed):
    spec = gate_catalog(name)
    u2 = sample_noisy_gate(spec, 0.4, np.random.default_rng(seed))
    f = average_gate_fidelity(spec.ideal, u2)
    assert 0.0 <= f <= 1.0 + 1e-12
    assert average_gate_fidelity(spec.ideal, np.exp(1j * phi) * u2) == pytest.approx(
        f, abs=1e-12
    )
