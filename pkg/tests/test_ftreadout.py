from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import NOISELESS, forced_error_circuit
from qecenergy.circuit import Circuit, RetryBlock, execute_shot, final_state, ideal_outcome
from qecenergy.codes import get_code, pipeline
from qecenergy.errors import InvalidArgumentError
from qecenergy.ftreadout import (
    FtConfig,
    build_cat_state_prep,
    build_ft_protected_computation,
    build_ft_syndrome_extraction,
)
from qecenergy.gates import NoiseModel


def test_ft_config_validation():
    with pytest.raises(InvalidArgumentError):
        FtConfig(validation_rounds=-1)
    assert FtConfig(validation_rounds=1).cats(3) == 3
    assert FtConfig(validation_rounds=1, cat_state_count=2).cats(3) == 2
    with pytest.raises(InvalidArgumentError):
        FtConfig(validation_rounds=1, cat_state_count=7).cats(3)


def test_cat_prep_zero_rounds_is_bell_state():
    prep = build_cat_state_prep(0)
    amps = final_state(prep, NOISELESS, np.random.default_rng(0))
    bell = np.zeros(4, dtype=complex)
    bell[0b00] = bell[0b11] = 1 / math.sqrt(2)
    assert np.max(np.abs(amps - bell)) < 1e-12


@pytest.mark.parametrize("v", [0, 1, 2, 3])
def test_cat_prep_tally(v):
    prep = build_cat_state_prep(v)
    expected = {"H": 1, "CX": 1 + 2 * v}
    assert prep.gate_tally() == expected
    assert prep.energy_coefficient() == Fraction(3 + 2 * v, 16)


def test_validation_passes_without_noise():
    prep = build_cat_state_prep(2)
    for seed in range(10):
        out = execute_shot(prep, NOISELESS, np.random.default_rng(seed))
        assert out.classical_bits[:2] == (0, 0)


@pytest.mark.parametrize("n", [3, 5, 7])
@pytest.mark.parametrize("v", [0, 1, 2])
def test_ft_overhead_formula_exact(n, v):
    frag = build_ft_syndrome_extraction(n, FtConfig(validation_rounds=v))
    assert frag.energy_coefficient() == Fraction(n * (7 + 2 * v), 16)
    # per-cat tally: 2 H and (3+2v) CX
    assert frag.gate_tally() == {"H": 2 * n, "CX": (3 + 2 * v) * n}


def test_ft_overhead_with_reduced_cat_count():
    frag = build_ft_syndrome_extraction(5, FtConfig(validation_rounds=1, cat_state_count=4))
    assert frag.energy_coefficient() == Fraction(4 * (7 + 2), 16)


def test_ft_pipeline_replaces_bare_extraction_budget():
    # encode (N-1 CX) + logical (N X) + FT readout
    for n, v in ((3, 1), (5, 0)):
        c = build_ft_protected_computation(n, FtConfig(validation_rounds=v))
        expected = Fraction(n, 8) + Fraction(n - 1, 16) + Fraction(n * (7 + 2 * v), 16)
        assert c.energy_coefficient() == expected


def test_ft_registry_ids():
    code = get_code("rep3:direct:ft(v=1)")
    assert code.ft.validation_rounds == 1
    c = pipeline("rep3:direct:ft(v=1)")
    assert ideal_outcome(c) == 1
    c_reduced = pipeline("rep5:waterfall:ft(v=0,cats=4)")
    assert ideal_outcome(c_reduced) == 1


def test_ft_without_logical_x_reads_zero():
    c = pipeline("rep3:direct:ft(v=1)", include_logical_x=False)
    assert ideal_outcome(c) == 0


def test_ft_noiseless_transparency_by_enumeration():
    """At eps=0 the FT pipeline decodes every channel pattern exactly like the
    bare pipeline, so its failure rate equals the Eq.-4 oracle for every p."""
    n = 3
    base = pipeline("rep3:direct")
    ft = build_ft_protected_computation(n, FtConfig(validation_rounds=1))
    for r in range(n + 1):
        for pattern in itertools.combinations(range(n), r):
            want = execute_shot(
                forced_error_circuit(base, set(pattern)), NOISELESS, np.random.default_rng(0)
            ).logical_bit
            for seed in range(4):
                got = execute_shot(
                    forced_error_circuit(ft, set(pattern)), NOISELESS, np.random.default_rng(seed)
                ).logical_bit
                assert got == want, (pattern, seed)


def test_ft_monte_carlo_matches_oracle_at_eps_zero():
    from qecenergy.analytics import repetition_failure_rate

    c = pipeline("rep3:direct:ft(v=1)")
    p = 0.1
    n_shots = 20_000
    rng = np.random.default_rng(123)
    wrong = sum(
        execute_shot(c, NoiseModel(0.0, p), rng).logical_bit != 1 for _ in range(n_shots)
    )
    oracle = repetition_failure_rate(p, 3)
    assert abs(wrong / n_shots - oracle) < 3 * math.sqrt(oracle * (1 - oracle) / n_shots)


def test_retry_block_present_only_with_validation():
    with_val = build_ft_protected_computation(3, FtConfig(validation_rounds=1))
    without = build_ft_protected_computation(3, FtConfig(validation_rounds=0))
    assert any(isinstance(i, RetryBlock) for i in with_val.instructions)
    assert not any(isinstance(i, RetryBlock) for i in without.instructions)


def test_ft_flag_clear_without_noise():
    c = pipeline("rep3:direct:ft(v=2)")
    out = execute_shot(c, NOISELESS, np.random.default_rng(0))
    assert out.classical_bits[-1] == 0  # retry flag untouched


def test_ft_live_width_stays_small():
    # the executor must not accumulate spent cat qubits
    from qecenergy.circuit import _LiveState, _ShotCtx, _exec_nodes

    c = pipeline("rep9:direct:ft(v=1)")
    plan = c.plan()
    ctx = _ShotCtx(plan, c.num_qubits, c.num_clbits, NoiseModel(0.01, 0.1), np.random.default_rng(0), True)
    max_live = 0
    orig_ensure = _LiveState.ensure

    def tracking_ensure(self, qubit):
        nonlocal max_live
        orig_ensure(self, qubit)
        max_live = max(max_live, len(self.order))

    _LiveState.ensure = tracking_ensure
    try:
        _exec_nodes(plan.nodes, ctx)
    finally:
        _LiveState.ensure = orig_ensure
    assert max_live <= 9 + 3 + 1  # data + cat pair + verifier (+1 slack)
