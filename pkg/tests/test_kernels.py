from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from qecenergy import _kernels


def _rand_state(n_qubits: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
    return (v / np.linalg.norm(v)).astype(np.complex128)


def _rand_unitary(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(m)
    return q


@pytest.mark.parametrize("n_qubits", [1, 3, 6])
@pytest.mark.parametrize("axis", [0, 1, 2])
def test_apply_1q_active_matches_numpy(n_qubits, axis):
    if axis >= n_qubits:
        pytest.skip("axis out of range")
    u = _rand_unitary(2, axis + 10 * n_qubits)
    stride = 1 << (n_qubits - 1 - axis)
    a = _rand_state(n_qubits, 3)
    b = a.copy()
    _kernels.apply_1q(a, u[0, 0], u[0, 1], u[1, 0], u[1, 1], stride)
    _kernels._NUMPY_IMPLS["apply_1q"](b, u[0, 0], u[0, 1], u[1, 0], u[1, 1], stride)
    assert np.max(np.abs(a - b)) < 1e-13


@pytest.mark.parametrize("axes", [(0, 1), (1, 0), (0, 3), (3, 1), (4, 2)])
def test_apply_2q_active_matches_numpy(axes):
    n_qubits = 5
    u = _rand_unitary(4, sum(axes))
    sa = 1 << (n_qubits - 1 - axes[0])
    sb = 1 << (n_qubits - 1 - axes[1])
    a = _rand_state(n_qubits, 4)
    b = a.copy()
    _kernels.apply_2q(a, u, sa, sb)
    _kernels._NUMPY_IMPLS["apply_2q"](b, u, sa, sb)
    assert np.max(np.abs(a - b)) < 1e-13


def test_apply_2q_matches_dense_kron():
    # reference: full 2^n unitary built from kron with explicit axis placement
    n = 4
    u = _rand_unitary(4, 9)
    state = _rand_state(n, 5)
    got = state.copy()
    _kernels.apply_2q(got, u, 1 << (n - 1 - 1), 1 << (n - 1 - 3))  # targets (1, 3)
    big = np.zeros((2**n, 2**n), dtype=complex)
    for idx in range(2**n):
        bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
        for r in range(4):
            b1, b3 = r >> 1, r & 1
            out = bits.copy()
            out[1], out[3] = b1, b3
            col = 2 * bits[1] + bits[3]
            j = sum(bit << (n - 1 - q) for q, bit in enumerate(out))
            big[j, idx] += u[r, col]
    want = big @ state
    assert np.max(np.abs(got - want)) < 1e-12


def test_apply_ctrl_matches_block_matrix():
    n = 3
    blocks = [_rand_unitary(2, 11), _rand_unitary(2, 12)]
    u = np.zeros((4, 4), dtype=complex)
    u[:2, :2] = blocks[0]
    u[2:, 2:] = blocks[1]
    a = _rand_state(n, 6)
    b = a.copy()
    _kernels.apply_ctrl(
        a,
        blocks[0][0, 0], blocks[0][0, 1], blocks[0][1, 0], blocks[0][1, 1],
        blocks[1][0, 0], blocks[1][0, 1], blocks[1][1, 0], blocks[1][1, 1],
        1 << (n - 1 - 0), 1 << (n - 1 - 2),
    )
    _kernels.apply_2q(b, u, 1 << (n - 1 - 0), 1 << (n - 1 - 2))
    assert np.max(np.abs(a - b)) < 1e-13


def test_prob_one_and_collapse_match_numpy():
    a = _rand_state(5, 8)
    stride = 4
    p_active = _kernels.prob_one(a, stride)
    p_numpy = _kernels._NUMPY_IMPLS["prob_one"](a.copy(), stride)
    assert p_active == pytest.approx(p_numpy, abs=1e-14)
    b = a.copy()
    scale = 1.0 / np.sqrt(p_active)
    _kernels.collapse(a, stride, 1, scale)
    _kernels._NUMPY_IMPLS["collapse"](b, stride, 1, scale)
    assert np.max(np.abs(a - b)) < 1e-13
    assert np.linalg.norm(a) == pytest.approx(1.0)


def test_noisy_batches_match_numpy():
    from qecenergy.gates import gate_catalog

    for name in ("X", "H", "S", "CX", "CY", "CZ"):
        spec = gate_catalog(name)
        draws = np.random.default_rng(3).standard_normal((7, len(spec._lams)))
        if spec.arity == 1:
            got = np.empty((7, 4), dtype=np.complex128)
            want = np.empty((7, 4), dtype=np.complex128)
            _kernels.noisy_1q_batch(spec._lams, spec._pauli_rows, 0.2, draws, got)
            _kernels._NUMPY_IMPLS["noisy_1q_batch"](spec._lams, spec._pauli_rows, 0.2, draws, want)
        else:
            wcode = {"X": 0, "Y": 1, "Z": 2}[spec._w_kind]
            got = np.empty((7, 8), dtype=np.complex128)
            want = np.empty((7, 8), dtype=np.complex128)
            _kernels.noisy_2q_batch(spec._lams, wcode, 0.2, draws, got)
            _kernels._NUMPY_IMPLS["noisy_2q_batch"](spec._lams, wcode, 0.2, draws, want)
        assert np.max(np.abs(got - want)) < 1e-13, name


_BACKEND_PROBE = """
import os, json
import numpy as np
from qecenergy import _kernels
from qecenergy.harness import SweepConfig, run_sweep
cfg = SweepConfig(code_ids=["rep3:direct"], p_x_grid=[0.1], shots=400,
                  master_seed=99, epsilon_grid=[0.05])
(rec,) = run_sweep(cfg)
print(json.dumps({"backend": _kernels.BACKEND, "error_rate": rec.error_rate}))
"""


def test_env_flag_selects_numpy_backend_with_identical_results(tmp_path):
    def probe(flag: str | None):
        env = dict(os.environ)
        env.pop("QEC_NUMBA", None)
        if flag is not None:
            env["QEC_NUMBA"] = flag
        out = subprocess.run(
            [sys.executable, "-c", _BACKEND_PROBE], env=env, capture_output=True, text=True
        )
        assert out.returncode == 0, out.stderr
        import json

        return json.loads(out.stdout)

    default = probe(None)
    numpy_path = probe("0")
    assert default["backend"] == "numba"
    assert numpy_path["backend"] == "numpy"
    assert numpy_path["error_rate"] == default["error_rate"]
