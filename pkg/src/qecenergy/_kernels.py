"""Dense-amplitude kernels (the hot loops of the simulator).

Two interchangeable implementations live here: explicit loops compiled with
numba's ``@njit``, and pure-numpy array fallbacks. The env flag ``QEC_NUMBA=0``
forces the numpy path (it is also taken automatically if numba is missing);
``benchmarks/bench_kernels.py`` times both.

Index convention (used everywhere in the package): axis 0 of the register is
the *most significant* bit of the amplitude index, so the qubit on axis ``a``
of an ``n``-axis register has stride ``1 << (n - 1 - a)``.
"""

from __future__ import annotations

import math
import os

import numpy as np


def _numba_requested() -> bool:
    flag = os.environ.get("QEC_NUMBA", "1").strip().lower()
    return flag not in {"0", "false", "off", "no"}


# --------------------------------------------------------------------------
# Loop implementations (jitted when numba is active).
# All kernels mutate ``amps`` (a contiguous complex128 vector) in place.


def _apply_1q_loop(amps, u00, u01, u10, u11, stride):
    n = amps.shape[0]
    block = 2 * stride
    for base in range(0, n, block):
        for i0 in range(base, base + stride):
            i1 = i0 + stride
            a0 = amps[i0]
            a1 = amps[i1]
            amps[i0] = u00 * a0 + u01 * a1
            amps[i1] = u10 * a0 + u11 * a1


def _apply_2q_loop(amps, u, sa, sb):
    # sa is the stride of the gate's high (first) target, sb of the low one.
    n = amps.shape[0]
    hi = sa if sa > sb else sb
    lo = sb if sa > sb else sa
    for b1 in range(0, n, 2 * hi):
        for b2 in range(b1, b1 + hi, 2 * lo):
            for i in range(b2, b2 + lo):
                i00 = i
                i01 = i + sb
                i10 = i + sa
                i11 = i + sa + sb
                a00 = amps[i00]
                a01 = amps[i01]
                a10 = amps[i10]
                a11 = amps[i11]
                amps[i00] = u[0, 0] * a00 + u[0, 1] * a01 + u[0, 2] * a10 + u[0, 3] * a11
                amps[i01] = u[1, 0] * a00 + u[1, 1] * a01 + u[1, 2] * a10 + u[1, 3] * a11
                amps[i10] = u[2, 0] * a00 + u[2, 1] * a01 + u[2, 2] * a10 + u[2, 3] * a11
                amps[i11] = u[3, 0] * a00 + u[3, 1] * a01 + u[3, 2] * a10 + u[3, 3] * a11


def _apply_ctrl_loop(amps, c00, c01, c10, c11, d00, d01, d10, d11, sa, sb):
    # Block-diagonal two-qubit gate: 2x2 block c on the control-0 subspace,
    # block d on the control-1 subspace. sa = control stride, sb = target.
    n = amps.shape[0]
    hi = sa if sa > sb else sb
    lo = sb if sa > sb else sa
    for b1 in range(0, n, 2 * hi):
        for b2 in range(b1, b1 + hi, 2 * lo):
            for i in range(b2, b2 + lo):
                i00 = i
                i01 = i + sb
                i10 = i + sa
                i11 = i + sa + sb
                a0 = amps[i00]
                a1 = amps[i01]
                amps[i00] = c00 * a0 + c01 * a1
                amps[i01] = c10 * a0 + c11 * a1
                b0 = amps[i10]
                b1v = amps[i11]
                amps[i10] = d00 * b0 + d01 * b1v
                amps[i11] = d10 * b0 + d11 * b1v


def _prob_one_loop(amps, stride):
    n = amps.shape[0]
    total = 0.0
    for base in range(0, n, 2 * stride):
        for i in range(base + stride, base + 2 * stride):
            v = amps[i]
            total += v.real * v.real + v.imag * v.imag
    return total


def _collapse_loop(amps, stride, outcome, scale):
    n = amps.shape[0]
    for base in range(0, n, 2 * stride):
        if outcome == 1:
            for i in range(base, base + stride):
                amps[i] = 0.0
                amps[i + stride] *= scale
        else:
            for i in range(base, base + stride):
                amps[i] *= scale
                amps[i + stride] = 0.0


def _noisy_1q_batch_loop(lams, rows, eps, draws, out):
    # rows: (k, 4) Pauli components [a, vx, vy, vz] per generator term.
    count, k = draws.shape
    for g in range(count):
        a = 0.0
        vx = 0.0
        vy = 0.0
        vz = 0.0
        for i in range(k):
            lam = lams[i] + eps * draws[g, i]
            a += lam * rows[i, 0]
            vx += lam * rows[i, 1]
            vy += lam * rows[i, 2]
            vz += lam * rows[i, 3]
        r = math.sqrt(vx * vx + vy * vy + vz * vz)
        ph = complex(math.cos(a), -math.sin(a))
        if r < 1e-300:
            c = 1.0
            s = 0.0
        else:
            c = math.cos(r)
            s = math.sin(r) / r
        out[g, 0] = ph * complex(c, -s * vz)
        out[g, 1] = ph * complex(-s * vy, -s * vx)
        out[g, 2] = ph * complex(s * vy, -s * vx)
        out[g, 3] = ph * complex(c, s * vz)


def _noisy_2q_batch_loop(lams, wcode, eps, draws, out):
    # Controlled-family terms [II, ZI, IW, ZW] commute; the exponential splits
    # into one 2x2 block per control value. wcode: 0=X 1=Y 2=Z target Pauli.
    count = draws.shape[0]
    for g in range(count):
        l0 = lams[0] + eps * draws[g, 0]
        l1 = lams[1] + eps * draws[g, 1]
        l2 = lams[2] + eps * draws[g, 2]
        l3 = lams[3] + eps * draws[g, 3]
        for blk in range(2):
            sign = 1.0 if blk == 0 else -1.0
            a = l0 + sign * l1
            b = l2 + sign * l3
            ph = complex(math.cos(a), -math.sin(a))
            cb = math.cos(b)
            sb = math.sin(b)
            base = 4 * blk
            if wcode == 0:
                out[g, base + 0] = ph * cb
                out[g, base + 1] = ph * complex(0.0, -sb)
                out[g, base + 2] = ph * complex(0.0, -sb)
                out[g, base + 3] = ph * cb
            elif wcode == 1:
                out[g, base + 0] = ph * cb
                out[g, base + 1] = ph * -sb
                out[g, base + 2] = ph * sb
                out[g, base + 3] = ph * cb
            else:
                out[g, base + 0] = ph * complex(cb, -sb)
                out[g, base + 1] = 0.0
                out[g, base + 2] = 0.0
                out[g, base + 3] = ph * complex(cb, sb)


# --------------------------------------------------------------------------
# Pure-numpy fallbacks (same signatures, same in-place semantics).


def _apply_1q_numpy(amps, u00, u01, u10, u11, stride):
    v = amps.reshape(-1, 2, stride)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = u00 * a0 + u01 * a1
    v[:, 1, :] = u10 * a0 + u11 * a1


def _apply_2q_numpy(amps, u, sa, sb):
    hi, lo = (sa, sb) if sa > sb else (sb, sa)
    # axes: (block, hi bit, mid, lo bit, rest); distinct strides imply hi >= 2*lo
    v = amps.reshape(-1, 2, hi // (2 * lo), 2, lo)
    if sa > sb:
        quad = v.transpose(1, 3, 0, 2, 4).reshape(4, -1)
    else:
        quad = v.transpose(3, 1, 0, 2, 4).reshape(4, -1)
    res = (u @ quad).reshape(2, 2, v.shape[0], v.shape[2], lo)
    if sa > sb:
        v[:] = res.transpose(2, 0, 3, 1, 4)
    else:
        v[:] = res.transpose(2, 1, 3, 0, 4)


def _apply_ctrl_numpy(amps, c00, c01, c10, c11, d00, d01, d10, d11, sa, sb):
    u = np.zeros((4, 4), dtype=np.complex128)
    u[0, 0], u[0, 1], u[1, 0], u[1, 1] = c00, c01, c10, c11
    u[2, 2], u[2, 3], u[3, 2], u[3, 3] = d00, d01, d10, d11
    _apply_2q_numpy(amps, u, sa, sb)


def _prob_one_numpy(amps, stride):
    v = amps.reshape(-1, 2, stride)
    ones = v[:, 1, :]
    return float(np.sum(ones.real**2 + ones.imag**2))


def _collapse_numpy(amps, stride, outcome, scale):
    v = amps.reshape(-1, 2, stride)
    v[:, 1 - outcome, :] = 0.0
    v[:, outcome, :] *= scale


def _noisy_1q_batch_numpy(lams, rows, eps, draws, out):
    p = (lams + eps * draws) @ rows
    a, vx, vy, vz = p.T
    r = np.sqrt(vx * vx + vy * vy + vz * vz)
    safe = np.where(r > 0.0, r, 1.0)
    s = np.where(r > 0.0, np.sin(safe) / safe, 0.0)
    c = np.where(r > 0.0, np.cos(r), 1.0)
    phase = np.exp(-1j * a)
    out[:, 0] = phase * (c - 1j * (s * vz))
    out[:, 1] = phase * (-(s * vy) - 1j * (s * vx))
    out[:, 2] = phase * ((s * vy) - 1j * (s * vx))
    out[:, 3] = phase * (c + 1j * (s * vz))


def _noisy_2q_batch_numpy(lams, wcode, eps, draws, out):
    l = lams + eps * draws
    for base, sign in ((0, 1.0), (4, -1.0)):
        a = l[:, 0] + sign * l[:, 1]
        b = l[:, 2] + sign * l[:, 3]
        phase = np.exp(-1j * a)
        cb = np.cos(b)
        sb = np.sin(b)
        if wcode == 0:
            out[:, base + 0] = phase * cb
            out[:, base + 1] = phase * (-1j * sb)
            out[:, base + 2] = phase * (-1j * sb)
            out[:, base + 3] = phase * cb
        elif wcode == 1:
            out[:, base + 0] = phase * cb
            out[:, base + 1] = phase * (-sb)
            out[:, base + 2] = phase * sb
            out[:, base + 3] = phase * cb
        else:
            out[:, base + 0] = phase * (cb - 1j * sb)
            out[:, base + 1] = 0.0
            out[:, base + 2] = 0.0
            out[:, base + 3] = phase * (cb + 1j * sb)


_NUMPY_IMPLS = {
    "apply_1q": _apply_1q_numpy,
    "apply_2q": _apply_2q_numpy,
    "apply_ctrl": _apply_ctrl_numpy,
    "prob_one": _prob_one_numpy,
    "collapse": _collapse_numpy,
    "noisy_1q_batch": _noisy_1q_batch_numpy,
    "noisy_2q_batch": _noisy_2q_batch_numpy,
}

if _numba_requested():
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        njit = None
else:
    njit = None

NUMBA_ENABLED = njit is not None

if NUMBA_ENABLED:
    _jit = njit(cache=True, fastmath=False)
    apply_1q = _jit(_apply_1q_loop)
    apply_2q = _jit(_apply_2q_loop)
    apply_ctrl = _jit(_apply_ctrl_loop)
    prob_one = _jit(_prob_one_loop)
    collapse = _jit(_collapse_loop)
    noisy_1q_batch = _jit(_noisy_1q_batch_loop)
    noisy_2q_batch = _jit(_noisy_2q_batch_loop)
    BACKEND = "numba"
else:
    apply_1q = _apply_1q_numpy
    apply_2q = _apply_2q_numpy
    apply_ctrl = _apply_ctrl_numpy
    prob_one = _prob_one_numpy
    collapse = _collapse_numpy
    noisy_1q_batch = _noisy_1q_batch_numpy
    noisy_2q_batch = _noisy_2q_batch_numpy
    BACKEND = "numpy"
