"""Benchmark the numba kernels against the pure-numpy fallback.

The backend is fixed per process by the QEC_NUMBA env flag, so each variant
runs in its own subprocess; the parent prints a comparison table including the
resulting logical error rates, which must agree exactly.

Run:

    python benchmarks/bench_kernels.py [--shots 4000]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
import numpy as np
from qecenergy import _kernels
from qecenergy.circuit import execute_shot, ideal_outcome
from qecenergy.codes import pipeline
from qecenergy.gates import NoiseModel
from qecenergy.harness import _CellStreams, cell_key

shots = int(sys.argv[1])
results = {"backend": _kernels.BACKEND, "cases": {}}
for code_id, eps, p in (
    ("rep3:direct", 1e-3, 0.08),
    ("rep7:direct", 1e-3, 0.08),
    ("rep9:direct", 1e-3, 0.10),
    ("steane7", 1e-3, 0.02),
    ("rep3:direct:ft(v=1)", 1e-3, 0.02),
):
    circ = pipeline(code_id)
    ideal = ideal_outcome(circ)
    noise = NoiseModel(eps, p)
    streams = _CellStreams(cell_key(7, code_id, 0, 0))
    execute_shot(circ, noise, streams.shot(0))  # jit warm-up, excluded
    t0 = time.perf_counter()
    wrong = 0
    for s in range(shots):
        wrong += execute_shot(circ, noise, streams.shot(s)).logical_bit != ideal
    dt = time.perf_counter() - t0
    results["cases"][code_id] = {
        "us_per_shot": dt / shots * 1e6,
        "error_rate": wrong / shots,
    }
print(json.dumps(results))
"""


def run_variant(flag: str, shots: int) -> dict:
    env = dict(os.environ)
    env["QEC_NUMBA"] = flag
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, str(shots)],
        env=env, capture_output=True, text=True,
    )
    if out.returncode != 0:
        raise SystemExit(out.stderr)
    return json.loads(out.stdout)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shots", type=int, default=4000)
    args = ap.parse_args()

    numba = run_variant("1", args.shots)
    numpy_ = run_variant("0", args.shots)
    assert numba["backend"] == "numba", "numba backend unavailable"
    assert numpy_["backend"] == "numpy"

    print(f"{args.shots} shots per case, us/shot (error rates must match exactly)\n")
    print(f"{'pipeline':24s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}  {'err(numba)':>10s} {'err(numpy)':>10s}")
    for case, nb in numba["cases"].items():
        np_ = numpy_["cases"][case]
        speed = np_["us_per_shot"] / nb["us_per_shot"]
        match = "" if nb["error_rate"] == np_["error_rate"] else "  MISMATCH"
        print(
            f"{case:24s} {nb['us_per_shot']:10.1f} {np_['us_per_shot']:10.1f} "
            f"{speed:7.2f}x  {nb['error_rate']:10.5f} {np_['error_rate']:10.5f}{match}"
        )
    mismatches = [
        c for c in numba["cases"]
        if numba["cases"][c]["error_rate"] != numpy_["cases"][c]["error_rate"]
    ]
    if mismatches:
        print(f"\nbackend results differ for: {mismatches}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
