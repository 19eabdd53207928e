"""Command-line interface.

Subcommands: gates, oracle, sweep, crossover, ft-compare. Exit codes: 0 on
success, 1 on I/O failure, 2 on bad arguments, 3 on input-schema violations.
The env var QEC_SEED overrides the master seed (an explicit --seed flag beats
both it and any config file). Screen output uses 4 significant digits; files
carry full precision.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__, analytics
from .codes import get_code
from .errors import InvalidArgumentError, SchemaViolationError
from .gates import GATE_NAMES, gate_catalog, gate_energy_bound
from .harness import (
    PRESET_NAMES,
    SweepConfig,
    SweepRecord,
    emit_csv,
    emit_manifest,
    load_sweep_config,
    preset,
    read_csv,
    run_sweep,
)


def _fmt(x: float) -> str:
    return f"{x:.4g}"


def _master_seed_override(args) -> int | None:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("QEC_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InvalidArgumentError(f"QEC_SEED must be an integer, got {env!r}") from None
    return None


def _cmd_gates(args) -> int:
    if args.gate not in GATE_NAMES:
        raise InvalidArgumentError(
            f"unknown gate {args.gate!r}; catalog: {', '.join(GATE_NAMES)}"
        )
    spec = gate_catalog(args.gate)
    if args.epsilon <= 0:
        raise InvalidArgumentError("--epsilon must be > 0")
    bound = gate_energy_bound(spec, args.epsilon)
    coeff = spec.energy_coefficient
    print(f"gate {spec.name} (arity {spec.arity})")
    print(f"coefficient multiset (rad): {{{', '.join(_fmt(c) for c in spec.multiset())}}}")
    print(f"energy coefficient: {coeff} * pi^2/eps^2 (hbar*omega0)")
    print(f"energy bound at eps={_fmt(args.epsilon)}: {_fmt(bound.value)} hbar*omega0")
    print("ideal unitary:")
    with np.printoptions(precision=4, suppress=True, linewidth=120):
        print(spec.ideal)
    return 0


def _parse_rep_size(code: str) -> int:
    if not code.startswith("rep"):
        raise InvalidArgumentError(f"oracle expects repN (e.g. rep3), got {code!r}")
    try:
        n = int(code[3:])
    except ValueError:
        raise InvalidArgumentError(f"oracle expects repN, got {code!r}") from None
    if n < 1 or n % 2 == 0:
        raise InvalidArgumentError(f"repetition size must be odd >= 1, got {n}")
    return n


def _cmd_oracle(args) -> int:
    n = _parse_rep_size(args.code)
    p = args.px
    if not 0 <= p <= 1:
        raise InvalidArgumentError(f"--px must be a probability, got {p}")
    exact = analytics.repetition_failure_rate(p, n)
    leading = analytics.repetition_failure_rate_leading(p, n)
    corr = analytics.expected_corrections(p, n)
    print(f"repetition N={n}, P_X={_fmt(p)}")
    print(f"failure rate (exact):         {_fmt(exact)}")
    print(f"failure rate (leading order): {_fmt(leading)}")
    print(f"expected corrections:         {_fmt(corr)}")
    return 0


def _default_out(name: str, suffix: str) -> str:
    stamp = time.strftime("%Y%m%d-%H%M%S")
    return f"{name}_{stamp}{suffix}"


def _cmd_sweep(args) -> int:
    if (args.preset is None) == (args.config is None):
        raise InvalidArgumentError("exactly one of --preset/--config is required")
    if args.preset is not None:
        cfg = preset(args.preset, shots=args.shots, points=args.points, workers=args.workers)
    else:
        cfg = load_sweep_config(args.config)
        if args.shots is not None:
            cfg.shots = args.shots
        if args.workers is not None:
            cfg.workers = args.workers
    seed = _master_seed_override(args)
    if seed is not None:
        cfg.master_seed = seed
    cfg.validate()

    out = args.out or _default_out(cfg.name, ".csv")
    manifest = args.manifest or _default_out(cfg.name, ".manifest.json")
    records = run_sweep(cfg)
    emit_csv(records, out)
    emit_manifest(cfg, manifest)
    print(f"{len(records)} records ({len(cfg.code_ids)} codes, shots={cfg.shots}, "
          f"workers={cfg.workers}, master_seed={cfg.master_seed})")
    print(f"csv:      {out}")
    print(f"manifest: {manifest}")
    for r in records[: args.head]:
        print(
            f"  {r.code_id:28s} eps={_fmt(r.epsilon)} E={_fmt(r.energy)} "
            f"p={_fmt(r.p_x)} err={_fmt(r.error_rate)}±{_fmt(r.std_error)}"
        )
    return 0


def _rep_size_of(code_id: str) -> int | None:
    if code_id == "bare":
        return 1
    head = code_id.split(":")[0]
    if head.startswith("rep") and ":ft(" not in code_id:
        try:
            return int(head[3:])
        except ValueError:
            return None
    return None


def _curves_by_code(records: list[SweepRecord], p_x: float):
    curves: dict[str, list] = {}
    for r in records:
        if r.p_x == p_x:
            curves.setdefault(r.code_id, []).append((r.energy, r.error_rate, r.std_error))
    return {
        cid: analytics.ErrorCurve(tuple(sorted(pts))) for cid, pts in curves.items()
    }


def _cmd_crossover(args) -> int:
    records = read_csv(args.input)
    if not records:
        raise SchemaViolationError(f"{args.input}: no records")
    p_values = sorted({r.p_x for r in records})
    p_x = args.px if args.px is not None else p_values[0]
    if p_x not in p_values:
        raise InvalidArgumentError(f"p_x={p_x} not present; file has {p_values}")
    curves = _curves_by_code(records, p_x)
    sized = sorted(
        ((n, cid) for cid, n in ((c, _rep_size_of(c)) for c in curves) if n is not None)
    )
    if len(sized) < 2:
        raise InvalidArgumentError("need at least two repetition-family codes (incl. bare)")
    print(f"crossovers at P_X={_fmt(p_x)} (energy in hbar*omega0):")
    found: list[tuple[int, float]] = []
    for (n_small, small), (n_big, big) in zip(sized, sized[1:]):
        e = analytics.find_crossover(curves[big], curves[small])
        label = f"{big} vs {small}"
        if e is None:
            print(f"  {label:34s} none")
        else:
            print(f"  {label:34s} {_fmt(e)}")
            found.append((n_big, e))
    if len(found) >= 2:
        a, b, resid = analytics.fit_exponential(found)
        print(f"exponential fit E = a*exp(b*N): a={_fmt(a)}, b={_fmt(b)}, residual={_fmt(resid)}")
    return 0


def _cmd_ft_compare(args) -> int:
    v = args.v
    if v < 0:
        raise InvalidArgumentError("--v must be >= 0")
    print(f"fault-tolerant readout budget ratios (v={v} validation rounds):")
    for n in (3, 5, 7):
        ratio = analytics.ft_budget_ratio(n, v)
        overhead = analytics.ft_overhead_coefficient(n, v)
        print(
            f"  N={n}: overhead {overhead} = {_fmt(float(overhead))}, "
            f"total ratio {ratio} = {_fmt(float(ratio))}"
        )
    limit = analytics.ft_budget_ratio_limit(v)
    print(f"  N->inf: total ratio {limit} = {_fmt(float(limit))}")

    if args.shots:
        cfg = preset("fig9", shots=args.shots, points=args.points, workers=args.workers)
        cfg.code_ids = ["bare", "rep3:direct", f"rep3:direct:ft(v={v})"]
        seed = _master_seed_override(args)
        if seed is not None:
            cfg.master_seed = seed
        records = run_sweep(cfg)
        if args.out:
            emit_csv(records, args.out)
            print(f"csv: {args.out}")
        print("error at the top of the energy grid (oracle limit "
              f"{_fmt(analytics.repetition_failure_rate(cfg.p_x_grid[0], 3))} for rep3):")
        top = max(r.energy for r in records if r.code_id == "bare")
        for cid in cfg.code_ids:
            best = max((r for r in records if r.code_id == cid), key=lambda r: r.energy)
            print(f"  {cid:24s} E={_fmt(best.energy)}: {_fmt(best.error_rate)}±{_fmt(best.std_error)}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qecenergy",
        description="Control-energy vs logical-error tradeoffs for small QEC codes.",
    )
    ap.add_argument("--version", action="version", version=f"qecenergy {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gates", help="catalog gate: energy bound, multiset, ideal matrix")
    g.add_argument("--gate", required=True)
    g.add_argument("--epsilon", type=float, required=True)
    g.set_defaults(fn=_cmd_gates)

    o = sub.add_parser("oracle", help="closed-form repetition failure rate / corrections")
    o.add_argument("--code", required=True, help="repN, e.g. rep3")
    o.add_argument("--px", type=float, required=True)
    o.set_defaults(fn=_cmd_oracle)

    s = sub.add_parser("sweep", help="run a Monte Carlo sweep; writes CSV + manifest")
    s.add_argument("--preset", choices=PRESET_NAMES)
    s.add_argument("--config", help="JSON config or manifest to rerun")
    s.add_argument("--out", help="CSV output path")
    s.add_argument("--manifest", help="manifest output path")
    s.add_argument("--shots", type=int)
    s.add_argument("--points", type=int, help="energy-grid points (presets only)")
    s.add_argument("--workers", type=int)
    s.add_argument("--seed", type=int, help="master seed (beats QEC_SEED and config)")
    s.add_argument("--head", type=int, default=0, help="echo the first N records")
    s.set_defaults(fn=_cmd_sweep)

    c = sub.add_parser("crossover", help="crossover energies + exponential fit from a sweep CSV")
    c.add_argument("--input", required=True)
    c.add_argument("--px", type=float, help="channel rate to analyze (default: smallest present)")
    c.set_defaults(fn=_cmd_crossover)

    f = sub.add_parser("ft-compare", help="FT vs non-FT energy ratios and error curves")
    f.add_argument("--v", type=int, required=True, help="validation rounds")
    f.add_argument("--shots", type=int, default=0, help="also run a fig9-style sweep")
    f.add_argument("--points", type=int, default=12)
    f.add_argument("--workers", type=int)
    f.add_argument("--out", help="CSV path for the sweep")
    f.add_argument("--seed", type=int)
    f.set_defaults(fn=_cmd_ft_compare)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SchemaViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
