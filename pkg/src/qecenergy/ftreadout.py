"""Fault-tolerant stabilizer readout for repetition codes.

Each Z_k Z_{k+1} check is measured through a validated two-qubit cat state:
prepare (|00>+|11>)/sqrt(2) with H+CX, optionally validate it v times (two CX
onto a verification ancilla, parity must read 0, re-prepare on failure up to a
retry cap), couple the data pair into the cat with two data-controlled CX,
Z-measure both cat qubits and take the classical XOR as the syndrome bit.
Each data qubit touches only one cat qubit, so a single ancilla fault cannot
spread to two data qubits.

Per cat state the budget is 1 H + (1+2v) CX for preparation/validation plus
2 CX + 1 H for the measurement stage, i.e. (7+2v)/16 in pi^2/eps^2 units; the
budgeted measurement H is applied to the first cat qubit after its readout
(restoring the spent ancilla's basis): no working 2-CX gadget can place an H
before the measurements without erasing the parity record. Re-preparation on
failed validation is not budgeted, and by default N cat states are assembled
(the N-1 chain checks plus the redundant ring check Z_{N-1} Z_0, whose bit
the decoder ignores); cat_state_count = N-1 drops the ring check.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, ConditionalGate, Gate, Measure, ParityBit, RetryBlock
from .errors import InvalidArgumentError


@dataclass(frozen=True)
class FtConfig:
    validation_rounds: int = 1
    cat_state_count: int | None = None  # None resolves to N at build time
    retry_cap: int = 10

    def __post_init__(self):
        if self.validation_rounds < 0:
            raise InvalidArgumentError("validation_rounds must be >= 0")
        if self.retry_cap < 0:
            raise InvalidArgumentError("retry_cap must be >= 0")

    def cats(self, n: int) -> int:
        c = self.cat_state_count if self.cat_state_count is not None else n
        if c not in (n, n - 1):
            raise InvalidArgumentError(f"cat_state_count must be N or N-1, got {c}")
        return c


def build_cat_state_prep(v: int) -> Circuit:
    """Cat-state preparation fragment on qubits (0, 1) with verification
    ancilla 2: H + CX, then v validation rounds of two CX plus a parity
    measurement into clbit r (0 = valid). Tally: 1 H, (1+2v) CX."""
    if v < 0:
        raise InvalidArgumentError("validation rounds must be >= 0")
    c = Circuit(3 if v > 0 else 2, max(v, 1))
    c.gate("H", 0)
    c.gate("CX", 0, 1)
    for r in range(v):
        c.gate("CX", 0, 2)
        c.gate("CX", 1, 2)
        c.measure(2, r)
        if r < v - 1:
            c.cond_gate("X", (2,), (r,), 1)  # reset the verifier for the next round
    return c


def _ft_layout(n: int, cfg: FtConfig):
    cats = cfg.cats(n)
    v = cfg.validation_rounds
    qubits = {
        "num_qubits": n + 2 * cats + 1,
        "cat": [(n + 2 * k, n + 2 * k + 1) for k in range(cats)],
        "ver": n + 2 * cats,
    }
    clbits = {
        "synd": list(range(cats)),
        "read": list(range(cats, cats + n)),
        "raw": (cats + n, cats + n + 1),
        "val": list(range(cats + n + 2, cats + n + 2 + v)),
        "scratch": cats + n + 2 + v,
        "flag": cats + n + 3 + v,
        "num_clbits": cats + n + 4 + v,
    }
    return cats, v, qubits, clbits


def _reset(qubit: int, scratch: int):
    return [Measure(qubit, scratch), ConditionalGate("X", (qubit,), (scratch,), 1)]


def _cat_attempt_body(a: int, b: int, ver: int, val_bits, scratch: int):
    """One prepare-and-validate attempt; starts by resetting its qubits so the
    retry loop can rerun it verbatim."""
    body = []
    body += _reset(a, scratch)
    body += _reset(b, scratch)
    body += _reset(ver, scratch)
    body.append(Gate("H", (a,)))
    body.append(Gate("CX", (a, b)))
    for j, vb in enumerate(val_bits):
        body.append(Gate("CX", (a, ver)))
        body.append(Gate("CX", (b, ver)))
        body.append(Measure(ver, vb))
        if j < len(val_bits) - 1:
            body.append(ConditionalGate("X", (ver,), (vb,), 1))
    return tuple(body)


def build_ft_syndrome_extraction(n: int, cfg: FtConfig) -> Circuit:
    """Cat-state-coupled parity readout replacing the bare extraction.

    Gate tally beyond the cat preparations: 2 coupling CX plus 1 H per cat
    state (2N CX + N H at the default count)."""
    cats, v, q, cl = _ft_layout(n, cfg)
    c = Circuit(q["num_qubits"], cl["num_clbits"])
    raw_a, raw_b = cl["raw"]
    for k in range(cats):
        a, b = q["cat"][k]
        if v == 0:
            c.gate("H", a)
            c.gate("CX", a, b)
        else:
            c.append(
                RetryBlock(
                    body=_cat_attempt_body(a, b, q["ver"], cl["val"], cl["scratch"]),
                    fail_clbits=tuple(cl["val"]),
                    max_retries=cfg.retry_cap,
                    flag_clbit=cl["flag"],
                )
            )
        d1, d2 = k, (k + 1) % n  # k = n-1 is the redundant ring check
        c.gate("CX", d1, a)
        c.gate("CX", d2, b)
        c.measure(a, raw_a)
        c.measure(b, raw_b)
        c.append(ParityBit((raw_a, raw_b), cl["synd"][k]))
        c.gate("H", a)  # budgeted basis restore of the spent cat qubit
        c.measure(a, cl["scratch"])  # discard
    return c


def build_ft_protected_computation(
    n: int, cfg: FtConfig, variant: str = "direct", include_logical_x: bool = True
) -> Circuit:
    """Repetition pipeline with the syndrome extraction replaced by the
    fault-tolerant variant. Corrections decode the N-1 chain bits only."""
    if n < 3 or n % 2 == 0:
        raise InvalidArgumentError(f"repetition size must be odd >= 3, got {n}")
    from .codes import build_corrections, build_encoder, build_logical_x, get_code

    code = get_code(f"rep{n}:{variant}")
    cats, v, q, cl = _ft_layout(n, cfg)
    c = Circuit(q["num_qubits"], cl["num_clbits"])
    c.extend(build_encoder(code))
    for i in range(n):
        c.channel_x(i)
    if include_logical_x:
        c.extend(build_logical_x(code))
    c.extend(build_ft_syndrome_extraction(n, cfg))
    c.extend(build_corrections(code))
    read0 = cl["read"][0]
    for i in range(n):
        c.measure(i, read0 + i)
    c.set_readout(cl["read"], "majority")
    return c
