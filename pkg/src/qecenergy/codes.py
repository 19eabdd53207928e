"""Code definitions and circuit builders.

Families: N-qubit repetition (waterfall/direct/parallel encoders), the
[[5,1,3]] perfect code (three encoder variants), and the [[7,1,3]] Steane
code. Each code supplies stabilizers, a syndrome->correction table built by
exhaustive single-error enumeration, a transversal logical X, and a readout
(majority vote for repetition, inverse-encode + measure qubit 0 otherwise).

Register layout of a protected computation:
  qubits: data 0..n-1, then one syndrome ancilla per stabilizer
  clbits: syndrome bits 0..m-1, then the readout bits
Fault-tolerant repetition variants extend this; see ftreadout.

The registry resolves string ids like ``rep7:waterfall``, ``perfect5:b``,
``steane7``, ``bare``, and ``rep3:direct:ft(v=1)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache

from .circuit import Circuit
from .errors import InvalidArgumentError

MAX_REPETITION = 15

_PRODUCT = {
    ("X", "X"): "I", ("Y", "Y"): "I", ("Z", "Z"): "I",
}


def _anticommutes(a: str, b: str) -> bool:
    return a != "I" and b != "I" and a != b


def pauli_strings_commute(a: str, b: str) -> bool:
    """Whether two Pauli strings of equal length commute."""
    if len(a) != len(b):
        raise InvalidArgumentError("Pauli strings must have equal length")
    return sum(_anticommutes(x, y) for x, y in zip(a, b)) % 2 == 0


def syndrome_of_error(stabilizers, qubit: int, pauli: str) -> int:
    """Syndrome integer (bit i = anticommutes with stabilizer i) of a
    single-qubit Pauli error."""
    value = 0
    for i, stab in enumerate(stabilizers):
        if _anticommutes(stab[qubit], pauli):
            value |= 1 << i
    return value


@dataclass(frozen=True, eq=False)
class CodeSpec:
    code_id: str
    family: str  # "bare" | "repetition" | "perfect5" | "steane7"
    n_data: int
    encoder_variant: str
    stabilizers: tuple[str, ...]
    logical_x: str
    correction_table: dict = field(repr=False)
    ft: "object | None" = None  # FtConfig for fault-tolerant repetition readout

    @property
    def n_stabilizers(self) -> int:
        return len(self.stabilizers)


# --------------------------------------------------------------- decoders


def _repetition_table(n: int) -> dict[int, tuple]:
    """Map every syndrome to the minority-consistent X corrections.

    Syndrome bit k is the parity between data qubits k and k+1; with N odd the
    flip set and its complement have different weights, and decoding the
    lighter one corrects up to (N-1)/2 flips.
    """
    table: dict[int, tuple] = {}
    for synd in range(1 << (n - 1)):
        flips = [0]
        for k in range(n - 1):
            flips.append(flips[-1] ^ ((synd >> k) & 1))
        if sum(flips) * 2 > n:
            flips = [1 - f for f in flips]
        corr = tuple((q, "X") for q, f in enumerate(flips) if f)
        table[synd] = corr
    return table


def _single_error_table(stabilizers, paulis=("X", "Y", "Z")) -> dict[int, tuple]:
    n = len(stabilizers[0])
    table: dict[int, tuple] = {0: ()}
    for q in range(n):
        for p in paulis:
            synd = syndrome_of_error(stabilizers, q, p)
            if synd == 0:
                continue
            table.setdefault(synd, ((q, p),))
    return table


def correction_for_syndrome(code: CodeSpec, syndrome) -> tuple[tuple, bool]:
    """Corrections for a measured syndrome bit vector.

    Returns (corrections, uncorrectable): unknown multi-error signatures get
    the identity correction plus the flag; no nearest-error guessing.
    """
    bits = tuple(syndrome)
    if len(bits) != code.n_stabilizers:
        raise InvalidArgumentError(
            f"syndrome length {len(bits)} != {code.n_stabilizers} stabilizers"
        )
    value = 0
    for i, b in enumerate(bits):
        value |= (1 if b else 0) << i
    corr = code.correction_table.get(value)
    if corr is None:
        return (), True
    return corr, False


# --------------------------------------------------------------- code specs


def _repetition_spec(n: int, variant: str, code_id: str, ft=None) -> CodeSpec:
    stabs = tuple(
        "".join("Z" if q in (k, k + 1) else "I" for q in range(n)) for k in range(n - 1)
    )
    return CodeSpec(
        code_id=code_id,
        family="repetition",
        n_data=n,
        encoder_variant=variant,
        stabilizers=stabs,
        logical_x="X" * n,
        correction_table=_repetition_table(n),
        ft=ft,
    )


_PERFECT5_STABILIZERS = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")

# Steane code from the [7,4,3] Hamming construction, wires permuted so the
# encoder input sits on data qubit 0 (X- and Z-type checks share supports).
_STEANE_SUPPORTS = ((0, 3, 4, 6), (0, 1, 5, 6), (2, 4, 5, 6))
_STEANE_PIVOTS = (3, 1, 2)


def _support_string(support, letter, n=7) -> str:
    return "".join(letter if q in support else "I" for q in range(n))


_STEANE_STABILIZERS = tuple(
    _support_string(s, "X") for s in _STEANE_SUPPORTS
) + tuple(_support_string(s, "Z") for s in _STEANE_SUPPORTS)


def _perfect5_spec(variant: str, code_id: str) -> CodeSpec:
    return CodeSpec(
        code_id=code_id,
        family="perfect5",
        n_data=5,
        encoder_variant=variant,
        stabilizers=_PERFECT5_STABILIZERS,
        logical_x="XXXXX",
        correction_table=_single_error_table(_PERFECT5_STABILIZERS),
    )


def _steane_spec(code_id: str) -> CodeSpec:
    return CodeSpec(
        code_id=code_id,
        family="steane7",
        n_data=7,
        encoder_variant="standard",
        stabilizers=_STEANE_STABILIZERS,
        logical_x="XXXXXXX",
        correction_table=_single_error_table(_STEANE_STABILIZERS),
    )


def _bare_spec() -> CodeSpec:
    return CodeSpec(
        code_id="bare",
        family="bare",
        n_data=1,
        encoder_variant="",
        stabilizers=(),
        logical_x="X",
        correction_table={},
    )


# ----------------------------------------------------------------- registry

_REP_VARIANTS = ("waterfall", "direct", "parallel")
_P5_VARIANTS = ("a", "b", "c")
_FT_RE = re.compile(r"^ft\(v=(\d+)(?:,cats=(\d+))?\)$")

REGISTRY_VERSION = "1"


@lru_cache(maxsize=None)
def get_code(code_id: str) -> CodeSpec:
    """Resolve a registry id ("rep3:direct", "perfect5:a", "steane7", "bare",
    "rep3:direct:ft(v=1)") to its CodeSpec."""
    parts = code_id.split(":")
    head = parts[0]
    if head == "bare":
        if len(parts) > 1:
            raise InvalidArgumentError(f"bare takes no variant: {code_id!r}")
        return _bare_spec()
    if head.startswith("rep"):
        try:
            n = int(head[3:])
        except ValueError:
            raise InvalidArgumentError(f"bad repetition id {code_id!r}") from None
        if n < 3 or n % 2 == 0 or n > MAX_REPETITION:
            raise InvalidArgumentError(
                f"repetition size must be odd, 3 <= N <= {MAX_REPETITION}; got {n}"
            )
        variant = "direct"
        ft = None
        rest = parts[1:]
        if rest and rest[0] in _REP_VARIANTS:
            variant = rest[0]
            rest = rest[1:]
        if rest:
            m = _FT_RE.match(rest[0])
            if m is None or len(rest) > 1:
                raise InvalidArgumentError(f"bad code id suffix {code_id!r}")
            from .ftreadout import FtConfig

            cats = int(m.group(2)) if m.group(2) else n
            if cats not in (n, n - 1):
                raise InvalidArgumentError(f"cat_state_count must be N or N-1, got {cats}")
            ft = FtConfig(validation_rounds=int(m.group(1)), cat_state_count=cats)
        canonical = f"rep{n}:{variant}" + (
            f":ft(v={ft.validation_rounds}"
            + (f",cats={ft.cat_state_count}" if ft.cat_state_count != n else "")
            + ")"
            if ft
            else ""
        )
        return _repetition_spec(n, variant, canonical, ft)
    if head == "perfect5":
        variant = parts[1] if len(parts) > 1 else "a"
        if variant not in _P5_VARIANTS or len(parts) > 2:
            raise InvalidArgumentError(f"perfect5 variants are a|b|c; got {code_id!r}")
        return _perfect5_spec(variant, f"perfect5:{variant}")
    if head == "steane7":
        if len(parts) > 2 or (len(parts) == 2 and parts[1] != "standard"):
            raise InvalidArgumentError(f"steane7 has only the standard variant: {code_id!r}")
        return _steane_spec("steane7")
    raise InvalidArgumentError(f"unknown code id {code_id!r}")


# ----------------------------------------------------------------- builders


def _layout(code: CodeSpec) -> tuple[int, int, int, int]:
    """(num_qubits, num_clbits, first syndrome clbit, first readout clbit)."""
    m = code.n_stabilizers
    if code.family == "bare":
        return 1, 1, 0, 0
    if code.family == "repetition":
        return code.n_data + m, m + code.n_data, 0, m
    return code.n_data + m, m + 1, 0, m


def build_encoder(code: CodeSpec) -> Circuit:
    """Encoder fragment over the data register: |x>|0...0> -> logical |x>."""
    n = code.n_data
    c = Circuit(max(n, 1))
    if code.family == "bare":
        return c
    if code.family == "repetition":
        variant = code.encoder_variant
        if variant == "waterfall":
            for i in range(n - 1):
                c.gate("CX", i, i + 1)
        elif variant == "direct":
            for i in range(1, n):
                c.gate("CX", 0, i)
        elif variant == "parallel":
            have = 1
            slice_no = 0
            while have < n:
                for j in range(min(have, n - have)):
                    c.gate("CX", j, have + j)
                have += min(have, n - have)
                slice_no += 1
                if have < n:
                    c.barrier(f"slice-{slice_no}")
            return c
        else:  # pragma: no cover
            raise InvalidArgumentError(f"unknown repetition variant {variant!r}")
        return c
    if code.family == "perfect5":
        return _perfect5_encoder(code.encoder_variant)
    return _steane_encoder()


def _perfect5_encoder(variant: str) -> Circuit:
    c = Circuit(5)
    if variant == "a":
        # published-style circuit; input on qubit 0
        c.gate("Z", 0)
        for q in (1, 2, 3, 4):
            c.gate("H", q)
        for q in (4, 3, 2, 1):
            c.gate("CX", q, 0)
        for pair in ((0, 4), (1, 2), (3, 4), (0, 1), (2, 3)):
            c.gate("CZ", *pair)
    elif variant == "b":
        # variant a conjugated by the code's reflection automorphism
        # (0)(1 4)(2 3); same stabilizer group, different gate sequence
        s = {0: 0, 1: 4, 2: 3, 3: 2, 4: 1}
        c.gate("Z", 0)
        for q in (1, 2, 3, 4):
            c.gate("H", s[q])
        for q in (4, 3, 2, 1):
            c.gate("CX", s[q], 0)
        for pair in ((0, 4), (1, 2), (3, 4), (0, 1), (2, 3)):
            c.gate("CZ", s[pair[0]], s[pair[1]])
    else:
        # variant a with the CX fan-in rewritten through CX = H.CZ.H
        c.gate("Z", 0)
        for q in (1, 2, 3, 4):
            c.gate("H", q)
        c.gate("H", 0)
        for q in (4, 3, 2, 1):
            c.gate("CZ", q, 0)
        c.gate("H", 0)
        for pair in ((0, 4), (1, 2), (3, 4), (0, 1), (2, 3)):
            c.gate("CZ", *pair)
    return c


def _steane_encoder() -> Circuit:
    """CSS standard-form encoder: 3 H + 11 CX, input on data qubit 0."""
    c = Circuit(7)
    c.gate("CX", 0, 4)
    c.gate("CX", 0, 5)
    for pivot, support in zip(_STEANE_PIVOTS, _STEANE_SUPPORTS):
        c.gate("H", pivot)
        for j in support:
            if j != pivot:
                c.gate("CX", pivot, j)
    return c


def build_logical_x(code: CodeSpec) -> Circuit:
    """Transversal logical X fragment (one X per data qubit)."""
    c = Circuit(code.n_data)
    for q in range(code.n_data):
        c.gate("X", q)
    return c


def build_syndrome_extraction(code: CodeSpec) -> Circuit:
    """One round of stabilizer measurements into the syndrome clbits.

    Repetition codes use the cheap form (two data-controlled CX per Z_k Z_k+1
    check, direct ancilla measurement: 2(N-1) CX, no H). The general codes use
    phase kickback: ancilla in |+>, one controlled-Pauli per non-identity
    factor, closing H, measurement.
    """
    num_qubits, num_clbits, synd0, _ = _layout(code)
    c = Circuit(num_qubits, num_clbits)
    n = code.n_data
    if code.family == "bare":
        return c
    if code.family == "repetition":
        for k in range(n - 1):
            anc = n + k
            c.gate("CX", k, anc)
            c.gate("CX", k + 1, anc)
            c.measure(anc, synd0 + k)
        return c
    for k, stab in enumerate(code.stabilizers):
        anc = n + k
        c.gate("H", anc)
        for q, p in enumerate(stab):
            if p != "I":
                c.gate("C" + p, anc, q)
        c.gate("H", anc)
        c.measure(anc, synd0 + k)
    return c


def build_corrections(code: CodeSpec) -> Circuit:
    """Classically conditioned corrections, one conditional gate per single-
    qubit Pauli of each decodable syndrome."""
    num_qubits, num_clbits, synd0, _ = _layout(code)
    c = Circuit(num_qubits, num_clbits)
    synd_bits = tuple(range(synd0, synd0 + code.n_stabilizers))
    for value in sorted(code.correction_table):
        if value == 0:
            continue
        for q, p in code.correction_table[value]:
            c.cond_gate(p, (q,), synd_bits, value)
    return c


def build_readout(code: CodeSpec) -> Circuit:
    """Readout fragment; sets the circuit's logical-bit decoding.

    Repetition: measure all data qubits, majority vote. Perfect5/Steane7: run
    the encoder backwards and measure data qubit 0.
    """
    num_qubits, num_clbits, _, read0 = _layout(code)
    c = Circuit(num_qubits, num_clbits)
    if code.family in ("bare", "repetition"):
        for q in range(code.n_data):
            c.measure(q, read0 + q)
        if code.family == "bare":
            c.set_readout([read0])
        else:
            c.set_readout(range(read0, read0 + code.n_data), "majority")
        return c
    enc = build_encoder(code)
    # catalog encoders use only self-inverse gates (H, CX, CZ, Z)
    for ins in reversed(enc.instructions):
        c.append(ins)
    c.measure(0, read0)
    c.set_readout([read0])
    return c


def build_protected_computation(code: CodeSpec, include_logical_x: bool = True) -> Circuit:
    """Full pipeline: encode -> channel on data -> logical X -> syndrome
    extraction -> conditional corrections -> readout. Ancillas see no channel
    noise."""
    if code.ft is not None:
        from .ftreadout import build_ft_protected_computation

        return build_ft_protected_computation(
            code.n_data, code.ft, variant=code.encoder_variant, include_logical_x=include_logical_x
        )
    num_qubits, num_clbits, _, _ = _layout(code)
    c = Circuit(num_qubits, num_clbits)
    c.extend(build_encoder(code))
    for q in range(code.n_data):
        c.channel_x(q)
    if include_logical_x:
        c.extend(build_logical_x(code))
    c.extend(build_syndrome_extraction(code))
    c.extend(build_corrections(code))
    readout = build_readout(code)
    c.extend(readout)
    c.set_readout(readout.readout_clbits, readout.readout_mode)
    return c


@lru_cache(maxsize=None)
def pipeline(code_id: str, include_logical_x: bool = True) -> Circuit:
    """Memoized protected-computation circuit for a registry id."""
    return build_protected_computation(get_code(code_id), include_logical_x)
