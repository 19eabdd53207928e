"""Circuit IR and per-shot executor.

Instructions: catalog gates, stochastic X channel errors, mid-circuit Z
measurements into classical bits, classically conditioned gates, barriers,
plus two bookkeeping kinds used by the fault-tolerant readout (a classical
parity bit and a retry block for cat-state validation).

Execution is per shot on a dense statevector. By default the executor keeps
only the *live* qubits in the state: a qubit enters the register on first use
and is dropped again once it has been measured and is never referenced later
(the collapsed qubit factorizes exactly, so this changes nothing physically
while keeping rep9/FT pipelines small). ``compact=False`` runs the naive
full-width executor; both paths consume the random stream identically and are
compared shot-by-shot in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from . import _kernels
from .errors import ContractViolationError, InvalidArgumentError
from .statevector import MAX_QUBITS
from .gates import (
    EnergyBudget,
    NoiseModel,
    gate_catalog,
    gate_energy_bound,
    sample_noisy_scalars,
    sample_noisy_scalars_batch,
)


@dataclass(frozen=True, slots=True)
class Gate:
    name: str
    qubits: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class ChannelX:
    """Probabilistic perfect bit flip (error, not a controlled gate: no energy, no coefficient noise)."""

    qubit: int


@dataclass(frozen=True, slots=True)
class Measure:
    qubit: int
    clbit: int


@dataclass(frozen=True, slots=True)
class ConditionalGate:
    """Fires the (noisy) gate when the named clbits, read LSB-first, equal ``value``."""

    name: str
    qubits: tuple[int, ...]
    clbits: tuple[int, ...]
    value: int


@dataclass(frozen=True, slots=True)
class Barrier:
    label: str = ""


@dataclass(frozen=True, slots=True)
class ParityBit:
    """clbits[dest] = XOR of the source clbits. Classical bookkeeping only."""

    sources: tuple[int, ...]
    dest: int


@dataclass(frozen=True, slots=True)
class RetryBlock:
    """Run ``body``; if any fail clbit reads 1, rerun it (the body is
    responsible for resetting its qubits). After ``max_retries`` failed
    attempts, set ``flag_clbit`` and proceed. Body gates are budgeted once."""

    body: tuple["Instruction", ...]
    fail_clbits: tuple[int, ...]
    max_retries: int = 10
    flag_clbit: int = -1


Instruction = Union[Gate, ChannelX, Measure, ConditionalGate, Barrier, ParityBit, RetryBlock]


@dataclass
class ShotOutcome:
    classical_bits: tuple[int, ...]
    logical_bit: int
    final_expectation_z: float


def _iter_flat(instructions):
    for ins in instructions:
        if isinstance(ins, RetryBlock):
            yield from _iter_flat(ins.body)
        else:
            yield ins


def _instruction_qubits(ins) -> tuple[int, ...]:
    if isinstance(ins, Gate) or isinstance(ins, ConditionalGate):
        return ins.qubits
    if isinstance(ins, ChannelX):
        return (ins.qubit,)
    if isinstance(ins, Measure):
        return (ins.qubit,)
    if isinstance(ins, RetryBlock):
        out: list[int] = []
        for sub in _iter_flat(ins.body):
            out.extend(_instruction_qubits(sub))
        return tuple(dict.fromkeys(out))
    return ()


class Circuit:
    """Ordered instruction list over quantum and classical registers.

    ``readout_clbits``/``readout_mode`` designate how the logical bit is
    decoded from the classical register: ``"single"`` takes the one named bit,
    ``"majority"`` votes over them.
    """

    def __init__(self, num_qubits: int, num_clbits: int = 0):
        if num_qubits < 1:
            raise InvalidArgumentError("circuit needs at least one qubit")
        self.num_qubits = num_qubits
        self.num_clbits = num_clbits
        self.instructions: list[Instruction] = []
        self.readout_clbits: tuple[int, ...] = ()
        self.readout_mode: str = "single"
        self._last_use: dict[int, int] | None = None
        self._ideal_bit: int | None = None
        self._plan: list | None = None

    # ---------------------------------------------------------- construction

    def _invalidate(self):
        self._last_use = None
        self._ideal_bit = None
        self._plan = None

    def append(self, ins: Instruction) -> "Circuit":
        self._check(ins)
        self.instructions.append(ins)
        self._invalidate()
        return self

    def gate(self, name: str, *qubits: int) -> "Circuit":
        spec = gate_catalog(name)
        if spec.arity != len(qubits):
            raise InvalidArgumentError(f"{name} expects {spec.arity} qubits, got {len(qubits)}")
        return self.append(Gate(name, tuple(qubits)))

    def channel_x(self, qubit: int) -> "Circuit":
        return self.append(ChannelX(qubit))

    def measure(self, qubit: int, clbit: int) -> "Circuit":
        return self.append(Measure(qubit, clbit))

    def cond_gate(self, name: str, qubits, clbits, value: int) -> "Circuit":
        return self.append(ConditionalGate(name, tuple(qubits), tuple(clbits), value))

    def barrier(self, label: str = "") -> "Circuit":
        return self.append(Barrier(label))

    def extend(self, other: "Circuit") -> "Circuit":
        """Append another circuit's instructions (registers must fit)."""
        if other.num_qubits > self.num_qubits or other.num_clbits > self.num_clbits:
            raise InvalidArgumentError("fragment does not fit in target registers")
        for ins in other.instructions:
            self.append(ins)
        return self

    def set_readout(self, clbits, mode: str = "single") -> "Circuit":
        clbits = tuple(clbits)
        if mode not in {"single", "majority"}:
            raise InvalidArgumentError(f"unknown readout mode {mode!r}")
        if mode == "single" and len(clbits) != 1:
            raise InvalidArgumentError("single readout takes exactly one clbit")
        for c in clbits:
            self._check_clbit(c)
        self.readout_clbits = clbits
        self.readout_mode = mode
        return self

    def _check_clbit(self, c: int):
        if not 0 <= c < self.num_clbits:
            raise InvalidArgumentError(f"clbit {c} out of range ({self.num_clbits} bits)")

    def _check(self, ins: Instruction):
        for q in _instruction_qubits(ins):
            if not 0 <= q < self.num_qubits:
                raise InvalidArgumentError(f"qubit {q} out of range ({self.num_qubits} qubits)")
        if isinstance(ins, (Gate, ConditionalGate)):
            spec = gate_catalog(ins.name)
            if spec.arity != len(ins.qubits):
                raise InvalidArgumentError(f"{ins.name} expects {spec.arity} qubits")
            if len(set(ins.qubits)) != len(ins.qubits):
                raise InvalidArgumentError(f"duplicate qubits in {ins}")
        if isinstance(ins, Measure):
            self._check_clbit(ins.clbit)
        if isinstance(ins, ConditionalGate):
            for c in ins.clbits:
                self._check_clbit(c)
        if isinstance(ins, ParityBit):
            for c in (*ins.sources, ins.dest):
                self._check_clbit(c)
        if isinstance(ins, RetryBlock):
            for sub in ins.body:
                self._check(sub)
            for c in ins.fail_clbits:
                self._check_clbit(c)
            if ins.flag_clbit >= 0:
                self._check_clbit(ins.flag_clbit)

    # -------------------------------------------------------------- analysis

    def last_use(self) -> dict[int, int]:
        """Index of the last top-level instruction referencing each qubit."""
        if self._last_use is None:
            table: dict[int, int] = {}
            for i, ins in enumerate(self.instructions):
                for q in _instruction_qubits(ins):
                    table[q] = i
            self._last_use = table
        return self._last_use

    def plan(self) -> "_Plan":
        """Compiled execution plan (cached; circuits are immutable once built)."""
        if self._plan is None:
            self._plan = _compile_plan(self.instructions, self.last_use())
        return self._plan

    def gate_tally(self) -> dict[str, int]:
        """Unconditional gate counts (retry bodies counted once)."""
        tally: dict[str, int] = {}
        for ins in _iter_flat(self.instructions):
            if isinstance(ins, Gate):
                tally[ins.name] = tally.get(ins.name, 0) + 1
        return tally

    def energy_coefficient(self) -> Fraction:
        """Exact total energy coefficient in pi^2/eps^2 units.

        Channel errors, measurements, and conditional (correction) gates cost
        nothing; only deliberate unconditional gates are budgeted.
        """
        total = Fraction(0)
        for name, count in self.gate_tally().items():
            total += count * gate_catalog(name).energy_coefficient
        return total

    def dump(self) -> str:
        """Stable, human-readable listing (one instruction per line)."""
        lines = [f"circuit qubits={self.num_qubits} clbits={self.num_clbits}"]

        def emit(instructions, indent):
            pad = "  " * indent
            for ins in instructions:
                if isinstance(ins, Gate):
                    lines.append(f"{pad}{ins.name} " + " ".join(f"q{q}" for q in ins.qubits))
                elif isinstance(ins, ChannelX):
                    lines.append(f"{pad}channelX q{ins.qubit}")
                elif isinstance(ins, Measure):
                    lines.append(f"{pad}measure q{ins.qubit} -> c{ins.clbit}")
                elif isinstance(ins, ConditionalGate):
                    bits = " ".join(f"c{c}" for c in ins.clbits)
                    qs = " ".join(f"q{q}" for q in ins.qubits)
                    lines.append(f"{pad}cond({bits} == {ins.value}) {ins.name} {qs}")
                elif isinstance(ins, Barrier):
                    lines.append(f"{pad}barrier {ins.label}".rstrip())
                elif isinstance(ins, ParityBit):
                    srcs = " ".join(f"c{c}" for c in ins.sources)
                    lines.append(f"{pad}parity {srcs} -> c{ins.dest}")
                elif isinstance(ins, RetryBlock):
                    fails = " ".join(f"c{c}" for c in ins.fail_clbits)
                    flag = f" flag=c{ins.flag_clbit}" if ins.flag_clbit >= 0 else ""
                    lines.append(f"{pad}retry(max={ins.max_retries} fail=[{fails}]{flag}) {{")
                    emit(ins.body, indent + 1)
                    lines.append(f"{pad}}}")
        emit(self.instructions, 1)
        return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ executor
#
# Circuits compile once into a flat plan:
#  * runs of ConditionalGate sharing the same condition bits (the correction
#    tables, ~800 instructions for rep9) collapse into one value->gates
#    dispatch node;
#  * static gates are grouped by name so each shot draws and exponentiates
#    their coefficient noise in a few vectorized batches;
#  * channel flips and top-level measurements take their uniforms from one
#    pre-drawn block.
# Per-shot stream consumption: one standard-normal batch per gate group (in
# group creation order, skipped entirely at eps=0), one uniform block, then
# on-demand draws for fired conditionals and retry-block attempts. The order
# is fixed by the compiled plan, so results depend only on (circuit, noise,
# stream seed).

_OP_GATE = 0
_OP_MEASURE = 1
_OP_CHANNEL = 2
_OP_COND = 3
_OP_PARITY = 4
_OP_RETRY = 5


class _Plan:
    __slots__ = ("nodes", "groups", "n_uniform")

    def __init__(self, nodes, groups, n_uniform):
        self.nodes = nodes
        self.groups = groups  # list of (GateSpec, count)
        self.n_uniform = n_uniform


def _tail_start(instructions) -> int:
    """First index of the trailing measurement-only segment (no drops needed there)."""
    i = len(instructions)
    while i > 0 and isinstance(instructions[i - 1], (Measure, ParityBit, Barrier)):
        i -= 1
    return i


class _PlanBuilder:
    def __init__(self):
        self.group_of: dict[str, int] = {}
        self.groups: list[list] = []  # [spec, count]
        self.n_uniform = 0

    def gate_slot(self, spec):
        gidx = self.group_of.get(spec.name)
        if gidx is None:
            gidx = len(self.groups)
            self.group_of[spec.name] = gidx
            self.groups.append([spec, 0])
        row = self.groups[gidx][1]
        self.groups[gidx][1] += 1
        return gidx, row

    def uniform_slot(self):
        u = self.n_uniform
        self.n_uniform += 1
        return u

    def compile(self, instructions, last_use, top_level):
        nodes = []
        i = 0
        n = len(instructions)
        tail = _tail_start(instructions) if top_level else n
        while i < n:
            ins = instructions[i]
            kind = type(ins)
            if kind is Gate:
                spec = gate_catalog(ins.name)
                if top_level:
                    gidx, row = self.gate_slot(spec)
                else:
                    gidx, row = -1, -1  # retry bodies rerun: draw on demand
                nodes.append((_OP_GATE, spec, ins.qubits, gidx, row))
                i += 1
            elif kind is Measure:
                drop = top_level and i < tail and last_use.get(ins.qubit, -1) <= i
                uoff = self.uniform_slot() if top_level else -1
                nodes.append((_OP_MEASURE, ins.qubit, ins.clbit, drop, uoff))
                i += 1
            elif kind is ChannelX:
                uoff = self.uniform_slot() if top_level else -1
                nodes.append((_OP_CHANNEL, ins.qubit, uoff))
                i += 1
            elif kind is ConditionalGate:
                clbits = ins.clbits
                table: dict[int, list] = {}
                j = i
                while (
                    j < n
                    and type(instructions[j]) is ConditionalGate
                    and instructions[j].clbits == clbits
                ):
                    cg = instructions[j]
                    table.setdefault(cg.value, []).append((gate_catalog(cg.name), cg.qubits))
                    j += 1
                nodes.append((_OP_COND, clbits, table))
                i = j
            elif kind is ParityBit:
                nodes.append((_OP_PARITY, ins.sources, ins.dest))
                i += 1
            elif kind is Barrier:
                i += 1
            elif kind is RetryBlock:
                body_nodes = self.compile(ins.body, {}, False)
                dropq = ()
                if top_level:
                    dropq = tuple(
                        q for q in _instruction_qubits(ins) if last_use.get(q, -1) <= i
                    )
                nodes.append(
                    (_OP_RETRY, body_nodes, ins.fail_clbits, ins.max_retries, ins.flag_clbit, dropq)
                )
                i += 1
            else:  # pragma: no cover
                raise InvalidArgumentError(f"unknown instruction {ins!r}")
        return nodes


def _compile_plan(instructions, last_use) -> _Plan:
    builder = _PlanBuilder()
    nodes = builder.compile(instructions, last_use, True)
    groups = [(spec, count) for spec, count in builder.groups]
    return _Plan(nodes, groups, builder.n_uniform)


class _LiveState:
    """Dense amplitudes over the currently live qubits (axis 0 = MSB)."""

    __slots__ = ("amps", "axis_of", "order", "compact")

    def __init__(self, num_qubits: int, compact: bool):
        self.compact = compact
        if compact:
            self.amps = np.array([1.0 + 0.0j])
            self.axis_of: dict[int, int] = {}
            self.order: list[int] = []
        else:
            if num_qubits > MAX_QUBITS:
                raise InvalidArgumentError(
                    f"full-width execution is capped at {MAX_QUBITS} qubits"
                )
            self.amps = np.zeros(1 << num_qubits, dtype=np.complex128)
            self.amps[0] = 1.0
            self.axis_of = {q: q for q in range(num_qubits)}
            self.order = list(range(num_qubits))

    def ensure(self, qubit: int):
        if qubit in self.axis_of:
            return
        old = self.amps
        new = np.zeros(2 * old.shape[0], dtype=np.complex128)
        new[0::2] = old
        self.amps = new
        self.axis_of[qubit] = len(self.order)
        self.order.append(qubit)

    def stride(self, qubit: int) -> int:
        return 1 << (len(self.order) - 1 - self.axis_of[qubit])

    def drop(self, qubit: int, outcome: int):
        """Remove a collapsed qubit (its other branch is exactly zero)."""
        axis = self.axis_of.pop(qubit)
        stride = 1 << (len(self.order) - 1 - axis)
        v = self.amps.reshape(-1, 2, stride)
        self.amps = np.ascontiguousarray(v[:, outcome, :]).reshape(-1)
        self.order.pop(axis)
        for q, a in self.axis_of.items():
            if a > axis:
                self.axis_of[q] = a - 1


class _ShotCtx:
    __slots__ = ("state", "clbits", "eps", "p_x", "rng", "gscal", "uni")

    def __init__(self, plan, num_qubits, num_clbits, noise, rng, compact):
        self.state = _LiveState(num_qubits, compact)
        self.clbits = bytearray(num_clbits)
        self.eps = noise.epsilon
        self.p_x = noise.p_x
        self.rng = rng
        if self.eps > 0.0 and plan.groups:
            self.gscal = [
                sample_noisy_scalars_batch(spec, self.eps, count, rng)
                for spec, count in plan.groups
            ]
        else:
            self.gscal = None
        self.uni = rng.random(plan.n_uniform) if plan.n_uniform else None

    def uniform(self, uoff: int) -> float:
        if uoff >= 0 and self.uni is not None:
            return self.uni[uoff]
        return self.rng.random()


def _apply_gate(ctx: _ShotCtx, spec, qubits, gidx, row):
    state = ctx.state
    for q in qubits:
        state.ensure(q)
    if ctx.eps == 0.0:
        s = spec._ideal_scalars
    elif gidx >= 0 and ctx.gscal is not None:
        s = ctx.gscal[gidx][row]
    else:
        s = sample_noisy_scalars(spec, ctx.eps, ctx.rng)
    if spec.arity == 1:
        _kernels.apply_1q(state.amps, s[0], s[1], s[2], s[3], state.stride(qubits[0]))
    else:
        _kernels.apply_ctrl(
            state.amps,
            s[0], s[1], s[2], s[3], s[4], s[5], s[6], s[7],
            state.stride(qubits[0]),
            state.stride(qubits[1]),
        )


def _exec_nodes(nodes, ctx: _ShotCtx):
    state = ctx.state
    clbits = ctx.clbits
    for node in nodes:
        op = node[0]
        if op == _OP_GATE:
            _apply_gate(ctx, node[1], node[2], node[3], node[4])
        elif op == _OP_MEASURE:
            _, qubit, clbit, drop, uoff = node
            state.ensure(qubit)
            stride = state.stride(qubit)
            p1 = _kernels.prob_one(state.amps, stride)
            p1 = min(max(p1, 0.0), 1.0)
            outcome = 1 if ctx.uniform(uoff) < p1 else 0
            p = p1 if outcome else 1.0 - p1
            if p < 1e-300:
                raise ContractViolationError("zero-probability measurement branch")
            _kernels.collapse(state.amps, stride, outcome, 1.0 / math.sqrt(p))
            clbits[clbit] = outcome
            if drop and state.compact:
                state.drop(qubit, outcome)
        elif op == _OP_CHANNEL:
            _, qubit, uoff = node
            if ctx.uniform(uoff) < ctx.p_x:
                state.ensure(qubit)
                _kernels.apply_1q(
                    state.amps, 0.0j, 1.0 + 0.0j, 1.0 + 0.0j, 0.0j, state.stride(qubit)
                )
        elif op == _OP_COND:
            _, cond_clbits, table = node
            value = 0
            for k, c in enumerate(cond_clbits):
                value |= clbits[c] << k
            fired = table.get(value)
            if fired:
                for spec, qubits in fired:
                    _apply_gate(ctx, spec, qubits, -1, -1)
        elif op == _OP_PARITY:
            _, sources, dest = node
            parity = 0
            for c in sources:
                parity ^= clbits[c]
            clbits[dest] = parity
        else:  # _OP_RETRY
            _, body_nodes, fail_clbits, max_retries, flag_clbit, dropq = node
            for _attempt in range(max_retries + 1):
                _exec_nodes(body_nodes, ctx)
                if not any(clbits[c] for c in fail_clbits):
                    break
            else:
                if flag_clbit >= 0:
                    clbits[flag_clbit] = 1
            if state.compact:
                for q in dropq:
                    if q in state.axis_of:
                        _drop_if_collapsed(state, q)


def _drop_if_collapsed(state: _LiveState, qubit: int):
    # Safe only for qubits the body left collapsed (they end on a measurement).
    stride = state.stride(qubit)
    p1 = _kernels.prob_one(state.amps, stride)
    if p1 < 1e-12:
        state.drop(qubit, 0)
    elif p1 > 1.0 - 1e-12:
        state.drop(qubit, 1)


def _decode_logical(circuit: Circuit, clbits) -> int:
    bits = circuit.readout_clbits
    if not bits:
        return clbits[0] if circuit.num_clbits else 0
    if circuit.readout_mode == "majority":
        return 1 if 2 * sum(clbits[c] for c in bits) > len(bits) else 0
    return clbits[bits[0]]


def execute_shot(
    circuit: Circuit,
    noise: NoiseModel,
    rng: np.random.Generator,
    *,
    compact: bool = True,
) -> ShotOutcome:
    """Run one shot: fresh coefficient noise per gate instance, Bernoulli
    channel flips, Born-rule measurements, conditional corrections."""
    plan = circuit.plan()
    ctx = _ShotCtx(plan, circuit.num_qubits, circuit.num_clbits, noise, rng, compact)
    _exec_nodes(plan.nodes, ctx)
    logical = _decode_logical(circuit, ctx.clbits)
    return ShotOutcome(tuple(ctx.clbits), logical, 1.0 - 2.0 * logical)


def final_state(circuit: Circuit, noise: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    """Full-width statevector after executing the circuit (test/debug helper)."""
    plan = circuit.plan()
    ctx = _ShotCtx(plan, circuit.num_qubits, circuit.num_clbits, noise, rng, False)
    _exec_nodes(plan.nodes, ctx)
    return ctx.state.amps


def circuit_energy(circuit: Circuit, epsilon: float) -> EnergyBudget:
    """Sum of per-gate lower bounds over unconditional gates (hbar*omega0)."""
    total = EnergyBudget(0.0)
    for name, count in circuit.gate_tally().items():
        total = total + EnergyBudget(count * gate_energy_bound(gate_catalog(name), epsilon).value)
    return total


_NOISELESS = NoiseModel(0.0, 0.0)


def ideal_outcome(circuit: Circuit, _seeds=(0, 1, 2, 3)) -> int:
    """Logical bit of the error-free computation (eps=0, p_x=0).

    Individual ancilla measurements may be genuinely random even without noise
    (e.g. raw cat-state bits, whose parity alone is deterministic), so
    determinism is asserted on the logical bit across several fixed streams.
    """
    if circuit._ideal_bit is None:
        outcomes = {
            execute_shot(circuit, _NOISELESS, np.random.default_rng(s)).logical_bit
            for s in _seeds
        }
        if len(outcomes) != 1:
            raise ContractViolationError("ideal outcome is nondeterministic (malformed pipeline)")
        circuit._ideal_bit = outcomes.pop()
    return circuit._ideal_bit
