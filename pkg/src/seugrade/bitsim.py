"""Bit-parallel batch fault simulation.

Each net carries a Python int used as a bit plane: bit b is the value of the
net in fault machine b. Machine b of a batch [lo, hi) simulates fault lo+b of
the cycle-major fault list (fault index = cycle*F + flop). All machines see
the same stimuli; each gets exactly one bit flip, injected into its target
flop right before its injection cycle evaluates. Gate evaluation is plain
bitwise arithmetic on the planes, so one pass grades the whole batch.

Machines behave exactly like the golden circuit until their injection cycle:
same inputs, same deterministic transitions. That makes the golden trace the
reference for both the output compare and the state re-convergence check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .netlist import Circuit, cached_levelization
from .sim import GoldenTrace, Testbench

_Op = Callable[[list[int], int], None]


def _make_op(kind: str, ins: tuple[int, ...], out: int) -> _Op:
    # Two-input fast paths cover almost every gate; n-ary folds the rest.
    if kind in ("AND", "NAND", "OR", "NOR", "XOR", "XNOR") and len(ins) == 2:
        a, b = ins
        if kind == "AND":
            def op(v, m):
                v[out] = v[a] & v[b]
        elif kind == "NAND":
            def op(v, m):
                v[out] = m ^ (v[a] & v[b])
        elif kind == "OR":
            def op(v, m):
                v[out] = v[a] | v[b]
        elif kind == "NOR":
            def op(v, m):
                v[out] = m ^ (v[a] | v[b])
        elif kind == "XOR":
            def op(v, m):
                v[out] = v[a] ^ v[b]
        else:  # XNOR
            def op(v, m):
                v[out] = m ^ v[a] ^ v[b]
        return op
    if kind in ("AND", "NAND"):
        def op(v, m):
            acc = v[ins[0]]
            for s in ins[1:]:
                acc &= v[s]
            v[out] = acc if kind == "AND" else m ^ acc
        return op
    if kind in ("OR", "NOR"):
        def op(v, m):
            acc = v[ins[0]]
            for s in ins[1:]:
                acc |= v[s]
            v[out] = acc if kind == "OR" else m ^ acc
        return op
    if kind in ("XOR", "XNOR"):
        def op(v, m):
            acc = v[ins[0]]
            for s in ins[1:]:
                acc ^= v[s]
            v[out] = acc if kind == "XOR" else m ^ acc
        return op
    if kind == "NOT":
        (a,) = ins

        def op(v, m):
            v[out] = m ^ v[a]
        return op
    if kind == "BUF":
        (a,) = ins

        def op(v, m):
            v[out] = v[a]
        return op
    if kind == "MUX":
        s, a, b = ins

        def op(v, m):
            sel = v[s]
            v[out] = (v[a] & (sel ^ m)) | (v[b] & sel)
        return op
    if kind == "CONST0":
        def op(v, m):
            v[out] = 0
        return op
    if kind == "CONST1":
        def op(v, m):
            v[out] = m
        return op
    raise ValueError(f"unknown kind: {kind}")


@dataclass
class CompiledCircuit:
    """Slot-indexed gate program plus the port/flop slot maps."""

    circuit: Circuit
    n_slots: int
    input_slots: tuple[int, ...]
    output_slots: tuple[int, ...]
    flop_q_slots: tuple[int, ...]
    flop_d_slots: tuple[int, ...]
    _prog: tuple[_Op, ...]

    def eval(self, values: list[int], mask: int) -> None:
        for op in self._prog:
            op(values, mask)


def compile_circuit(circuit: Circuit) -> CompiledCircuit:
    order = cached_levelization(circuit)
    slot: dict[str, int] = {}
    for net in circuit.inputs:
        slot[net] = len(slot)
    for f in circuit.flops:
        slot[f.q] = len(slot)
    for g in circuit.gates:
        slot[g.out] = len(slot)
    by_id = {g.id: g for g in circuit.gates}
    prog = []
    for gid in order:
        g = by_id[gid]
        prog.append(_make_op(g.kind, tuple(slot[n] for n in g.ins), slot[g.out]))
    return CompiledCircuit(
        circuit=circuit,
        n_slots=len(slot),
        input_slots=tuple(slot[n] for n in circuit.inputs),
        output_slots=tuple(slot[n] for n in circuit.outputs),
        flop_q_slots=tuple(slot[f.q] for f in circuit.flops),
        flop_d_slots=tuple(slot[f.d] for f in circuit.flops),
        _prog=tuple(prog),
    )


def iter_bits(x: int):
    """Yield set-bit positions, ascending."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass
class BatchPassResult:
    """Per-machine observables of one batch pass over machines [lo, hi)."""

    lo: int
    hi: int
    first_fail: list[int | None]
    first_conv: list[int | None] | None
    final_eq: int | None  # bitmask: machine's final state == golden S_{N-1}


def batch_fault_pass(
    cc: CompiledCircuit,
    tb: Testbench,
    trace: GoldenTrace,
    lo: int,
    hi: int,
    track_convergence: bool,
    compare_final_state: bool,
) -> BatchPassResult:
    """Simulate fault machines [lo, hi) and collect the requested observables.

    first_fail[b]: earliest cycle with any output != golden, or None.
    first_conv[b]: earliest cycle m > injection cycle with full state equal to
    golden S_m (pre-edge compare, so m <= N-1), or None. Only tracked when
    requested; the final-state compare is the cheaper end-of-run variant some
    techniques use instead.
    """
    circuit = cc.circuit
    F = len(circuit.flops)
    N = tb.num_cycles
    width = hi - lo
    if width <= 0:
        return BatchPassResult(lo, hi, [], [] if track_convergence else None,
                               0 if compare_final_state else None)
    ones = (1 << width) - 1

    values = [0] * cc.n_slots
    state = [ones if f.init else 0 for f in circuit.flops]
    q_slots = cc.flop_q_slots
    d_slots = cc.flop_d_slots

    fail_events: list[tuple[int, int]] = []
    conv_events: list[tuple[int, int]] = []
    failed = 0
    conv_seen = 0

    for k in range(N):
        if track_convergence and k > 0:
            # Machines with injection cycle < k (fault index < k*F) are
            # eligible for re-convergence; compare pre-injection state.
            elig_end = min(hi, k * F)
            if elig_end > lo:
                elig = (1 << (elig_end - lo)) - 1
                pending = elig & ~conv_seen
                if pending:
                    golden = trace.states[k]
                    diff = 0
                    for i in range(F):
                        diff |= state[i] ^ (ones if golden[i] else 0)
                    new_conv = pending & ~diff & ones
                    if new_conv:
                        conv_events.append((k, new_conv))
                        conv_seen |= new_conv

        # Inject the faults scheduled for this cycle: fault k*F+i flips flop i.
        b0 = max(lo, k * F)
        b1 = min(hi, (k + 1) * F)
        for b in range(b0, b1):
            state[b - k * F] ^= 1 << (b - lo)

        vec = tb.vectors[k]
        for idx, s in enumerate(cc.input_slots):
            values[s] = ones if vec[idx] else 0
        for i in range(F):
            values[q_slots[i]] = state[i]
        cc.eval(values, ones)

        golden_out = trace.outputs[k]
        odiff = 0
        for j, s in enumerate(cc.output_slots):
            odiff |= values[s] ^ (ones if golden_out[j] else 0)
        new_fail = odiff & ~failed & ones
        if new_fail:
            fail_events.append((k, new_fail))
            failed |= new_fail

        if k < N - 1:
            for i in range(F):
                state[i] = values[d_slots[i]]

    first_fail: list[int | None] = [None] * width
    for k, mask in fail_events:
        for b in iter_bits(mask):
            first_fail[b] = k

    first_conv: list[int | None] | None = None
    if track_convergence:
        first_conv = [None] * width
        for k, mask in conv_events:
            for b in iter_bits(mask):
                first_conv[b] = k

    final_eq: int | None = None
    if compare_final_state:
        golden = trace.states[N - 1]
        diff = 0
        for i in range(F):
            diff |= state[i] ^ (ones if golden[i] else 0)
        final_eq = ~diff & ones

    return BatchPassResult(lo, hi, first_fail, first_conv, final_eq)
