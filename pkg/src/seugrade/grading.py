"""Fault model and classification.

A fault is one transient bit flip: flop `flop` is inverted at the start of
cycle `cycle`, i.e. the machine evaluates cycle `cycle` from S_cycle with that
one bit flipped, then runs free to the end of the bench. Classes:

FAILURE  some primary output differs from the golden run at a cycle in
         [cycle, N-1]; at_cycle = earliest such cycle.
SILENT   no output ever differs and the full state re-converges to the golden
         state at some m in (cycle, N-1]; at_cycle = earliest such m.
LATENT   no output ever differs and the state still differs at the end;
         at_cycle = N-1.

FAILURE wins over SILENT when both occur (a corrupted output is a failure even
if the state later heals). With N == 1 there is no cycle after injection, so
SILENT is impossible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .netlist import Circuit, Flop, Gate, cached_levelization, validate
from .sim import GoldenTrace, State, Testbench, flip_bit, step


class FaultClass(str, Enum):
    FAILURE = "FAILURE"
    LATENT = "LATENT"
    SILENT = "SILENT"


@dataclass(frozen=True)
class Fault:
    flop: int
    cycle: int


@dataclass(frozen=True)
class Verdict:
    klass: FaultClass
    at_cycle: int


def fault_list(circuit: Circuit, tb: Testbench) -> list[Fault]:
    """Exhaustive single-flip list, cycle-major: (cycle asc, flop asc)."""
    F = circuit.num_flops
    return [Fault(flop=i, cycle=j) for j in range(tb.num_cycles) for i in range(F)]


def classify_oracle(
    circuit: Circuit, trace: GoldenTrace, tb: Testbench, fault: Fault
) -> Verdict:
    """Reference classification by direct resimulation of one fault.

    Deliberately brute force: runs every remaining cycle, records the earliest
    output mismatch and the earliest full re-convergence, then applies the
    class priority. No early exit, no shortcuts; this is the definition the
    batch engines are measured against.
    """
    N = tb.num_cycles
    if not 0 <= fault.flop < circuit.num_flops:
        raise IndexError(f"flop index {fault.flop} out of range")
    if not 0 <= fault.cycle < N:
        raise IndexError(f"cycle {fault.cycle} out of range for {N}-cycle bench")
    order = cached_levelization(circuit)
    state = flip_bit(trace.states[fault.cycle], fault.flop)
    first_fail: int | None = None
    first_conv: int | None = None
    for k in range(fault.cycle, N):
        outputs, nxt = step(circuit, state, tb.vectors[k], order)
        if first_fail is None and outputs != trace.outputs[k]:
            first_fail = k
        if k < N - 1:
            state = nxt
            if first_conv is None and state == trace.states[k + 1]:
                first_conv = k + 1
    if first_fail is not None:
        return Verdict(FaultClass.FAILURE, first_fail)
    if first_conv is not None:
        return Verdict(FaultClass.SILENT, first_conv)
    return Verdict(FaultClass.LATENT, N - 1)


def faulty_run(
    circuit: Circuit, trace: GoldenTrace, tb: Testbench, fault: Fault
) -> tuple[list[tuple[int, ...]], list[State]]:
    """Full faulty resimulation: (outputs, pre-edge states) for cycles
    fault.cycle .. N-1. For invariant checks, not grading."""
    order = cached_levelization(circuit)
    state = flip_bit(trace.states[fault.cycle], fault.flop)
    outputs = []
    states = []
    for k in range(fault.cycle, tb.num_cycles):
        states.append(state)
        out, nxt = step(circuit, state, tb.vectors[k], order)
        outputs.append(out)
        state = nxt
    return outputs, states


_GATE_KIND_WEIGHTS = [
    ("AND", 16),
    ("OR", 16),
    ("XOR", 14),
    ("NAND", 8),
    ("NOR", 8),
    ("XNOR", 6),
    ("NOT", 8),
    ("BUF", 4),
    ("MUX", 8),
    ("CONST0", 1),
    ("CONST1", 1),
]


def gen_random_fixture(
    seed: int,
    flops: int,
    gates: int,
    inputs: int,
    outputs: int,
    cycles: int,
) -> tuple[Circuit, Testbench]:
    """Deterministic random circuit plus stimuli for property tests.

    Structure is biased toward observable, state-mixing logic: gate inputs
    draw from everything driven so far, flop Ds mostly come from gate nets,
    and outputs sit on the deeper gate nets when there are enough. Same seed
    and shape always yields the identical fixture.
    """
    if inputs < 1 or cycles < 1 or flops < 0 or gates < 0 or outputs < 1:
        raise ValueError("fixture shape: need inputs>=1, outputs>=1, cycles>=1")
    rng = random.Random(seed)

    input_nets = [f"in{i}" for i in range(inputs)]
    q_nets = [f"q{i}" for i in range(flops)]
    pool = input_nets + q_nets

    kinds = [k for k, _ in _GATE_KIND_WEIGHTS]
    weights = [w for _, w in _GATE_KIND_WEIGHTS]

    gate_list: list[Gate] = []
    gate_nets: list[str] = []
    for gi in range(gates):
        kind = rng.choices(kinds, weights=weights, k=1)[0]
        if kind in ("NOT", "BUF"):
            arity = 1
        elif kind == "MUX":
            arity = 3
        elif kind in ("CONST0", "CONST1"):
            arity = 0
        else:
            arity = 3 if rng.random() < 0.15 else 2
        ins = tuple(rng.choice(pool) for _ in range(arity))
        out = f"n{gi}"
        gate_list.append(Gate(id=f"g{gi}", kind=kind, ins=ins, out=out))
        pool.append(out)
        gate_nets.append(out)

    flop_list: list[Flop] = []
    for fi in range(flops):
        r = rng.random()
        if r < 0.50 and gate_nets:
            d = rng.choice(gate_nets)
        elif r < 0.70:
            d = rng.choice(input_nets)
        elif r < 0.85 and flops > 1:
            d = q_nets[rng.randrange(flops)]
        else:
            d = q_nets[fi]  # hold register: a natural LATENT source
        flop_list.append(Flop(id=f"f{fi}", d=d, q=q_nets[fi], init=rng.randint(0, 1)))

    # Outputs prefer the deeper half of the gate nets (they mix more state).
    candidates = gate_nets[len(gate_nets) // 3:] if gate_nets else []
    if len(candidates) < outputs:
        extra = [n for n in pool if n not in candidates]
        rng.shuffle(extra)
        candidates = candidates + extra
    if len(candidates) < outputs:
        raise ValueError("fixture shape: not enough nets for requested outputs")
    out_nets = rng.sample(candidates, outputs)

    circuit = Circuit(
        name=f"rand{seed}",
        inputs=tuple(input_nets),
        outputs=tuple(out_nets),
        gates=tuple(gate_list),
        flops=tuple(flop_list),
    )
    problems = validate(circuit)
    if problems:  # generator bug, not caller error
        raise AssertionError(f"generated invalid circuit: {problems}")

    vectors = tuple(
        tuple(rng.randint(0, 1) for _ in range(inputs)) for _ in range(cycles)
    )
    return circuit, Testbench(vectors=vectors)
