"""Structural flop instrumentation, area overhead, and RAM footprint models.

Each technique replaces every flip-flop with a small instrument built from the
same gate vocabulary, so instrumented netlists re-enter the toolchain as
ordinary circuits. Added nets and ids carry the reserved "__" prefix; control
ports are new primary inputs/outputs named "__ctl_*".

Per-flop instrument shapes (and the flop counts they pin):

MASK_SCAN  functional flop + mask flop (2F). Mask flops chain into a shift
           register; the mask ANDed with the inject strobe XORs into the
           state path. A reset port re-arms the functional state between
           replays (gating gate on D per flop).
STATE_SCAN functional flop with a scan mux on D + golden-shadow flop (2F).
           The shadow is fed per-flop golden bits; an XNOR-per-flop AND
           reduction exposes full-state equality for online silent detection.
TIME_MUX   golden, faulty, mask, checkpoint flops (4F) with phase muxing of
           the shared combinational network, plus one golden-output latch per
           primary output so the mismatch compare is realizable in-netlist
           (latches are reported separately, not in the per-flop count).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .netlist import Circuit, Flop, Gate, NetlistError, validate
from .sim import GoldenTrace, State, Testbench, golden_run, step
from .grading import Fault


class Technique(str, Enum):
    MASK_SCAN = "mask-scan"
    STATE_SCAN = "state-scan"
    TIME_MUX = "time-mux"


@dataclass
class InstrumentedDesign:
    circuit: Circuit
    technique: Technique
    control_ports: dict
    flop_map: dict[str, tuple[str, ...]]
    aux_flops: tuple[str, ...] = ()
    source: Circuit | None = None


@dataclass
class OverheadReport:
    original_ff: int
    instrumented_ff: int
    added_gates: int
    ff_overhead_pct: float


@dataclass(frozen=True)
class FootprintParams:
    flops: int
    inputs: int
    outputs: int
    cycles: int
    verdict_width: int = 1

    def __post_init__(self):
        for name in ("flops", "inputs", "outputs", "cycles"):
            if getattr(self, name) < 0:
                raise ValueError(f"footprint: {name} must be >= 0")
        if self.verdict_width not in (1, 2):
            raise ValueError("footprint: verdict_width must be 1 or 2")


def _check_reserved(circuit: Circuit) -> None:
    names = list(circuit.inputs) + list(circuit.outputs)
    for g in circuit.gates:
        names += [g.id, g.out, *g.ins]
    for f in circuit.flops:
        names += [f.id, f.d, f.q]
    for name in names:
        if name.startswith("__"):
            raise NetlistError(f"reserved name: {name} (instrumented already?)")


def _finish(circuit: Circuit) -> Circuit:
    problems = validate(circuit)
    if problems:  # transform bug, not caller error
        raise AssertionError(f"instrumented circuit invalid: {problems}")
    return circuit


def _instrument_mask_scan(c: Circuit) -> InstrumentedDesign:
    inputs = list(c.inputs) + ["__ctl_reset", "__ctl_mask_si", "__ctl_mask_se",
                               "__ctl_inject"]
    outputs = list(c.outputs)
    gates = list(c.gates)
    flops: list[Flop] = []
    flop_map: dict[str, tuple[str, ...]] = {}

    if c.flops:
        gates.append(Gate("__rst_n_gate", "NOT", ("__ctl_reset",), "__rst_n"))

    prev_mq = "__ctl_mask_si"
    for f in c.flops:
        rd = f"__{f.id}_rd"
        if f.init == 0:
            gates.append(Gate(f"__{f.id}_rstg", "AND", ("__rst_n", f.d), rd))
        else:
            gates.append(Gate(f"__{f.id}_rstg", "OR", ("__ctl_reset", f.d), rd))
        qraw = f"__{f.id}_qr"
        flops.append(Flop(f.id, d=rd, q=qraw, init=f.init))

        mq, md = f"__{f.id}_mq", f"__{f.id}_md"
        gates.append(Gate(f"__{f.id}_shmux", "MUX", ("__ctl_mask_se", mq, prev_mq), md))
        flops.append(Flop(f"__{f.id}_m", d=md, q=mq, init=0))
        prev_mq = mq

        inj = f"__{f.id}_inj"
        gates.append(Gate(f"__{f.id}_injand", "AND", (mq, "__ctl_inject"), inj))
        # drives the original q net, so every consumer sees the flippable state
        gates.append(Gate(f"__{f.id}_injxor", "XOR", (qraw, inj), f.q))
        flop_map[f.id] = (f.id, f"__{f.id}_m")

    ports = {
        "reset": "__ctl_reset",
        "mask_shift_in": "__ctl_mask_si",
        "mask_shift_enable": "__ctl_mask_se",
        "inject": "__ctl_inject",
    }
    if c.flops:
        gates.append(Gate("__ctl_mask_so_buf", "BUF", (prev_mq,), "__ctl_mask_so"))
        outputs.append("__ctl_mask_so")
        ports["mask_shift_out"] = "__ctl_mask_so"

    circuit = Circuit(f"{c.name}__mask_scan", tuple(inputs), tuple(outputs),
                      tuple(gates), tuple(flops))
    return InstrumentedDesign(_finish(circuit), Technique.MASK_SCAN, ports,
                              flop_map, (), c)


def _instrument_state_scan(c: Circuit) -> InstrumentedDesign:
    inputs = list(c.inputs) + ["__ctl_scan_si", "__ctl_scan_en"]
    gold_feed = []
    for f in c.flops:
        gold_feed.append(f"__ctl_gold_{f.id}")
    inputs += gold_feed
    outputs = list(c.outputs)
    gates = list(c.gates)
    flops: list[Flop] = []
    flop_map: dict[str, tuple[str, ...]] = {}

    eq_nets = []
    prev_q = "__ctl_scan_si"
    for f in c.flops:
        sd = f"__{f.id}_sd"
        gates.append(Gate(f"__{f.id}_scmux", "MUX", ("__ctl_scan_en", f.d, prev_q), sd))
        flops.append(Flop(f.id, d=sd, q=f.q, init=f.init))
        prev_q = f.q

        gq = f"__{f.id}_gq"
        flops.append(Flop(f"__{f.id}_sh", d=f"__ctl_gold_{f.id}", q=gq, init=f.init))
        eqn = f"__{f.id}_eqn"
        gates.append(Gate(f"__{f.id}_eq", "XNOR", (f.q, gq), eqn))
        eq_nets.append(eqn)
        flop_map[f.id] = (f.id, f"__{f.id}_sh")

    ports = {
        "scan_in": "__ctl_scan_si",
        "scan_enable": "__ctl_scan_en",
        "golden_feed": gold_feed,
    }
    if c.flops:
        gates.append(Gate("__ctl_scan_so_buf", "BUF", (prev_q,), "__ctl_scan_so"))
        outputs.append("__ctl_scan_so")
        ports["scan_out"] = "__ctl_scan_so"
    if len(eq_nets) >= 2:
        gates.append(Gate("__ctl_state_eq_and", "AND", tuple(eq_nets),
                          "__ctl_state_eq"))
    elif len(eq_nets) == 1:
        gates.append(Gate("__ctl_state_eq_buf", "BUF", (eq_nets[0],),
                          "__ctl_state_eq"))
    else:  # empty state: vacuously equal
        gates.append(Gate("__ctl_state_eq_c1", "CONST1", (), "__ctl_state_eq"))
    outputs.append("__ctl_state_eq")
    ports["state_eq"] = "__ctl_state_eq"

    circuit = Circuit(f"{c.name}__state_scan", tuple(inputs), tuple(outputs),
                      tuple(gates), tuple(flops))
    return InstrumentedDesign(_finish(circuit), Technique.STATE_SCAN, ports,
                              flop_map, (), c)


def _instrument_time_mux(c: Circuit) -> InstrumentedDesign:
    inputs = list(c.inputs) + ["__ctl_phase", "__ctl_inject", "__ctl_mask_si",
                               "__ctl_mask_se", "__ctl_ckpt_save"]
    outputs = list(c.outputs)
    gates = list(c.gates)
    flops: list[Flop] = []
    flop_map: dict[str, tuple[str, ...]] = {}

    eq_nets = []
    prev_mq = "__ctl_mask_si"
    for f in c.flops:
        gq, fq = f"__{f.id}_gq", f"__{f.id}_fq"
        mq, cq = f"__{f.id}_mq", f"__{f.id}_cq"

        # phase 0 = golden half, phase 1 = faulty half of an emulated cycle
        gates.append(Gate(f"__{f.id}_qmux", "MUX", ("__ctl_phase", gq, fq), f.q))
        gates.append(Gate(f"__{f.id}_gmux", "MUX", ("__ctl_phase", f.d, gq),
                          f"__{f.id}_gd"))
        flops.append(Flop(f"__{f.id}_g", d=f"__{f.id}_gd", q=gq, init=f.init))

        gates.append(Gate(f"__{f.id}_injx", "XOR", (cq, mq), f"__{f.id}_inj"))
        gates.append(Gate(f"__{f.id}_fmux", "MUX", ("__ctl_phase", fq, f.d),
                          f"__{f.id}_frun"))
        gates.append(Gate(f"__{f.id}_imux", "MUX",
                          ("__ctl_inject", f"__{f.id}_frun", f"__{f.id}_inj"),
                          f"__{f.id}_fd"))
        flops.append(Flop(f"__{f.id}_f", d=f"__{f.id}_fd", q=fq, init=f.init))

        gates.append(Gate(f"__{f.id}_mmux", "MUX", ("__ctl_mask_se", mq, prev_mq),
                          f"__{f.id}_md"))
        flops.append(Flop(f"__{f.id}_m", d=f"__{f.id}_md", q=mq, init=0))
        prev_mq = mq

        gates.append(Gate(f"__{f.id}_cmux", "MUX", ("__ctl_ckpt_save", cq, gq),
                          f"__{f.id}_cd"))
        flops.append(Flop(f"__{f.id}_c", d=f"__{f.id}_cd", q=cq, init=f.init))

        eqn = f"__{f.id}_eqn"
        gates.append(Gate(f"__{f.id}_eq", "XNOR", (gq, fq), eqn))
        eq_nets.append(eqn)
        flop_map[f.id] = (f"__{f.id}_g", f"__{f.id}_f", f"__{f.id}_m", f"__{f.id}_c")

    # golden-output latches: capture Y during the golden half, compare during
    # the faulty half. Real flops in the netlist, excluded from the per-flop
    # instrument count (see overhead_report).
    aux = []
    mm_nets = []
    for idx, net in enumerate(c.outputs):
        lq, ld = f"__outl{idx}_lq", f"__outl{idx}_ld"
        gates.append(Gate(f"__outl{idx}_mux", "MUX", ("__ctl_phase", net, lq), ld))
        flops.append(Flop(f"__outl{idx}", d=ld, q=lq, init=0))
        aux.append(f"__outl{idx}")
        mm = f"__outmm{idx}"
        gates.append(Gate(f"__outmm{idx}_x", "XOR", (net, lq), mm))
        mm_nets.append(mm)

    ports = {
        "phase_select": "__ctl_phase",
        "inject": "__ctl_inject",
        "mask_shift_in": "__ctl_mask_si",
        "mask_shift_enable": "__ctl_mask_se",
        "checkpoint_save": "__ctl_ckpt_save",
    }
    if c.flops:
        gates.append(Gate("__ctl_mask_so_buf", "BUF", (prev_mq,), "__ctl_mask_so"))
        outputs.append("__ctl_mask_so")
        ports["mask_shift_out"] = "__ctl_mask_so"
    if len(eq_nets) >= 2:
        gates.append(Gate("__ctl_state_eq_and", "AND", tuple(eq_nets),
                          "__ctl_state_eq"))
    elif len(eq_nets) == 1:
        gates.append(Gate("__ctl_state_eq_buf", "BUF", (eq_nets[0],),
                          "__ctl_state_eq"))
    else:
        gates.append(Gate("__ctl_state_eq_c1", "CONST1", (), "__ctl_state_eq"))
    outputs.append("__ctl_state_eq")
    ports["state_eq"] = "__ctl_state_eq"
    if len(mm_nets) >= 2:
        gates.append(Gate("__ctl_mismatch_or", "OR", tuple(mm_nets),
                          "__ctl_mismatch"))
    elif len(mm_nets) == 1:
        gates.append(Gate("__ctl_mismatch_buf", "BUF", (mm_nets[0],),
                          "__ctl_mismatch"))
    else:
        gates.append(Gate("__ctl_mismatch_c0", "CONST0", (), "__ctl_mismatch"))
    outputs.append("__ctl_mismatch")
    ports["mismatch"] = "__ctl_mismatch"

    circuit = Circuit(f"{c.name}__time_mux", tuple(inputs), tuple(outputs),
                      tuple(gates), tuple(flops))
    return InstrumentedDesign(_finish(circuit), Technique.TIME_MUX, ports,
                              flop_map, tuple(aux), c)


def instrument(c: Circuit, technique: Technique | str) -> InstrumentedDesign:
    """Replace every flop with the technique's instrument."""
    technique = Technique(technique)
    problems = validate(c)
    if problems:
        from .netlist import NetlistValidationError

        raise NetlistValidationError(problems)
    _check_reserved(c)
    if technique == Technique.MASK_SCAN:
        return _instrument_mask_scan(c)
    if technique == Technique.STATE_SCAN:
        return _instrument_state_scan(c)
    return _instrument_time_mux(c)


def overhead_report(c: Circuit, technique: Technique | str) -> OverheadReport:
    """Flop/gate deltas of the actual transform (aux latches excluded)."""
    design = instrument(c, technique)
    original_ff = c.num_flops
    instrumented_ff = sum(len(copies) for copies in design.flop_map.values())
    added_gates = len(design.circuit.gates) - len(c.gates)
    if original_ff == 0:
        pct = 0.0
    else:
        pct = 100.0 * (instrumented_ff - original_ff) / original_ff
    return OverheadReport(original_ff, instrumented_ff, added_gates, pct)


def memory_footprint(params: FootprintParams, technique: Technique | str) -> dict:
    """Controller RAM bits: on-FPGA stimuli/reference store and board-side
    result store. TIME_MUX computes golden outputs live, so only stimuli sit
    on chip; STATE_SCAN banks one full faulty state per fault plus the golden
    per-cycle states."""
    technique = Technique(technique)
    F, I, O = params.flops, params.inputs, params.outputs
    N, w = params.cycles, params.verdict_width
    if technique == Technique.TIME_MUX:
        fpga = N * I
        board = F * N * w
    elif technique == Technique.MASK_SCAN:
        fpga = N * (I + O)
        board = F * N * w
    else:
        fpga = N * (I + O)
        board = F * N * (F + 1 + w)
    return {"fpga_ram_bits": fpga, "board_ram_bits": board}


@dataclass(frozen=True)
class Schedule:
    """Full input vectors (original + control columns) plus the index of the
    first bench cycle within the replay."""

    vectors: tuple[tuple[int, ...], ...]
    run_start: int


def mask_scan_schedule(
    design: InstrumentedDesign, tb: Testbench, fault: Fault | None
) -> Schedule:
    """Controller schedule for one mask-scan replay.

    Shift the one-hot mask to the target flop (flop+1 cycles), pulse reset for
    one cycle, then play the bench with the inject strobe high exactly at the
    fault's cycle. fault=None replays with an all-zero mask (golden)."""
    if design.technique != Technique.MASK_SCAN:
        raise ValueError("schedule: not a mask-scan design")
    src = design.source
    if src is None:
        raise ValueError("schedule: design lacks its source circuit")
    if fault is not None and not 0 <= fault.flop < src.num_flops:
        raise IndexError(f"flop index {fault.flop} out of range")
    idle = tuple(0 for _ in src.inputs)
    rows: list[tuple[int, ...]] = []
    # control columns: reset, mask_si, mask_se, inject (input order)
    if fault is not None:
        for t in range(fault.flop + 1):
            rows.append(idle + (0, 1 if t == 0 else 0, 1, 0))
    rows.append(idle + (1, 0, 0, 0))
    for k, vec in enumerate(tb.vectors):
        inject = 1 if fault is not None and k == fault.cycle else 0
        rows.append(tuple(vec) + (0, 0, 0, inject))
    return Schedule(vectors=tuple(rows), run_start=len(rows) - tb.num_cycles)


def simulate_instrumented(
    design: InstrumentedDesign, schedule: Schedule
) -> GoldenTrace:
    """Plain cycle simulation of the instrumented netlist under a schedule.

    Returns the full trace (all instrumented flops and outputs); callers slice
    the original output columns / functional flop rows they care about."""
    circuit = design.circuit
    width = len(circuit.inputs)
    for row in schedule.vectors:
        if len(row) != width:
            raise ValueError(
                f"schedule/port mismatch: row width {len(row)} != {width} inputs"
            )
    return golden_run(circuit, Testbench(vectors=schedule.vectors))


def mask_scan_fault_window(
    design: InstrumentedDesign, tb: Testbench, fault: Fault | None
) -> tuple[list[tuple[int, ...]], State]:
    """Original-output sequence over the bench window plus the final
    functional state, from a structural mask-scan replay."""
    src = design.source
    schedule = mask_scan_schedule(design, tb, fault)
    trace = simulate_instrumented(design, schedule)
    n_out = src.num_outputs
    start = schedule.run_start
    window = [out[:n_out] for out in trace.outputs[start:start + tb.num_cycles]]
    # Final state is read off the q nets, not the stored bits: an injection at
    # the last cycle lives in the inject XOR, exactly like the semantic model.
    from .netlist import cached_levelization, eval_comb

    last = start + tb.num_cycles - 1
    order = cached_levelization(design.circuit)
    values, _ = eval_comb(
        design.circuit, order, schedule.vectors[last], trace.states[last]
    )
    final_functional = tuple(values[f.q] for f in src.flops)
    return window, final_functional
