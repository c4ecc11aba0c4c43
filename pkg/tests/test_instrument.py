import dataclasses
import random

import pytest

from seugrade.fixtures import shift_register_fixture
from seugrade.grading import (
    Fault,
    FaultClass,
    classify_oracle,
    fault_list,
    faulty_run,
    gen_random_fixture,
)
from seugrade.instrument import (
    FootprintParams,
    InstrumentedDesign,
    Technique,
    instrument,
    mask_scan_fault_window,
    mask_scan_schedule,
    memory_footprint,
    overhead_report,
    simulate_instrumented,
)
from seugrade.netlist import NetlistError, parse_netlist, serialize_netlist, validate
from seugrade.sim import golden_run

ALL_TECHNIQUES = ("mask-scan", "state-scan", "time-mux")


def test_overhead_gated(gated):
    c, _ = gated
    expected = {"mask-scan": (2, 6), "state-scan": (2, 4), "time-mux": (4, 13)}
    for tech, (ff, gates) in expected.items():
        rep = overhead_report(c, tech)
        assert rep.original_ff == 1
        assert rep.instrumented_ff == ff
        assert rep.added_gates == gates
        assert rep.ff_overhead_pct == pytest.approx(100.0 * (ff - 1) / 1)


def test_overhead_model_is_exact_per_flop_count():
    # closed-form 2F/2F/4F, checked against the actual transform output
    rng = random.Random(8)
    cases = [gen_random_fixture(
        seed=s,
        flops=rng.randint(1, 6),
        gates=rng.randint(2, 15),
        inputs=rng.randint(1, 3),
        outputs=rng.randint(1, 3),
        cycles=2,
    )[0] for s in range(8)]
    factor = {"mask-scan": 2, "state-scan": 2, "time-mux": 4}
    for c in cases:
        for tech in ALL_TECHNIQUES:
            rep = overhead_report(c, tech)
            d = instrument(c, tech)
            assert rep.instrumented_ff == factor[tech] * c.num_flops
            # the netlist carries instrument flops plus any auxiliary latches
            assert len(d.circuit.flops) == rep.instrumented_ff + len(d.aux_flops)
            assert rep.added_gates == len(d.circuit.gates) - len(c.gates)
            assert all(len(copies) == factor[tech] for copies in d.flop_map.values())


def test_overhead_at_215_flops():
    c, _ = shift_register_fixture(flops=215, cycles=4)
    got = {t: overhead_report(c, t) for t in ALL_TECHNIQUES}
    assert got["mask-scan"].instrumented_ff == 430
    assert got["state-scan"].instrumented_ff == 430
    assert got["time-mux"].instrumented_ff == 860
    # overhead percentages sit within 5 points of the synthesis-report values
    for tech, reference in (("mask-scan", 102), ("state-scan", 101), ("time-mux", 300)):
        assert abs(got[tech].ff_overhead_pct - reference) <= 5


def test_instrumented_netlists_are_valid_and_round_trip(sr2, gated):
    for c, _ in (sr2, gated):
        for tech in ALL_TECHNIQUES:
            d = instrument(c, tech)
            assert validate(d.circuit) == []
            assert parse_netlist(serialize_netlist(d.circuit)) == d.circuit


def test_control_ports(gated):
    c, _ = gated
    assert sorted(instrument(c, "mask-scan").control_ports) == [
        "inject",
        "mask_shift_enable",
        "mask_shift_in",
        "mask_shift_out",
        "reset",
    ]
    assert sorted(instrument(c, "state-scan").control_ports) == [
        "golden_feed",
        "scan_enable",
        "scan_in",
        "scan_out",
        "state_eq",
    ]
    d = instrument(c, "time-mux")
    assert sorted(d.control_ports) == [
        "checkpoint_save",
        "inject",
        "mask_shift_enable",
        "mask_shift_in",
        "mask_shift_out",
        "mismatch",
        "phase_select",
        "state_eq",
    ]
    for net in d.control_ports.values():
        if isinstance(net, str):
            assert net.startswith("__")


def test_reserved_names_rejected(gated):
    c, _ = gated
    once = instrument(c, "mask-scan")
    with pytest.raises(NetlistError) as exc:
        instrument(once.circuit, "mask-scan")
    assert "reserved name" in str(exc.value)
    renamed = dataclasses.replace(c, inputs=("__a", "b"))
    with pytest.raises(NetlistError):
        instrument(renamed, "state-scan")


def test_technique_coercion(gated):
    c, _ = gated
    d1 = instrument(c, Technique.MASK_SCAN)
    d2 = instrument(c, "mask-scan")
    assert isinstance(d1, InstrumentedDesign)
    assert d1.circuit == d2.circuit
    with pytest.raises(ValueError):
        instrument(c, "bit-flip-scan")


SCALE_PARAMS = FootprintParams(flops=215, inputs=32, outputs=54, cycles=160)


def test_footprint_pinned_bits():
    assert memory_footprint(SCALE_PARAMS, "mask-scan") == {
        "fpga_ram_bits": 13_760,
        "board_ram_bits": 34_400,
    }
    assert memory_footprint(SCALE_PARAMS, "state-scan") == {
        "fpga_ram_bits": 13_760,
        "board_ram_bits": 7_464_800,
    }
    wide = dataclasses.replace(SCALE_PARAMS, verdict_width=2)
    assert memory_footprint(wide, "time-mux") == {
        "fpga_ram_bits": 5_120,
        "board_ram_bits": 68_800,
    }


def test_footprint_monotone():
    base = FootprintParams(flops=10, inputs=4, outputs=3, cycles=20)
    for tech in ALL_TECHNIQUES:
        ref = memory_footprint(base, tech)
        for field in ("flops", "inputs", "outputs", "cycles", "verdict_width"):
            bumped = dataclasses.replace(base, **{field: getattr(base, field) + 1})
            got = memory_footprint(bumped, tech)
            assert got["fpga_ram_bits"] >= ref["fpga_ram_bits"]
            assert got["board_ram_bits"] >= ref["board_ram_bits"]


def test_footprint_param_validation():
    with pytest.raises(ValueError):
        FootprintParams(flops=-1, inputs=1, outputs=1, cycles=1)
    with pytest.raises(ValueError):
        FootprintParams(flops=1, inputs=1, outputs=1, cycles=1, verdict_width=3)
    FootprintParams(flops=0, inputs=0, outputs=0, cycles=0)  # degenerate but legal


def test_mask_scan_schedule_shape(gated):
    c, tb = gated
    d = instrument(c, "mask-scan")
    sched = mask_scan_schedule(d, tb, Fault(flop=0, cycle=2))
    # one-hot shift (flop+1 rows), one reset row, then the bench
    assert len(sched.vectors) == 1 + 1 + tb.num_cycles
    assert sched.run_start == 2
    assert all(len(row) == len(d.circuit.inputs) for row in sched.vectors)
    golden_sched = mask_scan_schedule(d, tb, None)
    assert len(golden_sched.vectors) == 1 + tb.num_cycles
    with pytest.raises(IndexError):
        mask_scan_schedule(d, tb, Fault(flop=7, cycle=0))


def test_structural_golden_replay(gated, sr2):
    for c, tb in (gated, sr2):
        d = instrument(c, "mask-scan")
        trace = golden_run(c, tb)
        window, final_state = mask_scan_fault_window(d, tb, None)
        assert window == list(trace.outputs)
        assert final_state == trace.states[-1]


def test_structural_gated_fault_sequences(gated):
    c, tb = gated
    d = instrument(c, "mask-scan")
    trace = golden_run(c, tb)
    window, _ = mask_scan_fault_window(d, tb, Fault(flop=0, cycle=0))
    assert [w[0] for w in window] == [1, 0, 0, 0]
    for fault in fault_list(c, tb):
        window, _ = mask_scan_fault_window(d, tb, fault)
        outs, _ = faulty_run(c, trace, tb, fault)
        assert window[: fault.cycle] == list(trace.outputs[: fault.cycle])
        assert window[fault.cycle :] == outs


def test_structural_first_divergence_matches_oracle(sr2):
    c, tb = sr2
    d = instrument(c, "mask-scan")
    trace = golden_run(c, tb)
    fault = Fault(flop=1, cycle=1)
    verdict = classify_oracle(c, trace, tb, fault)
    assert verdict.klass is FaultClass.FAILURE
    window, _ = mask_scan_fault_window(d, tb, fault)
    first = next(k for k, o in enumerate(window) if o != trace.outputs[k])
    assert first == verdict.at_cycle


def _structural_class(window, final_state, trace):
    mismatch = [k for k, o in enumerate(window) if o != trace.outputs[k]]
    if mismatch:
        return FaultClass.FAILURE, mismatch[0]
    if final_state == trace.states[-1]:
        return FaultClass.SILENT, None
    return FaultClass.LATENT, None


def test_structural_semantic_agreement_random():
    rng = random.Random(14)
    for seed in range(20):
        c, tb = gen_random_fixture(
            seed=seed,
            flops=rng.randint(1, 4),
            gates=rng.randint(2, 10),
            inputs=rng.randint(1, 3),
            outputs=rng.randint(1, 2),
            cycles=rng.randint(2, 6),
        )
        d = instrument(c, "mask-scan")
        trace = golden_run(c, tb)
        for fault in fault_list(c, tb):
            semantic = classify_oracle(c, trace, tb, fault)
            window, final_state = mask_scan_fault_window(d, tb, fault)
            klass, at = _structural_class(window, final_state, trace)
            assert klass is semantic.klass
            if klass is FaultClass.FAILURE:
                assert at == semantic.at_cycle


def test_simulate_instrumented_rejects_width_mismatch(gated):
    c, tb = gated
    d = instrument(c, "mask-scan")
    sched = mask_scan_schedule(d, tb, None)
    bad = dataclasses.replace(sched, vectors=((0, 0),))
    with pytest.raises(ValueError) as exc:
        simulate_instrumented(d, bad)
    assert "schedule/port mismatch" in str(exc.value)
