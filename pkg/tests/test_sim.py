import random

import pytest

from seugrade.grading import gen_random_fixture
from seugrade.netlist import levelize
from seugrade.sim import (
    GoldenTrace,
    Testbench,
    flip_bit,
    format_stimuli_csv,
    golden_run,
    parse_stimuli_csv,
    step,
    trace_from_doc,
    trace_to_doc,
)


def test_step_pinned_values(sr2, gated):
    cg, _ = gated
    assert step(cg, (1,), (0, 1)) == ((1,), (0,))
    assert step(cg, (0,), (0, 0)) == ((0,), (0,))
    ca, _ = sr2
    assert step(ca, (1, 0), (0,)) == ((0,), (0, 1))


def test_step_width_mismatch(gated):
    c, _ = gated
    with pytest.raises(ValueError):
        step(c, (1,), (0,))
    with pytest.raises(ValueError):
        step(c, (1, 0), (0, 1))


def test_golden_run_gated(gated):
    c, tb = gated
    trace = golden_run(c, tb)
    assert trace.states == ((0,), (0,), (0,), (0,))
    assert trace.outputs == ((0,), (0,), (0,), (0,))


def test_golden_run_sr2(sr2):
    c, tb = sr2
    trace = golden_run(c, tb)
    assert trace.states == ((0, 0), (1, 0), (0, 1), (0, 0))
    assert trace.outputs == ((0,), (0,), (1,), (0,))


def test_golden_run_single_cycle(gated):
    c, _ = gated
    trace = golden_run(c, Testbench(vectors=((1, 1),)))
    assert trace.states == ((0,),)
    assert trace.outputs == ((0,),)


def test_golden_run_consumes_exactly_n_vectors():
    for seed in range(5):
        c, tb = gen_random_fixture(
            seed=seed, flops=3, gates=8, inputs=2, outputs=2, cycles=7
        )
        trace = golden_run(c, tb)
        assert len(trace.states) == tb.num_cycles
        assert len(trace.outputs) == tb.num_cycles
        # last state is final: one more edge would disagree with the trace tail
        order = levelize(c)
        for k in range(tb.num_cycles - 1):
            _, nxt = step(c, trace.states[k], tb.vectors[k], order)
            assert nxt == trace.states[k + 1]


def test_flip_bit():
    assert flip_bit((0, 0), 1) == (0, 1)
    assert flip_bit((1,), 0) == (0,)
    s = (1, 0, 1, 1)
    assert flip_bit(flip_bit(s, 2), 2) == s
    for i in range(4):
        flipped = flip_bit(s, i)
        assert sum(flipped) in (sum(s) - 1, sum(s) + 1)
        assert sum(a != b for a, b in zip(s, flipped)) == 1
    with pytest.raises(IndexError):
        flip_bit((0, 0), 2)
    with pytest.raises(IndexError):
        flip_bit((0, 0), -1)


def test_determinism_from_shared_state():
    rng = random.Random(4)
    for seed in range(100):
        c, tb = gen_random_fixture(
            seed=seed,
            flops=rng.randint(1, 6),
            gates=rng.randint(2, 12),
            inputs=rng.randint(1, 4),
            outputs=rng.randint(1, 3),
            cycles=rng.randint(2, 8),
        )
        trace = golden_run(c, tb)
        k = rng.randrange(tb.num_cycles)
        order = levelize(c)
        state = trace.states[k]
        for m in range(k, tb.num_cycles):
            out, nxt = step(c, state, tb.vectors[m], order)
            assert out == trace.outputs[m]
            if m < tb.num_cycles - 1:
                state = nxt
                assert state == trace.states[m + 1]


def test_stimuli_csv_round_trip(sr2, gated):
    for c, tb in (sr2, gated):
        text = format_stimuli_csv(tb, c)
        assert parse_stimuli_csv(text, c) == tb
    c, tb = gated
    assert format_stimuli_csv(tb, c).splitlines()[0] == "a,b"


def test_stimuli_csv_errors(gated):
    c, _ = gated
    with pytest.raises(ValueError) as exc:
        parse_stimuli_csv("a,b\n0,1,1\n", c)
    assert "line 2 has 3 columns, expected 2" in str(exc.value)
    with pytest.raises(ValueError):
        parse_stimuli_csv("b,a\n0,1\n", c)  # header must match input order
    with pytest.raises(ValueError):
        parse_stimuli_csv("a,b\n0,2\n", c)  # cells are 0/1 only
    with pytest.raises(ValueError):
        parse_stimuli_csv("a,b\n", c)  # empty bench


def test_trace_doc_round_trip(sr2):
    c, tb = sr2
    trace = golden_run(c, tb)
    doc = trace_to_doc(trace)
    assert set(doc) == {"states", "outputs"}
    assert trace_from_doc(doc) == trace
    assert trace_from_doc(doc) == GoldenTrace(
        states=trace.states, outputs=trace.outputs
    )


def test_testbench_invariants():
    tb = Testbench(vectors=((0, 1), (1, 1)))
    assert tb.num_cycles == 2
    assert tb.width == 2
