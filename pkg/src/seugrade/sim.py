"""Clocked simulation and golden traces.

Timing convention, used everywhere in this package: at cycle k the testbench
vector k is applied, the combinational network settles, outputs Y_k are
sampled, and then the clock edge loads the flop D values as state S_{k+1}.
There is no edge after the last cycle: S_{N-1} is the final state of an
N-cycle run.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .netlist import Circuit, cached_levelization, eval_comb

State = tuple[int, ...]


@dataclass(frozen=True)
class Testbench:
    """Per-cycle input vectors, one tuple per cycle, circuit input order."""

    vectors: tuple[tuple[int, ...], ...]

    @property
    def num_cycles(self) -> int:
        return len(self.vectors)

    @property
    def width(self) -> int:
        return len(self.vectors[0]) if self.vectors else 0


@dataclass(frozen=True)
class GoldenTrace:
    """Fault-free run: states[k] = S_k (pre-edge), outputs[k] = Y_k."""

    states: tuple[State, ...]
    outputs: tuple[tuple[int, ...], ...]

    @property
    def num_cycles(self) -> int:
        return len(self.outputs)


def step(
    circuit: Circuit,
    state: State,
    inputs: tuple[int, ...],
    order: tuple[str, ...] | None = None,
) -> tuple[tuple[int, ...], State]:
    """One cycle: settle, sample outputs, compute the post-edge state."""
    if order is None:
        order = cached_levelization(circuit)
    values, outputs = eval_comb(circuit, order, inputs, state)
    next_state = tuple(values[f.d] for f in circuit.flops)
    return outputs, next_state


def golden_run(circuit: Circuit, tb: Testbench) -> GoldenTrace:
    """Simulate the fault-free circuit over the whole testbench."""
    order = cached_levelization(circuit)
    state = circuit.init_state()
    states = [state]
    outputs = []
    for k, vec in enumerate(tb.vectors):
        out, nxt = step(circuit, state, vec, order)
        outputs.append(out)
        if k < tb.num_cycles - 1:
            state = nxt
            states.append(state)
    return GoldenTrace(states=tuple(states), outputs=tuple(outputs))


def flip_bit(state: State, index: int) -> State:
    """State with flop `index` inverted; IndexError outside [0, F)."""
    if not 0 <= index < len(state):
        raise IndexError(f"flop index {index} out of range for width {len(state)}")
    flipped = list(state)
    flipped[index] ^= 1
    return tuple(flipped)


def parse_stimuli_csv(text: str, circuit: Circuit) -> Testbench:
    """Stimuli CSV: header row = circuit input names in order, then 0/1 rows."""
    rows = list(csv.reader(io.StringIO(text)))
    rows = [row for row in rows if row]  # tolerate a trailing blank line
    if not rows:
        raise ValueError("stimuli: empty file")
    header = tuple(cell.strip() for cell in rows[0])
    if header != circuit.inputs:
        raise ValueError(
            f"stimuli: header {list(header)} does not match circuit inputs "
            f"{list(circuit.inputs)}"
        )
    vectors = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(circuit.inputs):
            raise ValueError(
                f"stimuli: line {lineno} has {len(row)} columns, "
                f"expected {len(circuit.inputs)}"
            )
        vec = []
        for cell in row:
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise ValueError(f"stimuli: line {lineno} has non-bit value {cell!r}")
            vec.append(int(cell))
        vectors.append(tuple(vec))
    if not vectors:
        raise ValueError("stimuli: no vector rows after the header")
    return Testbench(vectors=tuple(vectors))


def format_stimuli_csv(tb: Testbench, circuit: Circuit) -> str:
    if tb.vectors and tb.width != len(circuit.inputs):
        raise ValueError(
            f"stimuli width {tb.width} != {len(circuit.inputs)} for {circuit.name}"
        )
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(circuit.inputs)
    for vec in tb.vectors:
        writer.writerow(vec)
    return out.getvalue()


def trace_to_doc(trace: GoldenTrace) -> dict:
    return {
        "states": [list(s) for s in trace.states],
        "outputs": [list(o) for o in trace.outputs],
    }


def trace_from_doc(doc: dict) -> GoldenTrace:
    return GoldenTrace(
        states=tuple(tuple(int(b) for b in s) for s in doc["states"]),
        outputs=tuple(tuple(int(b) for b in o) for o in doc["outputs"]),
    )
