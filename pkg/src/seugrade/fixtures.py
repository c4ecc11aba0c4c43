"""Canonical hand-traceable fixtures and parametric shift registers.

sr2 ("FIX-A"): two-stage shift register, d -> f0 -> f1 -> y, bench 1,0,0,0.
Every flip reaches y except the last-cycle flip of f0, which dies latent.

gated ("FIX-B"): one flop reloaded from input a each cycle, output
y = AND(q, b). The bench (0,1),(0,0),(0,1),(0,0) alternately exposes and
masks the flop, producing one fault of each kind plus a second failure.
"""

from __future__ import annotations

import random

from .netlist import Circuit, Flop, Gate
from .sim import Testbench


def fix_a() -> tuple[Circuit, Testbench]:
    circuit = Circuit(
        name="sr2",
        inputs=("d",),
        outputs=("y",),
        gates=(Gate(id="g_buf", kind="BUF", ins=("n1",), out="y"),),
        flops=(
            Flop(id="f0", d="d", q="n0", init=0),
            Flop(id="f1", d="n0", q="n1", init=0),
        ),
    )
    tb = Testbench(vectors=((1,), (0,), (0,), (0,)))
    return circuit, tb


def fix_b() -> tuple[Circuit, Testbench]:
    circuit = Circuit(
        name="gated",
        inputs=("a", "b"),
        outputs=("y",),
        gates=(Gate(id="g_and", kind="AND", ins=("n0", "b"), out="y"),),
        flops=(Flop(id="f0", d="a", q="n0", init=0),),
    )
    tb = Testbench(vectors=((0, 1), (0, 0), (0, 1), (0, 0)))
    return circuit, tb


def shift_register_fixture(
    flops: int, cycles: int, taps: str = "all", seed: int = 0
) -> tuple[Circuit, Testbench]:
    """Serial-in shift register with all flop Qs visible (taps="all") or only
    the last stage buffered out (taps="last").

    With parallel taps every flip is an immediate FAILURE, which isolates the
    techniques' fixed per-fault costs: scan-in F versus full replay N.
    """
    if flops < 1 or cycles < 1:
        raise ValueError("shift register: need flops>=1 and cycles>=1")
    if taps not in ("all", "last"):
        raise ValueError("shift register: taps must be 'all' or 'last'")
    q_nets = tuple(f"q{i}" for i in range(flops))
    flop_list = tuple(
        Flop(id=f"f{i}", d="d" if i == 0 else q_nets[i - 1], q=q_nets[i], init=0)
        for i in range(flops)
    )
    if taps == "all":
        gates: tuple[Gate, ...] = ()
        outputs = q_nets
    else:
        gates = (Gate(id="g_buf", kind="BUF", ins=(q_nets[-1],), out="y"),)
        outputs = ("y",)
    circuit = Circuit(
        name=f"sr{flops}_{taps}",
        inputs=("d",),
        outputs=outputs,
        gates=gates,
        flops=flop_list,
    )
    rng = random.Random(seed)
    tb = Testbench(vectors=tuple((rng.randint(0, 1),) for _ in range(cycles)))
    return circuit, tb
