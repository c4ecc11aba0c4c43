"""Gate-level netlist model: parse, validate, levelize, evaluate.

A circuit is a synchronous Moore/Mealy machine: primary inputs, one clock
domain of D flip-flops, and a combinational gate network in between. Nets are
named by strings; a net is driven by exactly one of (primary input, gate
output, flop Q). The on-disk form is JSON:

    {"name": ..., "inputs": [...], "outputs": [...],
     "gates": [{"id": ..., "kind": ..., "ins": [...], "out": ...}, ...],
     "flops": [{"id": ..., "d": ..., "q": ..., "init": 0|1}, ...]}

Gate kinds: AND OR XOR NAND NOR XNOR (n-ary, n >= 2), NOT BUF (unary),
MUX (ins = [select, a, b]; select=0 -> a, select=1 -> b), CONST0/CONST1
(no inputs). `init` defaults to 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

# kind -> (min arity, max arity); None = unbounded
GATE_ARITY: dict[str, tuple[int, int | None]] = {
    "AND": (2, None),
    "OR": (2, None),
    "XOR": (2, None),
    "NAND": (2, None),
    "NOR": (2, None),
    "XNOR": (2, None),
    "NOT": (1, 1),
    "BUF": (1, 1),
    "MUX": (3, 3),
    "CONST0": (0, 0),
    "CONST1": (0, 0),
}


class NetlistError(Exception):
    """Malformed netlist document (syntax or schema)."""


class NetlistValidationError(NetlistError):
    """Structurally invalid circuit; carries the full violation list."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class Gate:
    id: str
    kind: str
    ins: tuple[str, ...]
    out: str


@dataclass(frozen=True)
class Flop:
    id: str
    d: str
    q: str
    init: int = 0


@dataclass(frozen=True)
class Circuit:
    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    gates: tuple[Gate, ...]
    flops: tuple[Flop, ...]

    @property
    def num_inputs(self) -> int:
        return len(self.inputs)

    @property
    def num_outputs(self) -> int:
        return len(self.outputs)

    @property
    def num_flops(self) -> int:
        return len(self.flops)

    def init_state(self) -> tuple[int, ...]:
        return tuple(f.init for f in self.flops)


def _require(doc: dict, key: str, kind: type, where: str):
    if key not in doc:
        raise NetlistError(f"netlist schema: missing '{key}' in {where}")
    val = doc[key]
    if not isinstance(val, kind):
        raise NetlistError(
            f"netlist schema: '{key}' in {where} must be {kind.__name__}"
        )
    return val


def _name_list(doc: dict, key: str, where: str) -> tuple[str, ...]:
    raw = _require(doc, key, list, where)
    for item in raw:
        if not isinstance(item, str) or not item:
            raise NetlistError(
                f"netlist schema: '{key}' in {where} must be non-empty strings"
            )
    return tuple(raw)


def circuit_from_doc(doc) -> Circuit:
    """Build a Circuit from a parsed JSON document and validate it."""
    if not isinstance(doc, dict):
        raise NetlistError("netlist schema: top level must be an object")
    name = _require(doc, "name", str, "netlist")
    inputs = _name_list(doc, "inputs", "netlist")
    outputs = _name_list(doc, "outputs", "netlist")

    gates = []
    for idx, g in enumerate(doc.get("gates", [])):
        where = f"gates[{idx}]"
        if not isinstance(g, dict):
            raise NetlistError(f"netlist schema: {where} must be an object")
        gates.append(
            Gate(
                id=_require(g, "id", str, where),
                kind=_require(g, "kind", str, where),
                ins=_name_list(g, "ins", where),
                out=_require(g, "out", str, where),
            )
        )

    flops = []
    for idx, f in enumerate(doc.get("flops", [])):
        where = f"flops[{idx}]"
        if not isinstance(f, dict):
            raise NetlistError(f"netlist schema: {where} must be an object")
        init = f.get("init", 0)
        if init not in (0, 1):
            raise NetlistError(f"netlist schema: 'init' in {where} must be 0 or 1")
        flops.append(
            Flop(
                id=_require(f, "id", str, where),
                d=_require(f, "d", str, where),
                q=_require(f, "q", str, where),
                init=int(init),
            )
        )

    circuit = Circuit(name, inputs, outputs, tuple(gates), tuple(flops))
    violations = validate(circuit)
    if violations:
        raise NetlistValidationError(violations)
    return circuit


def parse_netlist(text: str) -> Circuit:
    """Parse netlist JSON text; reports position on syntax errors."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetlistError(
            f"netlist syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return circuit_from_doc(doc)


def circuit_to_doc(circuit: Circuit) -> dict:
    return {
        "name": circuit.name,
        "inputs": list(circuit.inputs),
        "outputs": list(circuit.outputs),
        "gates": [
            {"id": g.id, "kind": g.kind, "ins": list(g.ins), "out": g.out}
            for g in circuit.gates
        ],
        "flops": [
            {"id": f.id, "d": f.d, "q": f.q, "init": f.init} for f in circuit.flops
        ],
    }


def serialize_netlist(circuit: Circuit) -> str:
    return json.dumps(circuit_to_doc(circuit), indent=2) + "\n"


def validate(circuit: Circuit) -> list[str]:
    """Structural checks; returns all violations, empty list when clean.

    Messages are stable strings keyed on the offending id/net:
    duplicate id, multiple drivers, undriven net/output, arity,
    unknown kind, combinational cycle.
    """
    violations: list[str] = []

    ids_seen: set[str] = set()
    for obj_id in [g.id for g in circuit.gates] + [f.id for f in circuit.flops]:
        if obj_id in ids_seen:
            violations.append(f"duplicate id: {obj_id}")
        ids_seen.add(obj_id)

    drivers: set[str] = set()

    def claim(net: str):
        if net in drivers:
            violations.append(f"multiple drivers: {net}")
        drivers.add(net)

    for net in circuit.inputs:
        claim(net)
    for g in circuit.gates:
        claim(g.out)
    for f in circuit.flops:
        claim(f.q)

    for g in circuit.gates:
        arity = GATE_ARITY.get(g.kind)
        if arity is None:
            violations.append(f"unknown kind: {g.id}")
        else:
            lo, hi = arity
            if len(g.ins) < lo or (hi is not None and len(g.ins) > hi):
                violations.append(f"arity: {g.id}")
        for net in g.ins:
            if net not in drivers:
                violations.append(f"undriven net: {net} (input of {g.id})")
    for f in circuit.flops:
        if f.d not in drivers:
            violations.append(f"undriven net: {f.d} (D of {f.id})")
    for net in circuit.outputs:
        if net not in drivers:
            violations.append(f"undriven output: {net}")

    # Cycle check over the gate-to-gate dependency graph. Flop Q nets are
    # sources here: the register boundary legally breaks feedback loops.
    by_out = {g.out: g for g in circuit.gates}
    indeg = {g.id: 0 for g in circuit.gates}
    succs: dict[str, list[str]] = {g.id: [] for g in circuit.gates}
    for g in circuit.gates:
        for net in g.ins:
            src = by_out.get(net)
            if src is not None:
                succs[src.id].append(g.id)
                indeg[g.id] += 1
    ready = [g.id for g in circuit.gates if indeg[g.id] == 0]
    done = 0
    while ready:
        gid = ready.pop()
        done += 1
        for nxt in succs[gid]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                ready.append(nxt)
    if done != len(circuit.gates):
        stuck = sorted(gid for gid, d in indeg.items() if d > 0)
        violations.append("combinational cycle: " + " ".join(stuck))

    return violations


def levelize(circuit: Circuit) -> list[str]:
    """Topological gate order (ids), stable for a fixed declaration order."""
    by_out = {g.out: g for g in circuit.gates}
    indeg = {g.id: 0 for g in circuit.gates}
    succs: dict[str, list[str]] = {g.id: [] for g in circuit.gates}
    for g in circuit.gates:
        for net in g.ins:
            src = by_out.get(net)
            if src is not None:
                succs[src.id].append(g.id)
                indeg[g.id] += 1
    order: list[str] = []
    ready = [g.id for g in circuit.gates if indeg[g.id] == 0]
    ready.reverse()  # pop() then yields declaration order among ties
    while ready:
        gid = ready.pop()
        order.append(gid)
        for nxt in succs[gid]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                ready.append(nxt)
    if len(order) != len(circuit.gates):
        raise NetlistError("combinational cycle: levelize on unvalidated circuit")
    return order


@lru_cache(maxsize=512)
def cached_levelization(circuit: Circuit) -> tuple[str, ...]:
    return tuple(levelize(circuit))


def gate_value(kind: str, vals: list[int]) -> int:
    if kind == "AND":
        return int(all(vals))
    if kind == "OR":
        return int(any(vals))
    if kind == "XOR":
        return sum(vals) & 1
    if kind == "NAND":
        return int(not all(vals))
    if kind == "NOR":
        return int(not any(vals))
    if kind == "XNOR":
        return (sum(vals) & 1) ^ 1
    if kind == "NOT":
        return vals[0] ^ 1
    if kind == "BUF":
        return vals[0]
    if kind == "MUX":
        return vals[2] if vals[0] else vals[1]
    if kind == "CONST0":
        return 0
    if kind == "CONST1":
        return 1
    raise NetlistError(f"unknown kind: {kind}")


def eval_comb(
    circuit: Circuit,
    order: list[str] | tuple[str, ...],
    inputs: tuple[int, ...],
    state: tuple[int, ...],
) -> tuple[dict[str, int], tuple[int, ...]]:
    """One combinational settle: net values and sampled outputs.

    `order` must be a levelization of `circuit`; `inputs` and `state` are
    bit vectors in declaration order.
    """
    if len(inputs) != len(circuit.inputs):
        raise ValueError(
            f"input width {len(inputs)} != {len(circuit.inputs)} for {circuit.name}"
        )
    if len(state) != len(circuit.flops):
        raise ValueError(
            f"state width {len(state)} != {len(circuit.flops)} for {circuit.name}"
        )
    values: dict[str, int] = {}
    for net, bit in zip(circuit.inputs, inputs):
        values[net] = bit
    for flop, bit in zip(circuit.flops, state):
        values[flop.q] = bit
    by_id = {g.id: g for g in circuit.gates}
    for gid in order:
        g = by_id[gid]
        values[g.out] = gate_value(g.kind, [values[n] for n in g.ins])
    outputs = tuple(values[net] for net in circuit.outputs)
    return values, outputs
