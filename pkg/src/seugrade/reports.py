"""Campaign report formats: per-fault CSV, summary JSON, and comparison.

Per-fault CSV columns: fault_id, flop_id, cycle, class, at_cycle, edges.
fault_id is the cycle-major index (cycle*F + flop); flop_id is the netlist
flop id. Reports from different engines over the same circuit and bench share
the first three columns, which is what compare keys on.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime, timezone

from .emu import CampaignResult, estimate_time
from .netlist import Circuit

CSV_COLUMNS = ("fault_id", "flop_id", "cycle", "class", "at_cycle", "edges")


def format_per_fault_csv(result: CampaignResult, circuit: Circuit) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for idx, (fault, verdict) in enumerate(zip(result.faults, result.verdicts)):
        writer.writerow(
            (
                idx,
                circuit.flops[fault.flop].id,
                fault.cycle,
                verdict.klass.value,
                verdict.at_cycle,
                result.ledger.per_fault_edges[idx],
            )
        )
    return out.getvalue()


@dataclass
class ReportRow:
    fault_id: int
    flop_id: str
    cycle: int
    klass: str
    at_cycle: int
    edges: int


def parse_per_fault_csv(text: str) -> list[ReportRow]:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"report: expected header {','.join(CSV_COLUMNS)}")
    parsed = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_COLUMNS):
            raise ValueError(f"report: line {lineno} has {len(row)} columns")
        try:
            parsed.append(
                ReportRow(
                    fault_id=int(row[0]),
                    flop_id=row[1],
                    cycle=int(row[2]),
                    klass=row[3],
                    at_cycle=int(row[4]),
                    edges=int(row[5]),
                )
            )
        except ValueError as exc:
            raise ValueError(f"report: line {lineno}: {exc}") from exc
    return parsed


def build_summary(
    result: CampaignResult,
    circuit: Circuit,
    f_clk: int,
    timestamp: bool = True,
) -> dict:
    """Summary JSON payload: class statistics plus the projected wall clock."""
    timing = estimate_time(result.ledger, f_clk)
    summary = {
        "circuit": circuit.name,
        "technique": result.technique,
        "fault_count": len(result.faults),
        "counts": result.summary["counts"],
        "percentages": result.summary["percentages"],
        "total_edges": result.ledger.total_edges,
        "edge_unit": result.edge_unit,
        "breakdown": result.ledger.breakdown,
        "shared_edges": result.ledger.shared_edges,
        "silent_detection": result.silent_detection,
        "f_clk_hz": f_clk,
        "total_seconds": timing["total_seconds"],
    }
    if "avg_seconds_per_fault" in timing:
        summary["us_per_fault"] = timing["avg_seconds_per_fault"] * 1e6
    if timestamp:
        summary["generated_at"] = datetime.now(timezone.utc).isoformat()
    return summary


@dataclass
class CompareOutcome:
    # status: "identical" | "class-mismatch" | "incompatible"
    status: str
    diffs: list[str]

    @property
    def exit_code(self) -> int:
        return {"identical": 0, "class-mismatch": 1}.get(self.status, 2)


def compare_reports(text_a: str, text_b: str, max_diffs: int = 10) -> CompareOutcome:
    """Same fault list required; verdict classes compared row by row."""
    try:
        rows_a = parse_per_fault_csv(text_a)
        rows_b = parse_per_fault_csv(text_b)
    except ValueError as exc:
        return CompareOutcome("incompatible", [str(exc)])
    if len(rows_a) != len(rows_b):
        return CompareOutcome(
            "incompatible",
            [f"fault counts differ: {len(rows_a)} vs {len(rows_b)}"],
        )
    for a, b in zip(rows_a, rows_b):
        if (a.fault_id, a.flop_id, a.cycle) != (b.fault_id, b.flop_id, b.cycle):
            return CompareOutcome(
                "incompatible",
                [
                    f"fault lists diverge at id {a.fault_id}: "
                    f"({a.flop_id},{a.cycle}) vs ({b.flop_id},{b.cycle})"
                ],
            )
    diffs = []
    for a, b in zip(rows_a, rows_b):
        if a.klass != b.klass:
            diffs.append(
                f"fault {a.fault_id} ({a.flop_id}, cycle {a.cycle}): "
                f"{a.klass} != {b.klass}"
            )
    if diffs:
        return CompareOutcome("class-mismatch", diffs[:max_diffs])
    return CompareOutcome("identical", [])
