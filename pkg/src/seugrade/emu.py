"""Campaign engines and their clock-edge cost ledgers.

Three grading techniques, each trading hardware for campaign time, run here as
bit-parallel batch simulations that reproduce both the verdicts and the edge
counts the corresponding emulation hardware would spend:

MASK_SCAN   one fault per replay. Shift a one-hot mask (1 edge), reset
            (1 edge), rerun the bench from cycle 0, abort at the first output
            mismatch. Survivors cost the full bench plus a final state
            scan-out of F edges to separate LATENT from SILENT, so SILENT is
            only detected at the end (at_cycle = N-1, final-compare).
STATE_SCAN  scan the golden state S_j in through the chain (F edges), run
            from cycle j, compare the full state against the golden trace
            every cycle: stops at the first mismatch OR the first
            re-convergence, so at_cycle matches the oracle for every class.
TIME_MUX    golden and faulty copies of the state time-share one gate
            network: each emulated cycle costs 2 edges (golden half, faulty
            half). A checkpoint register walks the bench once for the whole
            campaign (shared edges), so a fault at cycle j starts from the
            checkpoint instead of replaying 0..j-1. Output mismatch aborts
            after the golden half-edge of the mismatch cycle; re-convergence
            aborts after the faulty half-edge of the cycle before.

The oracle campaign fills the same result shape from brute-force semantics;
its per-fault numbers are simulated cycles, not hardware edges, and are
flagged as such (edge_unit) so nobody charts them against engine ledgers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

from .bitsim import batch_fault_pass, compile_circuit, iter_bits
from .grading import Fault, FaultClass, Verdict, fault_list
from .netlist import Circuit
from .sim import GoldenTrace, Testbench, golden_run

TECHNIQUES = ("mask-scan", "state-scan", "time-mux")


@dataclass(frozen=True)
class CostModel:
    """Edge costs of the campaign controller's primitive operations.

    scan_edges defaults to the flop count F of the circuit under grading;
    edges_per_emulated_cycle defaults to 1 for the single-run techniques and
    2 for TIME_MUX (golden half plus faulty half).
    """

    reset_edges: int = 1
    mask_shift_edges_per_fault: int = 1
    scan_edges: int | None = None
    edges_per_emulated_cycle: int | None = None
    inject_edges: int = 1
    verdict_write_edges: int = 1
    checkpoint_advance_edges: int = 1
    f_clk: int = 25_000_000

    def validate(self) -> None:
        for name in (
            "reset_edges",
            "mask_shift_edges_per_fault",
            "inject_edges",
            "verdict_write_edges",
            "checkpoint_advance_edges",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"cost model: {name} must be >= 0")
        if self.scan_edges is not None and self.scan_edges < 0:
            raise ValueError("cost model: scan_edges must be >= 0")
        if (
            self.edges_per_emulated_cycle is not None
            and self.edges_per_emulated_cycle < 1
        ):
            raise ValueError("cost model: edges_per_emulated_cycle must be >= 1")
        if self.f_clk <= 0:
            raise ValueError("cost model: f_clk must be > 0")

    def resolved_scan_edges(self, num_flops: int) -> int:
        return self.scan_edges if self.scan_edges is not None else num_flops

    def resolved_epc(self, technique: str) -> int:
        if self.edges_per_emulated_cycle is not None:
            return self.edges_per_emulated_cycle
        return 2 if technique == "time-mux" else 1


@dataclass
class CostLedger:
    """Edge accounting for one campaign: per fault, by category, and shared."""

    total_edges: int
    per_fault_edges: list[int]
    breakdown: dict[str, int]
    shared_edges: int = 0


@dataclass
class CampaignResult:
    technique: str
    faults: list[Fault]
    verdicts: list[Verdict]
    ledger: CostLedger
    summary: dict
    edge_unit: str = "clock-edges"
    silent_detection: str = "online"
    elapsed_seconds: float = 0.0


def summarize(verdicts: list[Verdict]) -> dict:
    """Class counts plus one-decimal percentages (half-up rounding)."""
    counts = {"failure": 0, "latent": 0, "silent": 0}
    for v in verdicts:
        counts[v.klass.value.lower()] += 1
    total = len(verdicts)
    percentages = {}
    for key, n in counts.items():
        if total == 0:
            percentages[key] = 0.0
        else:
            pct = (Decimal(100 * n) / Decimal(total)).quantize(
                Decimal("0.1"), rounding=ROUND_HALF_UP
            )
            percentages[key] = float(pct)
    return {"total": total, "counts": counts, "percentages": percentages}


def _empty_result(technique: str, edge_unit: str, silent_detection: str):
    return CampaignResult(
        technique=technique,
        faults=[],
        verdicts=[],
        ledger=CostLedger(0, [], {"run": 0, "scan": 0, "control": 0}, 0),
        summary=summarize([]),
        edge_unit=edge_unit,
        silent_detection=silent_detection,
    )


def _batched_observables(
    circuit: Circuit,
    tb: Testbench,
    trace: GoldenTrace,
    track_convergence: bool,
    compare_final_state: bool,
    batch_size: int | None,
):
    """Run the batch simulator over the whole fault list, in chunks."""
    cc = compile_circuit(circuit)
    M = circuit.num_flops * tb.num_cycles
    step = M if batch_size is None else max(1, batch_size)
    first_fail: list[int | None] = []
    first_conv: list[int | None] = []
    final_eq: list[bool] = []
    for lo in range(0, M, step):
        hi = min(M, lo + step)
        res = batch_fault_pass(
            cc, tb, trace, lo, hi, track_convergence, compare_final_state
        )
        first_fail.extend(res.first_fail)
        if track_convergence:
            first_conv.extend(res.first_conv)
        if compare_final_state:
            width = hi - lo
            eq = res.final_eq
            final_eq.extend(bool(eq >> b & 1) for b in range(width))
    return first_fail, first_conv, final_eq


def _check_bench(circuit: Circuit, tb: Testbench) -> None:
    if tb.num_cycles < 1:
        raise ValueError("campaign: empty testbench")
    if tb.width != circuit.num_inputs:
        raise ValueError(
            f"campaign: stimuli width {tb.width} != {circuit.num_inputs} inputs"
        )


def campaign_oracle(
    circuit: Circuit,
    tb: Testbench,
    trace: GoldenTrace | None = None,
    batch_size: int | None = None,
) -> CampaignResult:
    """Grade every fault by definition; ledger counts simulated cycles."""
    _check_bench(circuit, tb)
    t0 = time.monotonic()
    if trace is None:
        trace = golden_run(circuit, tb)
    faults = fault_list(circuit, tb)
    if not faults:
        return _empty_result("oracle", "simulated-cycles", "online")
    N = tb.num_cycles
    ff, fc, _ = _batched_observables(circuit, tb, trace, True, False, batch_size)

    verdicts: list[Verdict] = []
    per_fault: list[int] = []
    for b, fault in enumerate(faults):
        if ff[b] is not None:
            verdicts.append(Verdict(FaultClass.FAILURE, ff[b]))
        elif fc[b] is not None:
            verdicts.append(Verdict(FaultClass.SILENT, fc[b]))
        else:
            verdicts.append(Verdict(FaultClass.LATENT, N - 1))
        per_fault.append(N - fault.cycle)

    total = sum(per_fault)
    ledger = CostLedger(total, per_fault, {"run": total, "scan": 0, "control": 0}, 0)
    return CampaignResult(
        technique="oracle",
        faults=faults,
        verdicts=verdicts,
        ledger=ledger,
        summary=summarize(verdicts),
        edge_unit="simulated-cycles",
        silent_detection="online",
        elapsed_seconds=time.monotonic() - t0,
    )


def run_mask_scan(
    circuit: Circuit,
    tb: Testbench,
    trace: GoldenTrace | None = None,
    cost: CostModel | None = None,
    batch_size: int | None = None,
) -> CampaignResult:
    """One full replay per fault; SILENT found only by the final scan-out."""
    _check_bench(circuit, tb)
    t0 = time.monotonic()
    cost = cost or CostModel()
    cost.validate()
    if trace is None:
        trace = golden_run(circuit, tb)
    faults = fault_list(circuit, tb)
    if not faults:
        return _empty_result("mask-scan", "clock-edges", "final-compare")
    N = tb.num_cycles
    scan = cost.resolved_scan_edges(circuit.num_flops)
    epc = cost.resolved_epc("mask-scan")
    overhead = (
        cost.reset_edges + cost.mask_shift_edges_per_fault + cost.verdict_write_edges
    )

    ff, _, feq = _batched_observables(circuit, tb, trace, False, True, batch_size)

    verdicts: list[Verdict] = []
    per_fault: list[int] = []
    run_e = scan_e = ctl_e = 0
    for b, _fault in enumerate(faults):
        if ff[b] is not None:
            verdicts.append(Verdict(FaultClass.FAILURE, ff[b]))
            executed = ff[b] + 1  # replay aborts right after the mismatch cycle
            fault_scan = 0
        else:
            klass = FaultClass.SILENT if feq[b] else FaultClass.LATENT
            verdicts.append(Verdict(klass, N - 1))
            executed = N
            fault_scan = scan
        edges = overhead + epc * executed + fault_scan
        per_fault.append(edges)
        run_e += epc * executed
        scan_e += fault_scan
        ctl_e += overhead

    ledger = CostLedger(
        total_edges=run_e + scan_e + ctl_e,
        per_fault_edges=per_fault,
        breakdown={"run": run_e, "scan": scan_e, "control": ctl_e},
        shared_edges=0,
    )
    return CampaignResult(
        technique="mask-scan",
        faults=faults,
        verdicts=verdicts,
        ledger=ledger,
        summary=summarize(verdicts),
        edge_unit="clock-edges",
        silent_detection="final-compare",
        elapsed_seconds=time.monotonic() - t0,
    )


def run_state_scan(
    circuit: Circuit,
    tb: Testbench,
    trace: GoldenTrace | None = None,
    cost: CostModel | None = None,
    batch_size: int | None = None,
) -> CampaignResult:
    """Scan the golden state in at cycle j, compare state every cycle."""
    _check_bench(circuit, tb)
    t0 = time.monotonic()
    cost = cost or CostModel()
    cost.validate()
    if trace is None:
        trace = golden_run(circuit, tb)
    faults = fault_list(circuit, tb)
    if not faults:
        return _empty_result("state-scan", "clock-edges", "online")
    N = tb.num_cycles
    scan = cost.resolved_scan_edges(circuit.num_flops)
    epc = cost.resolved_epc("state-scan")

    ff, fc, _ = _batched_observables(circuit, tb, trace, True, False, batch_size)

    verdicts: list[Verdict] = []
    per_fault: list[int] = []
    run_e = scan_e = ctl_e = 0
    for b, fault in enumerate(faults):
        if ff[b] is not None:
            verdicts.append(Verdict(FaultClass.FAILURE, ff[b]))
            at = ff[b]
        elif fc[b] is not None:
            verdicts.append(Verdict(FaultClass.SILENT, fc[b]))
            at = fc[b]
        else:
            verdicts.append(Verdict(FaultClass.LATENT, N - 1))
            at = N - 1
        executed = at - fault.cycle + 1
        edges = scan + epc * executed + cost.verdict_write_edges
        per_fault.append(edges)
        run_e += epc * executed
        scan_e += scan
        ctl_e += cost.verdict_write_edges

    ledger = CostLedger(
        total_edges=run_e + scan_e + ctl_e,
        per_fault_edges=per_fault,
        breakdown={"run": run_e, "scan": scan_e, "control": ctl_e},
        shared_edges=0,
    )
    return CampaignResult(
        technique="state-scan",
        faults=faults,
        verdicts=verdicts,
        ledger=ledger,
        summary=summarize(verdicts),
        edge_unit="clock-edges",
        silent_detection="online",
        elapsed_seconds=time.monotonic() - t0,
    )


def run_time_mux(
    circuit: Circuit,
    tb: Testbench,
    trace: GoldenTrace | None = None,
    cost: CostModel | None = None,
    batch_size: int | None = None,
) -> CampaignResult:
    """Golden/faulty copies time-share the gates; a checkpoint walks the
    bench once, so nothing before the injection cycle is ever replayed."""
    _check_bench(circuit, tb)
    t0 = time.monotonic()
    cost = cost or CostModel()
    cost.validate()
    if trace is None:
        trace = golden_run(circuit, tb)
    faults = fault_list(circuit, tb)
    if not faults:
        return _empty_result("time-mux", "clock-edges", "online")
    N = tb.num_cycles
    epc = cost.resolved_epc("time-mux")
    half = epc // 2  # golden half of the mismatch cycle; compare is free
    per_fault_ctl = (
        cost.mask_shift_edges_per_fault + cost.inject_edges + cost.verdict_write_edges
    )

    ff, fc, _ = _batched_observables(circuit, tb, trace, True, False, batch_size)

    verdicts: list[Verdict] = []
    per_fault: list[int] = []
    run_e = ctl_e = 0
    for b, fault in enumerate(faults):
        j = fault.cycle
        if ff[b] is not None:
            verdicts.append(Verdict(FaultClass.FAILURE, ff[b]))
            run = epc * (ff[b] - j) + half
        elif fc[b] is not None:
            verdicts.append(Verdict(FaultClass.SILENT, fc[b]))
            run = epc * (fc[b] - j)
        else:
            verdicts.append(Verdict(FaultClass.LATENT, N - 1))
            run = epc * (N - j)
        per_fault.append(per_fault_ctl + run)
        run_e += run
        ctl_e += per_fault_ctl

    groups = len({f.cycle for f in faults})
    shared = cost.reset_edges + cost.checkpoint_advance_edges * (groups - 1)
    ctl_e += shared

    ledger = CostLedger(
        total_edges=run_e + ctl_e,
        per_fault_edges=per_fault,
        breakdown={"run": run_e, "scan": 0, "control": ctl_e},
        shared_edges=shared,
    )
    return CampaignResult(
        technique="time-mux",
        faults=faults,
        verdicts=verdicts,
        ledger=ledger,
        summary=summarize(verdicts),
        edge_unit="clock-edges",
        silent_detection="online",
        elapsed_seconds=time.monotonic() - t0,
    )


_RUNNERS = {
    "oracle": campaign_oracle,
    "mask-scan": run_mask_scan,
    "state-scan": run_state_scan,
    "time-mux": run_time_mux,
}


def run_campaign(
    circuit: Circuit,
    tb: Testbench,
    technique: str,
    trace: GoldenTrace | None = None,
    cost: CostModel | None = None,
    batch_size: int | None = None,
) -> CampaignResult:
    """Dispatch by technique name ('oracle' or one of TECHNIQUES)."""
    if technique == "oracle":
        return campaign_oracle(circuit, tb, trace, batch_size)
    if technique not in _RUNNERS:
        raise ValueError(f"unknown technique: {technique}")
    return _RUNNERS[technique](circuit, tb, trace, cost, batch_size)


def estimate_time(ledger: CostLedger, f_clk: int) -> dict:
    """Wall-clock projection of a ledger at clock f_clk (Hz).

    avg_seconds_per_fault amortizes shared edges over the fault count and is
    omitted for an empty campaign.
    """
    if f_clk <= 0:
        raise ValueError("f_clk must be > 0")
    total_seconds = ledger.total_edges / f_clk
    out = {"total_seconds": total_seconds}
    if ledger.per_fault_edges:
        out["avg_seconds_per_fault"] = total_seconds / len(ledger.per_fault_edges)
    return out
