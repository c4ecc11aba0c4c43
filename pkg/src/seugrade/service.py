"""HTTP grading service: the core package behind pydantic request models.

Netlists travel as raw JSON text and stimuli as CSV text, so the server-side
parsers stay the single authority on both formats (syntax errors come back as
400s with the parser's position message). Campaign endpoints return the
per-fault CSV plus the summary payload; clients own all file I/O.
"""

from __future__ import annotations

from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .emu import CostModel, run_campaign
from .grading import gen_random_fixture
from .instrument import (
    FootprintParams,
    Technique,
    instrument,
    memory_footprint,
    overhead_report,
)
from .netlist import NetlistError, circuit_to_doc, parse_netlist
from .reports import build_summary, compare_reports, format_per_fault_csv
from .sim import format_stimuli_csv, golden_run, parse_stimuli_csv, trace_to_doc

TechniqueName = Literal["mask-scan", "state-scan", "time-mux"]
CampaignTechnique = Literal["oracle", "mask-scan", "state-scan", "time-mux"]

COST_KNOBS = (
    "reset_edges",
    "mask_shift_edges_per_fault",
    "scan_edges",
    "edges_per_emulated_cycle",
    "inject_edges",
    "verdict_write_edges",
    "checkpoint_advance_edges",
)


class GoldenRequest(BaseModel):
    netlist: str = Field(description="netlist JSON text")
    stimuli_csv: str


class GoldenResponse(BaseModel):
    circuit: str
    cycles: int
    trace: dict


class CampaignRequest(BaseModel):
    netlist: str
    stimuli_csv: str
    technique: CampaignTechnique
    cost: dict[str, int] = Field(default_factory=dict)
    f_clk: int = 25_000_000
    timestamp: bool = True
    batch_size: Optional[int] = None


class CampaignResponse(BaseModel):
    summary: dict
    per_fault_csv: str


class InstrumentRequest(BaseModel):
    netlist: str
    technique: TechniqueName


class InstrumentResponse(BaseModel):
    netlist: dict
    control_ports: dict
    flop_map: dict[str, list[str]]
    aux_flops: list[str]
    overhead: dict


class FootprintRequest(BaseModel):
    technique: TechniqueName
    flops: Optional[int] = None
    inputs: Optional[int] = None
    outputs: Optional[int] = None
    cycles: Optional[int] = None
    verdict_width: int = 1
    netlist: Optional[str] = None
    stimuli_csv: Optional[str] = None


class CompareRequest(BaseModel):
    report_a: str
    report_b: str
    max_diffs: int = 10


class CompareResponse(BaseModel):
    status: Literal["identical", "class-mismatch", "incompatible"]
    diffs: list[str]


class FixtureRequest(BaseModel):
    seed: int
    flops: int
    gates: int
    inputs: int
    outputs: int
    cycles: int


class FixtureResponse(BaseModel):
    netlist: dict
    stimuli_csv: str


def _bad_request(exc: Exception):
    raise HTTPException(status_code=400, detail=str(exc))


def _load(netlist_text: str, stimuli_csv: str | None):
    circuit = parse_netlist(netlist_text)
    tb = None
    if stimuli_csv is not None:
        tb = parse_stimuli_csv(stimuli_csv, circuit)
    return circuit, tb


def _cost_model(overrides: dict[str, int]) -> CostModel:
    unknown = [k for k in overrides if k not in COST_KNOBS]
    if unknown:
        raise ValueError(f"unknown cost knob: {', '.join(sorted(unknown))}")
    cm = CostModel(**overrides)
    cm.validate()
    return cm


def create_app() -> FastAPI:
    app = FastAPI(title="seugrade", version=__version__)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/golden", response_model=GoldenResponse)
    def golden(req: GoldenRequest) -> GoldenResponse:
        try:
            circuit, tb = _load(req.netlist, req.stimuli_csv)
            trace = golden_run(circuit, tb)
        except (NetlistError, ValueError) as exc:
            _bad_request(exc)
        return GoldenResponse(
            circuit=circuit.name, cycles=tb.num_cycles, trace=trace_to_doc(trace)
        )

    @app.post("/campaign", response_model=CampaignResponse)
    def campaign(req: CampaignRequest) -> CampaignResponse:
        try:
            circuit, tb = _load(req.netlist, req.stimuli_csv)
            cost = _cost_model(req.cost)
            result = run_campaign(
                circuit,
                tb,
                req.technique,
                cost=None if req.technique == "oracle" else cost,
                batch_size=req.batch_size,
            )
            summary = build_summary(result, circuit, req.f_clk, req.timestamp)
            csv_text = format_per_fault_csv(result, circuit)
        except (NetlistError, ValueError) as exc:
            _bad_request(exc)
        return CampaignResponse(summary=summary, per_fault_csv=csv_text)

    @app.post("/instrument", response_model=InstrumentResponse)
    def do_instrument(req: InstrumentRequest) -> InstrumentResponse:
        try:
            circuit, _ = _load(req.netlist, None)
            design = instrument(circuit, req.technique)
            report = overhead_report(circuit, req.technique)
        except (NetlistError, ValueError) as exc:
            _bad_request(exc)
        return InstrumentResponse(
            netlist=circuit_to_doc(design.circuit),
            control_ports=design.control_ports,
            flop_map={k: list(v) for k, v in design.flop_map.items()},
            aux_flops=list(design.aux_flops),
            overhead={
                "original_ff": report.original_ff,
                "instrumented_ff": report.instrumented_ff,
                "added_gates": report.added_gates,
                "ff_overhead_pct": report.ff_overhead_pct,
            },
        )

    @app.post("/footprint")
    def footprint(req: FootprintRequest) -> dict:
        try:
            if req.netlist is not None:
                circuit, tb = _load(req.netlist, req.stimuli_csv)
                if tb is None:
                    raise ValueError("footprint: netlist form needs stimuli_csv")
                params = FootprintParams(
                    flops=circuit.num_flops,
                    inputs=circuit.num_inputs,
                    outputs=circuit.num_outputs,
                    cycles=tb.num_cycles,
                    verdict_width=req.verdict_width,
                )
            else:
                missing = [
                    k
                    for k in ("flops", "inputs", "outputs", "cycles")
                    if getattr(req, k) is None
                ]
                if missing:
                    raise ValueError(
                        f"footprint: missing parameters: {', '.join(missing)}"
                    )
                params = FootprintParams(
                    flops=req.flops,
                    inputs=req.inputs,
                    outputs=req.outputs,
                    cycles=req.cycles,
                    verdict_width=req.verdict_width,
                )
            bits = memory_footprint(params, req.technique)
        except (NetlistError, ValueError) as exc:
            _bad_request(exc)
        return {
            "technique": req.technique,
            "params": {
                "flops": params.flops,
                "inputs": params.inputs,
                "outputs": params.outputs,
                "cycles": params.cycles,
                "verdict_width": params.verdict_width,
            },
            "fpga_ram_bits": bits["fpga_ram_bits"],
            "board_ram_bits": bits["board_ram_bits"],
            "fpga_ram_kbit": round(bits["fpga_ram_bits"] / 1024, 1),
            "board_ram_kbit": round(bits["board_ram_bits"] / 1024, 1),
            "fault_space": params.flops * params.cycles,
        }

    @app.post("/compare", response_model=CompareResponse)
    def compare(req: CompareRequest) -> CompareResponse:
        if req.max_diffs < 1:
            _bad_request(ValueError("max_diffs must be >= 1"))
        outcome = compare_reports(req.report_a, req.report_b, req.max_diffs)
        return CompareResponse(status=outcome.status, diffs=outcome.diffs)

    @app.post("/fixture", response_model=FixtureResponse)
    def fixture(req: FixtureRequest) -> FixtureResponse:
        try:
            circuit, tb = gen_random_fixture(
                seed=req.seed,
                flops=req.flops,
                gates=req.gates,
                inputs=req.inputs,
                outputs=req.outputs,
                cycles=req.cycles,
            )
        except ValueError as exc:
            _bad_request(exc)
        return FixtureResponse(
            netlist=circuit_to_doc(circuit),
            stimuli_csv=format_stimuli_csv(tb, circuit),
        )

    return app


app = create_app()
