"""SEU fault grading toolkit.

Grades every single-bit-flip fault of a synchronous gate-level circuit as
FAILURE, LATENT, or SILENT, four ways: a brute-force oracle plus three
campaign engines (mask-scan, state-scan, time-multiplexed) that also account
for the clock edges their emulation hardware would spend. Structural
instrumentation transforms, RAM footprint models, and an HTTP service with a
thin CLI round out the toolkit.
"""

__version__ = "0.1.0"

from .netlist import (
    GATE_ARITY,
    Circuit,
    Flop,
    Gate,
    NetlistError,
    NetlistValidationError,
    circuit_from_doc,
    circuit_to_doc,
    eval_comb,
    levelize,
    parse_netlist,
    serialize_netlist,
    validate,
)
from .sim import (
    GoldenTrace,
    State,
    Testbench,
    flip_bit,
    format_stimuli_csv,
    golden_run,
    parse_stimuli_csv,
    step,
    trace_from_doc,
    trace_to_doc,
)
from .grading import (
    Fault,
    FaultClass,
    Verdict,
    classify_oracle,
    fault_list,
    faulty_run,
    gen_random_fixture,
)
from .emu import (
    CampaignResult,
    CostLedger,
    CostModel,
    campaign_oracle,
    estimate_time,
    run_campaign,
    run_mask_scan,
    run_state_scan,
    run_time_mux,
    summarize,
)
from .instrument import (
    FootprintParams,
    InstrumentedDesign,
    OverheadReport,
    Schedule,
    Technique,
    instrument,
    mask_scan_fault_window,
    mask_scan_schedule,
    memory_footprint,
    overhead_report,
    simulate_instrumented,
)
from .fixtures import fix_a, fix_b, shift_register_fixture
from .reports import (
    build_summary,
    compare_reports,
    format_per_fault_csv,
    parse_per_fault_csv,
)

__all__ = [
    "GATE_ARITY",
    "Circuit",
    "Flop",
    "Gate",
    "NetlistError",
    "NetlistValidationError",
    "circuit_from_doc",
    "circuit_to_doc",
    "eval_comb",
    "levelize",
    "parse_netlist",
    "serialize_netlist",
    "validate",
    "GoldenTrace",
    "State",
    "Testbench",
    "flip_bit",
    "format_stimuli_csv",
    "golden_run",
    "parse_stimuli_csv",
    "step",
    "trace_from_doc",
    "trace_to_doc",
    "Fault",
    "FaultClass",
    "Verdict",
    "classify_oracle",
    "fault_list",
    "faulty_run",
    "gen_random_fixture",
    "CampaignResult",
    "CostLedger",
    "CostModel",
    "campaign_oracle",
    "estimate_time",
    "run_campaign",
    "run_mask_scan",
    "run_state_scan",
    "run_time_mux",
    "summarize",
    "FootprintParams",
    "InstrumentedDesign",
    "OverheadReport",
    "Schedule",
    "Technique",
    "instrument",
    "mask_scan_fault_window",
    "mask_scan_schedule",
    "memory_footprint",
    "overhead_report",
    "simulate_instrumented",
    "fix_a",
    "fix_b",
    "shift_register_fixture",
    "build_summary",
    "compare_reports",
    "format_per_fault_csv",
    "parse_per_fault_csv",
]
