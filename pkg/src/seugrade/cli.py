"""Command-line client for the grading service.

All computation happens behind the HTTP API in service.py; this module only
reads/writes files and maps responses to exit codes. By default the service
runs in-process (no daemon needed); --server points at a remote instance.

Exit codes: 0 success, 1 semantic mismatch (compare), 2 input/config error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import httpx

COST_PREFIX = "--cost."


class CliError(Exception):
    """Input/config problem; maps to exit code 2."""


class ServiceClient:
    def __init__(self, server: str | None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            # sync in-process ASGI shim; keeps the CLI thin without a daemon
            import warnings

            with warnings.catch_warnings():
                # the testclient import warns about its bundled httpx shim
                warnings.simplefilter("ignore")
                from starlette.testclient import TestClient

                from .service import create_app

                self._client = TestClient(
                    create_app(), raise_server_exceptions=False
                )

    def post(self, path: str, payload: dict) -> dict:
        try:
            resp = self._client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise CliError(f"service unreachable: {exc}") from exc
        if resp.status_code != 200:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise CliError(f"service error ({resp.status_code}): {detail}")
        return resp.json()


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".seugrade.")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def extract_cost_flags(argv: list[str]) -> tuple[list[str], dict[str, int]]:
    """Split --cost.<knob>=<int> overrides out of argv before argparse."""
    remaining: list[str] = []
    overrides: dict[str, int] = {}
    for token in argv:
        if token.startswith(COST_PREFIX):
            body = token[len(COST_PREFIX):]
            knob, sep, value = body.partition("=")
            if not sep or not knob:
                raise CliError(f"malformed cost flag: {token} (use --cost.knob=int)")
            try:
                overrides[knob] = int(value)
            except ValueError:
                raise CliError(f"cost flag {token}: value must be an integer")
        else:
            remaining.append(token)
    return remaining, overrides


def cmd_golden(args, client: ServiceClient, cost) -> int:
    payload = {
        "netlist": _read_file(args.netlist),
        "stimuli_csv": _read_file(args.stimuli),
    }
    resp = client.post("/golden", payload)
    _write_atomic(args.out, _dump_json(resp["trace"]))
    print(f"golden: {resp['circuit']}, {resp['cycles']} cycles -> {args.out}")
    return 0


def cmd_campaign(args, client: ServiceClient, cost) -> int:
    payload = {
        "netlist": _read_file(args.netlist),
        "stimuli_csv": _read_file(args.stimuli),
        "technique": args.technique,
        "cost": cost,
        "f_clk": args.fclk,
        "timestamp": not args.no_timestamp,
    }
    resp = client.post("/campaign", payload)
    _write_atomic(args.report, resp["per_fault_csv"])
    _write_atomic(args.summary, _dump_json(resp["summary"]))
    s = resp["summary"]
    print(
        f"campaign: {s['technique']} on {s['circuit']}: "
        f"{s['fault_count']} faults, counts {s['counts']}, "
        f"{s['total_edges']} {s['edge_unit']} -> {args.report}"
    )
    return 0


def cmd_instrument(args, client: ServiceClient, cost) -> int:
    payload = {"netlist": _read_file(args.netlist), "technique": args.technique}
    resp = client.post("/instrument", payload)
    _write_atomic(args.out, json.dumps(resp["netlist"], indent=2) + "\n")
    report = {
        "technique": args.technique,
        "overhead": resp["overhead"],
        "control_ports": resp["control_ports"],
        "flop_map": resp["flop_map"],
        "aux_flops": resp["aux_flops"],
    }
    _write_atomic(args.report, _dump_json(report))
    ov = resp["overhead"]
    print(
        f"instrument: {args.technique}: {ov['original_ff']} -> "
        f"{ov['instrumented_ff']} FFs (+{ov['ff_overhead_pct']:.0f}%), "
        f"{ov['added_gates']} gates added -> {args.out}"
    )
    return 0


def cmd_footprint(args, client: ServiceClient, cost) -> int:
    payload: dict = {"technique": args.technique, "verdict_width": args.w}
    if args.netlist:
        payload["netlist"] = _read_file(args.netlist)
        if not args.stimuli:
            raise CliError("footprint: --stimuli required with --netlist")
        payload["stimuli_csv"] = _read_file(args.stimuli)
    else:
        missing = [
            flag
            for flag, val in (("--F", args.F), ("--I", args.I),
                              ("--O", args.O), ("--N", args.N))
            if val is None
        ]
        if missing:
            raise CliError(f"footprint: missing {', '.join(missing)} (or --netlist)")
        payload.update(
            {"flops": args.F, "inputs": args.I, "outputs": args.O, "cycles": args.N}
        )
    resp = client.post("/footprint", payload)
    if resp["params"]["flops"] == 0:
        print("warning: empty fault space (F=0)", file=sys.stderr)
    text = _dump_json(resp)
    if args.out:
        _write_atomic(args.out, text)
        print(f"footprint: {args.technique} -> {args.out}")
    else:
        print(text, end="")
    return 0


def cmd_compare(args, client: ServiceClient, cost) -> int:
    payload = {
        "report_a": _read_file(args.report_a),
        "report_b": _read_file(args.report_b),
        "max_diffs": args.max_diffs,
    }
    resp = client.post("/compare", payload)
    status = resp["status"]
    for line in resp["diffs"]:
        print(line)
    if status == "identical":
        print("compare: reports identical")
        return 0
    if status == "class-mismatch":
        print("compare: class columns differ", file=sys.stderr)
        return 1
    print(f"compare: incompatible reports", file=sys.stderr)
    return 2


def cmd_fixture(args, client: ServiceClient, cost) -> int:
    payload = {
        "seed": args.seed,
        "flops": args.F,
        "gates": args.gates,
        "inputs": args.I,
        "outputs": args.O,
        "cycles": args.N,
    }
    resp = client.post("/fixture", payload)
    _write_atomic(args.netlist_out, json.dumps(resp["netlist"], indent=2) + "\n")
    _write_atomic(args.stimuli_out, resp["stimuli_csv"])
    print(
        f"fixture: seed {args.seed} (F={args.F}, N={args.N}) -> "
        f"{args.netlist_out}, {args.stimuli_out}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seugrade",
        description="SEU fault grading: campaigns, instrumentation, cost reports.",
    )
    parser.add_argument(
        "--server",
        default=None,
        metavar="URL",
        help="remote service URL (default: run the service in-process)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("golden", help="fault-free reference run")
    p.add_argument("--netlist", required=True)
    p.add_argument("--stimuli", required=True)
    p.add_argument("--out", required=True, help="trace JSON path")
    p.set_defaults(func=cmd_golden)

    p = sub.add_parser("campaign", help="grade the exhaustive fault list")
    p.add_argument("--netlist", required=True)
    p.add_argument("--stimuli", required=True)
    p.add_argument(
        "--technique",
        required=True,
        choices=["oracle", "mask-scan", "state-scan", "time-mux"],
    )
    p.add_argument("--report", required=True, help="per-fault CSV path")
    p.add_argument("--summary", required=True, help="summary JSON path")
    p.add_argument("--fclk", type=int, default=25_000_000, help="Hz (default 25 MHz)")
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("instrument", help="emit the instrumented netlist")
    p.add_argument("--netlist", required=True)
    p.add_argument(
        "--technique", required=True, choices=["mask-scan", "state-scan", "time-mux"]
    )
    p.add_argument("--out", required=True, help="instrumented netlist JSON path")
    p.add_argument("--report", required=True, help="overhead report JSON path")
    p.set_defaults(func=cmd_instrument)

    p = sub.add_parser("footprint", help="controller RAM model")
    p.add_argument(
        "--technique", required=True, choices=["mask-scan", "state-scan", "time-mux"]
    )
    p.add_argument("--netlist")
    p.add_argument("--stimuli")
    p.add_argument("--F", type=int, default=None, help="flop count")
    p.add_argument("--I", type=int, default=None, help="input count")
    p.add_argument("--O", type=int, default=None, help="output count")
    p.add_argument("--N", type=int, default=None, help="bench cycles")
    p.add_argument("--w", type=int, default=1, choices=[1, 2], help="verdict bits")
    p.add_argument("--out", default=None, help="JSON path (default: stdout)")
    p.set_defaults(func=cmd_footprint)

    p = sub.add_parser("compare", help="diff two per-fault reports")
    p.add_argument("report_a")
    p.add_argument("report_b")
    p.add_argument("-k", "--max-diffs", type=int, default=10)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("fixture", help="generate a seeded random fixture")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--F", type=int, required=True, help="flop count")
    p.add_argument("--gates", type=int, required=True)
    p.add_argument("--I", type=int, required=True, help="input count")
    p.add_argument("--O", type=int, required=True, help="output count")
    p.add_argument("--N", type=int, required=True, help="bench cycles")
    p.add_argument("--netlist-out", required=True)
    p.add_argument("--stimuli-out", required=True)
    p.set_defaults(func=cmd_fixture)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv, cost = extract_cost_flags(argv)
        parser = build_parser()
        args = parser.parse_args(argv)
        client = ServiceClient(args.server)
        return args.func(args, client, cost)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
