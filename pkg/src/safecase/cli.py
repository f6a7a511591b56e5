"""Command-line interface around the case engine.

Exit codes: 0 success, 1 validation/evaluation found something invalid
(or a change needs more than a parameter update), 2 usage or input
errors. The case directory argument falls back to $SAFECASE_CASE.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import change as change_mod
from .change import ChangeRequest, ChangeSource, impact, open_change, record_report
from .errors import SafecaseError
from .evaluator import check_monotone
from .gsn import Status
from .kinematics import scenario_from_doc, simulate_fp_braking
from .store import CaseStore, TagQuery, diff_snapshots, query_tags, snapshot
from .trace import write_csv

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2


def _case_dir(value: Optional[str]) -> Path:
    chosen = value or os.environ.get("SAFECASE_CASE")
    if not chosen:
        raise SafecaseError(
            "no case directory given (argument or $SAFECASE_CASE)"
        )
    return Path(chosen)


def _print_json(doc) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False))


def _load_change_request(path: Path) -> ChangeRequest:
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SafecaseError(f"change file not found: {path}")
    except json.JSONDecodeError as exc:
        raise SafecaseError(f"change file is not valid JSON: {exc}")
    if "id" in doc:
        return ChangeRequest.from_doc(doc)
    return ChangeRequest.create(
        source=ChangeSource(doc["source"]),
        payload=doc.get("payload", ""),
        tags=doc.get("tags", []),
        param_updates=doc.get("param_updates") or {},
        structural=bool(doc.get("structural", False)),
    )


# --- subcommands ------------------------------------------------------------


def cmd_validate(args) -> int:
    store = CaseStore(_case_dir(args.case))
    case = store.load(verify_artifacts=True)
    store.load_artifacts(case)  # parses every artifact
    print(
        f"case '{case.metadata.name}' ok: {len(case.tree.nodes)} nodes, "
        f"{len(case.tree.edges)} edges, {len(case.bindings)} bindings, "
        f"{len(case.artifacts)} artifacts"
    )
    return EXIT_OK


def cmd_status(args) -> int:
    store = CaseStore(_case_dir(args.case))
    case = store.load()
    artifacts = store.load_artifacts(case)
    attestations = store.attestations()
    statuses, status_map = change_mod.case_status(case, artifacts, attestations)

    width = max(4, max(len(n) for n in case.tree.nodes))
    print(f"{'node':<{width}}  {'kind':<13} {'status':<8} detail")
    for node_id in sorted(case.tree.nodes):
        node = case.tree.nodes[node_id]
        value = status_map[node_id]
        detail = statuses[node_id].reason if node_id in statuses else ""
        print(
            f"{node_id:<{width}}  {node.kind.value:<13} "
            f"{value.value:<8} {detail}"
        )
    root = status_map[case.tree.root]
    print(f"root {case.tree.root}: {root.value}")
    invalid = any(s is Status.INVALID for s in status_map.values())
    return EXIT_INVALID if invalid else EXIT_OK


def cmd_query(args) -> int:
    store = CaseStore(_case_dir(args.case))
    case = store.load(verify_artifacts=False)
    tags = [t for t in (args.tags or "").split(",") if t.strip()]
    query = TagQuery(mode="all" if args.all else "any", tags=frozenset(tags))
    for node_id in query_tags(case, query):
        print(node_id)
    return EXIT_OK


def cmd_impact(args) -> int:
    store = CaseStore(_case_dir(args.case))
    case = store.load()
    artifacts = store.load_artifacts(case)
    attestations = store.attestations()
    request = _load_change_request(Path(args.change_file))
    open_change(store, request)
    report = impact(case, request, artifacts, attestations)
    report_doc = record_report(store, report)
    _print_json(report_doc)
    return EXIT_OK if report.stage == 1 else EXIT_INVALID


def cmd_apply(args) -> int:
    store = CaseStore(_case_dir(args.case))
    request = _load_change_request(Path(args.change_file))
    try:
        report_doc = json.loads(
            Path(args.report_file).read_text(encoding="utf-8")
        )
    except FileNotFoundError:
        raise SafecaseError(f"report file not found: {args.report_file}")
    except json.JSONDecodeError as exc:
        raise SafecaseError(f"report file is not valid JSON: {exc}")
    report = _report_from_doc(report_doc)
    new_case = change_mod.apply_and_persist(store, request, report)
    print(
        f"applied {request.id}: environment updated, pre-change snapshot "
        f"written, case version {new_case.metadata.version}"
    )
    return EXIT_OK


def _report_from_doc(doc) -> change_mod.ImpactReport:
    from .evidence import EvidenceStatus

    def status_from(sub) -> EvidenceStatus:
        return EvidenceStatus(
            value=Status(sub["value"]),
            reason=sub.get("reason", ""),
            evaluated_at=sub.get("evaluated_at", ""),
            inputs_hash=sub.get("inputs_hash", ""),
        )

    try:
        return change_mod.ImpactReport(
            change_id=doc["change_id"],
            base_case_digest=doc["base_case_digest"],
            matched_nodes=tuple(doc.get("matched_nodes", [])),
            reevaluated={
                node: (status_from(pair["before"]), status_from(pair["after"]))
                for node, pair in (doc.get("reevaluated") or {}).items()
            },
            status_map={
                node: Status(value)
                for node, value in (doc.get("status_map") or {}).items()
            },
            stage=int(doc["stage"]),
            rationale=doc.get("rationale", ""),
        )
    except KeyError as exc:
        raise SafecaseError(f"impact report is missing field {exc}")


def cmd_snapshot(args) -> int:
    store = CaseStore(_case_dir(args.case))
    with store.writer_lock():
        case = store.load()
        snap = snapshot(case, label=args.label)
        store.write_snapshot(snap)
    print(snap.id)
    return EXIT_OK


def cmd_diff(args) -> int:
    store = CaseStore(_case_dir(args.case))
    a = store.load_snapshot(args.snapshot_a)
    b = store.load_snapshot(args.snapshot_b)
    changes = diff_snapshots(a, b)
    _print_json(changes.to_doc())
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        doc = json.loads(Path(args.scenario_file).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SafecaseError(f"scenario file not found: {args.scenario_file}")
    except json.JSONDecodeError as exc:
        raise SafecaseError(f"scenario file is not valid JSON: {exc}")
    env = None
    if args.case or os.environ.get("SAFECASE_CASE"):
        try:
            case = CaseStore(_case_dir(args.case)).load(verify_artifacts=False)
            env = case.env.as_dict()
        except SafecaseError:
            if args.case:
                raise
    scenario = scenario_from_doc(doc, env)
    trace = simulate_fp_braking(scenario)
    csv_text = write_csv(trace)
    if args.output and args.output != "-":
        Path(args.output).write_text(csv_text, encoding="utf-8")
        print(f"wrote {len(trace)} samples to {args.output}")
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def cmd_monotone(args) -> int:
    env = json.loads(args.env) if args.env else {}
    report = check_monotone(
        args.term,
        param=args.param,
        lo=args.lo,
        hi=args.hi,
        samples=args.samples,
        direction=args.direction,
        env=env,
    )
    _print_json(report.to_doc())
    return EXIT_OK if report.holds else EXIT_INVALID


def cmd_serve(args) -> int:
    from .server import serve

    serve(_case_dir(args.case), port=args.port, ui_dir=args.ui)
    return EXIT_OK


# --- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="safecase",
        description="Evaluable safety cases with tag-driven change impact.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="Structural and binding checks")
    p.add_argument("case", nargs="?", help="case directory")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("status", help="Evaluate all leaves and propagate")
    p.add_argument("case", nargs="?")
    p.set_defaults(func=cmd_status)

    p = sub.add_parser("query", help="Find nodes by semantic tags")
    p.add_argument("case", nargs="?")
    p.add_argument("--tags", required=True, help="comma-separated tags")
    p.add_argument(
        "--all", action="store_true", help="require all tags (default: any)"
    )
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("impact", help="What-if analysis of a change request")
    p.add_argument("case", nargs="?")
    p.add_argument("change_file", help="change request JSON")
    p.set_defaults(func=cmd_impact)

    p = sub.add_parser("apply", help="Apply a stage-1 change to the case")
    p.add_argument("case", nargs="?")
    p.add_argument("change_file")
    p.add_argument("report_file", help="impact report JSON produced by 'impact'")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("snapshot", help="Write a content-addressed snapshot")
    p.add_argument("case", nargs="?")
    p.add_argument("--label", required=True)
    p.set_defaults(func=cmd_snapshot)

    p = sub.add_parser("diff", help="Compare two snapshots")
    p.add_argument("case", nargs="?")
    p.add_argument("snapshot_a")
    p.add_argument("snapshot_b")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("simulate", help="Run a braking scenario to a trace CSV")
    p.add_argument("scenario_file")
    p.add_argument("-o", "--output", help="output CSV path (default stdout)")
    p.add_argument(
        "--case", help="case directory to resolve linked parameters"
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("monotone", help="Sampled monotonicity check of a term")
    p.add_argument("term")
    p.add_argument("--param", required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--samples", type=int, default=25)
    p.add_argument(
        "--direction", choices=["increasing", "decreasing"], required=True
    )
    p.add_argument("--env", help="other parameters as a JSON object")
    p.set_defaults(func=cmd_monotone)

    p = sub.add_parser("serve", help="Serve the HTTP/JSON API for a case")
    p.add_argument("case", nargs="?")
    p.add_argument("--port", type=int, default=8077)
    p.add_argument("--ui", help="directory of static UI assets to serve")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except SafecaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
