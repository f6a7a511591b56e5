#!/usr/bin/env python3
"""Walk the three shipped change requests through impact analysis.

Usage: python scripts/change_walkthrough.py [case-dir]

Runs against a scratch copy of the sample case so the checked-in
directory stays pristine, prints each report's stage and re-evaluated
evidence, and applies the stage-1 change at the end.
"""

import shutil
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import safecase as sc  # noqa: E402

REPO = Path(__file__).resolve().parents[1]


def show(report: sc.ImpactReport) -> None:
    print(f"  stage {report.stage}; matched nodes: {list(report.matched_nodes)}")
    for node, (before, after) in sorted(report.reevaluated.items()):
        print(f"  {node}: {before.value.value} -> {after.value.value}"
              + (f"  ({after.reason})" if after.value.value != "valid" else ""))
    print(f"  {report.rationale}")


def main() -> int:
    source = Path(sys.argv[1]) if len(sys.argv) > 1 else REPO / "sample-case"
    workdir = Path(tempfile.mkdtemp(prefix="safecase-demo-")) / "case"
    shutil.copytree(source, workdir)
    store = sc.CaseStore(workdir)

    stage_one = None
    for name in ("frame-rate-upgrade", "speed-increase", "detector-swap"):
        import json

        draft = json.loads((REPO / "sample-changes" / f"{name}.json").read_text())
        change = sc.ChangeRequest.create(
            source=sc.ChangeSource(draft["source"]),
            payload=draft.get("payload", ""),
            tags=draft.get("tags", []),
            param_updates=draft.get("param_updates") or {},
            structural=bool(draft.get("structural", False)),
        )
        sc.open_change(store, change)
        case = store.load()
        report = sc.impact(
            case, change, store.load_artifacts(case), store.attestations()
        )
        print(f"\n== {name} ({change.id})")
        show(report)
        if report.stage == 1:
            stage_one = (change, report)

    if stage_one is not None:
        change, report = stage_one
        print(f"\n== applying stage-1 change {change.id}")
        new_case = sc.apply_and_persist(store, change, report)
        print(f"  frame_rate is now {new_case.env.value('frame_rate'):g} Hz, "
              f"braking window {new_case.env.value('t_b_agv'):g} s")
        statuses, status_map = sc.case_status(
            new_case, store.load_artifacts(new_case), store.attestations()
        )
        print(f"  root after apply: {status_map[new_case.tree.root].value}")
        print(f"  snapshots: {[s['label'] for s in store.list_snapshots()]}")
    print(f"\nscratch case left at {workdir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
