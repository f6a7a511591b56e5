"""The worked AGV false-positive-braking sample case.

A small but complete argument for an automated guided vehicle whose
ML-based object detector can report phantom obstacles and trigger
emergency stops. The rear-collision branch formalizes the stop-safety
claim as an evaluable formula over a simulated braking trace; the other
branches mix metric-backed and manually attested evidence so every
binding kind is exercised.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Union

from .env import ParamEntry, ParameterEnv
from .evidence import (
    Attestation,
    FormulaBinding,
    ManualBinding,
    MetricBinding,
    Remediation,
)
from .gsn import EdgeKind, GsnEdge, GsnNode, NodeKind, Status, build_tree
from .kinematics import scenario_from_doc, simulate_fp_braking
from .store import ArtifactRef, Case, CaseMetadata, CaseStore, save_case
from .trace import write_csv

#: the stop-safety property: whenever the rear agent keeps the assumed
#: separation and a phantom detection triggers a stop, the gap stays
#: positive for the whole worst-case braking window
STOP_SAFETY_FORMULA = (
    "forall t in trace: "
    "(d_agv_rear(t) >= d_b_rear and fp_ml(t) and detected_fusion(t)) -> "
    "(forall t2 in [t, t + t_b_agv]: d_agv_rear(t2) > 0)"
)

#: worst-case stopping distance against the facility layout budget
STOP_DISTANCE_FORMULA = (
    "v_agv * (1 / frame_rate + t_proc) "
    "+ v_agv * v_agv / (2 * decel_agv) <= d_stop_budget"
)

#: worst-case braking window: one detection frame, processing, physical stop
BRAKING_WINDOW_DERIVATION = "1 / frame_rate + t_proc + v_agv / decel_agv"

SCENARIO_DOC = {
    "kind": "fp_scenario",
    "agv": {
        "v0": {"param": "v_agv"},
        "decel": {"param": "decel_agv"},
        "t_react": {"value": 0.0},
    },
    "rear": {
        "v0": {"param": "v_agv"},  # fleet traffic shares the line speed
        "decel": {"param": "decel_rear"},
        "t_react": {"param": "t_react_rear"},
    },
    "gap0": {"param": "gap0_rear"},
    "frame_rate": {"param": "frame_rate"},
    "t_proc": {"param": "t_proc"},
    "t_fp": {"value": 1.0},
    "dt": {"value": 0.01},
    "horizon": {"value": 6.0},
    "fusion_confirms": True,
}

METRIC_REPORT_DOC = {
    "tool": "ml-dependability-scan 0.4.1",
    "produced_at": "2026-05-05T16:20:00+00:00",
    "metrics": {
        "scenario_coverage": 0.95,
        "ood_coverage": 0.87,
        "false_negative_rate": 0.004,
    },
    "provenance": "offline evaluation on shop-floor dataset v3 (run 118)",
}

SAMPLE_ATTESTATIONS = [
    Attestation(
        evidence_id="A1",
        status=Status.VALID,
        by="m.fischer",
        role="safety_engineer",
        at="2026-05-04T09:12:00+00:00",
        note="traffic rule TR-12 posted at every corridor entry and audited",
    ),
    Attestation(
        evidence_id="A2",
        status=Status.VALID,
        by="d.rao",
        role="data_engineer",
        at="2026-05-06T14:30:00+00:00",
        note="dataset v3 matches SF-1 lighting, floor markings and load mix",
    ),
    Attestation(
        evidence_id="A3",
        status=Status.VALID,
        by="k.osei",
        role="operations",
        at="2026-05-07T08:05:00+00:00",
        note="watchdog interlock verified during commissioning",
    ),
]


def sample_env() -> ParameterEnv:
    return ParameterEnv(
        [
            ParamEntry("v_agv", 2.0, "m/s"),
            ParamEntry("decel_agv", 2.0, "m/s^2"),
            ParamEntry("decel_rear", 2.0, "m/s^2"),
            ParamEntry("t_react_rear", 0.5, "s"),
            ParamEntry("frame_rate", 10.0, "Hz"),
            ParamEntry("t_proc", 0.1, "s"),
            ParamEntry("gap0_rear", 1.5, "m"),
            ParamEntry("d_b_rear", 1.0, "m"),
            ParamEntry("d_stop_budget", 3.0, "m"),
            ParamEntry("t_b_agv", 1.2, "s", derived=BRAKING_WINDOW_DERIVATION),
        ]
    )


def sample_nodes() -> list[GsnNode]:
    G, S, SN = NodeKind.GOAL, NodeKind.STRATEGY, NodeKind.SOLUTION
    A, C, J = NodeKind.ASSUMPTION, NodeKind.CONTEXT, NodeKind.JUSTIFICATION
    return [
        GsnNode(
            "G1",
            G,
            "The AGV's ML-based object detection is acceptably safe on "
            "shop floor SF-1.",
        ),
        GsnNode(
            "C1",
            C,
            "Operating context: shop floor SF-1, shared corridors, nominal "
            "line speed v_agv.",
            tags={"shop floor", "corridor"},
        ),
        GsnNode(
            "S1",
            S,
            "Argue over each class of detector insufficiency and its "
            "operational effect.",
        ),
        GsnNode(
            "J1",
            J,
            "The decomposition covers every detector insufficiency class "
            "identified in hazard analysis HA-7.",
            tags={"hazard analysis"},
        ),
        GsnNode(
            "G2",
            G,
            "A false positive of the detector is a performance nuisance, "
            "not a safety hazard.",
        ),
        GsnNode(
            "G3",
            G,
            "An emergency stop triggered by a false positive cannot cause "
            "a rear-end collision.",
        ),
        GsnNode(
            "A1",
            A,
            "Rear agents keep at least d_b_rear separation when following "
            "the AGV (site traffic rule TR-12).",
            tags={"rear-agent", "braking distance"},
            binding="A1",
        ),
        GsnNode(
            "C2",
            C,
            "d_agv_rear(t): measured gap between the AGV tail and the "
            "nearest rear agent (rear-facing rangefinder).",
            tags={"distance", "AGV", "rear-agent"},
        ),
        GsnNode(
            "C3",
            C,
            "fp_ml(t): the detector reported an object that is not "
            "actually present.",
            tags={"false positive", "detection"},
        ),
        GsnNode(
            "C4",
            C,
            "detected_fusion(t): sensor fusion confirms a close-by object "
            "ahead of the AGV.",
            tags={"fusion", "detection"},
        ),
        GsnNode(
            "C5",
            C,
            "t_b_agv: worst-case time from a phantom detection to "
            "standstill, derived from frame rate, processing latency, "
            "speed and deceleration.",
            tags={"AGV", "braking time", "frame rate"},
        ),
        GsnNode(
            "Sn1",
            SN,
            "Stop-safety property holds on the simulated emergency-braking "
            "scenario trace.",
            tags={"emergency stop", "simulation"},
            binding="Sn1",
        ),
        GsnNode(
            "G4",
            G,
            "Detector performance on shop-floor data meets the release "
            "thresholds.",
        ),
        GsnNode(
            "A2",
            A,
            "The offline evaluation dataset is representative of SF-1 "
            "conditions.",
            tags={"dataset", "representativeness"},
            binding="A2",
        ),
        GsnNode(
            "Sn2",
            SN,
            "Scenario coverage of the offline test suite meets the release "
            "threshold.",
            tags={"data completeness", "testing"},
            binding="Sn2",
        ),
        GsnNode(
            "G5",
            G,
            "The AGV halts within the facility's emergency-stop distance "
            "budget.",
        ),
        GsnNode(
            "Sn3",
            SN,
            "Worst-case stopping distance stays within the layout budget "
            "d_stop_budget.",
            tags={"stopping distance", "actuation"},
            binding="Sn3",
        ),
        GsnNode(
            "G6",
            G,
            "Runtime monitoring catches residual detector misbehaviour.",
        ),
        GsnNode(
            "A3",
            A,
            "The fusion watchdog is armed whenever the AGV moves.",
            tags={"watchdog", "runtime monitoring"},
            binding="A3",
        ),
        GsnNode(
            "Sn4",
            SN,
            "Out-of-distribution coverage of the runtime monitor meets the "
            "release threshold.",
            tags={"out-of-distribution", "monitoring"},
            binding="Sn4",
        ),
    ]


def sample_edges() -> list[GsnEdge]:
    SB, ICO = EdgeKind.SUPPORTED_BY, EdgeKind.IN_CONTEXT_OF
    return [
        GsnEdge("G1", "S1", SB),
        GsnEdge("G1", "C1", ICO),
        GsnEdge("S1", "J1", ICO),
        GsnEdge("S1", "G2", SB),
        GsnEdge("S1", "G4", SB),
        GsnEdge("S1", "G5", SB),
        GsnEdge("S1", "G6", SB),
        GsnEdge("G2", "G3", SB),
        GsnEdge("G3", "Sn1", SB),
        GsnEdge("G3", "A1", ICO),
        GsnEdge("G3", "C2", ICO),
        GsnEdge("G3", "C3", ICO),
        GsnEdge("G3", "C4", ICO),
        GsnEdge("G3", "C5", ICO),
        GsnEdge("G4", "Sn2", SB),
        GsnEdge("G4", "A2", ICO),
        GsnEdge("G5", "Sn3", SB),
        GsnEdge("G6", "Sn4", SB),
        GsnEdge("G6", "A3", ICO),
    ]


def sample_bindings() -> dict:
    return {
        "A1": ManualBinding(required_role="safety_engineer"),
        "A2": ManualBinding(required_role="data_engineer"),
        "A3": ManualBinding(required_role="operations"),
        "Sn1": FormulaBinding(
            formula=STOP_SAFETY_FORMULA,
            trace_ref="trace_fp_braking",
            remediation=Remediation(
                "retest",
                "re-run the braking scenario against the updated parameters "
                "and recorded shop-floor traces",
            ),
        ),
        "Sn2": MetricBinding(
            metric="scenario_coverage",
            comparator=">=",
            threshold=0.9,
            report_ref="dependability_report",
            remediation=Remediation(
                "collect_data",
                "extend the test suite with underrepresented scenarios",
            ),
        ),
        "Sn3": FormulaBinding(
            formula=STOP_DISTANCE_FORMULA,
            trace_ref=None,
            remediation=Remediation(
                "retest",
                "re-measure braking performance at the proposed operating "
                "point",
            ),
        ),
        "Sn4": MetricBinding(
            metric="ood_coverage",
            comparator=">=",
            threshold=0.8,
            report_ref="dependability_report",
            remediation=Remediation(
                "rerun_tool",
                "rerun the monitor calibration tool on current data",
            ),
        ),
    }


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def build_sample_case() -> tuple[Case, dict[str, str]]:
    """Construct the case and the artifact file contents (name -> text)."""
    env = sample_env()
    tree = build_tree(sample_nodes(), sample_edges(), root="G1")

    scenario_text = _dump(SCENARIO_DOC)
    trace = simulate_fp_braking(scenario_from_doc(SCENARIO_DOC, env.as_dict()))
    trace_text = write_csv(trace)
    report_text = _dump(METRIC_REPORT_DOC)

    blobs = {
        "fp_scenario": scenario_text,
        "trace_fp_braking": trace_text,
        "dependability_report": report_text,
    }
    paths = {
        "fp_scenario": "artifacts/fp_scenario.json",
        "trace_fp_braking": "artifacts/trace_fp_braking.csv",
        "dependability_report": "artifacts/dependability_report.json",
    }
    kinds = {
        "fp_scenario": "scenario",
        "trace_fp_braking": "trace",
        "dependability_report": "metric_report",
    }
    artifacts = {
        name: ArtifactRef(
            path=paths[name],
            sha256=hashlib.sha256(blobs[name].encode("utf-8")).hexdigest(),
            kind=kinds[name],
            generated_from="fp_scenario" if name == "trace_fp_braking" else None,
        )
        for name in blobs
    }

    case = Case(
        tree=tree,
        env=env,
        bindings=sample_bindings(),
        artifacts=artifacts,
        metadata=CaseMetadata(
            name="agv-fp-braking",
            version="1.0.0",
            description=(
                "Safety argument for the SF-1 AGV fleet's vision-based "
                "emergency braking, with evaluable stop-safety evidence."
            ),
        ),
    )
    return case, blobs


def write_sample_case(case_dir: Union[str, Path]) -> Path:
    """Materialize the sample case directory (case, artifacts, attestations)."""
    case_dir = Path(case_dir)
    case, blobs = build_sample_case()
    save_case(case, case_dir)
    store = CaseStore(case_dir)
    for name, text in blobs.items():
        target = case_dir / case.artifacts[name].path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    log = case_dir / "attestations.jsonl"
    if log.exists():  # the builder produces a fresh log, not an append
        log.unlink()
    for attestation in SAMPLE_ATTESTATIONS:
        store.append_attestation(attestation)
    return case_dir
