"""Change intake, tag-driven impact analysis, and staged incorporation.

`impact` is a pure what-if: it never touches the stored case. It finds
nodes matched by the change's tags, closes the proposed parameter
updates over derived parameters and scenario links, re-evaluates every
leaf whose inputs actually change (regenerating simulated traces under
the candidate environment), propagates statuses, and classifies the
change into one of three incorporation stages:

  1. every evidence stays valid: parameters can be updated in place;
  2. some evidence fails but each failing one declares an improvement
     action (collect data, retest, rerun tool);
  3. the proposer flagged a structural change, or a failing evidence has
     no declared way back: the argument itself needs human rework.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Mapping, Optional, Sequence

from . import formula as F
from .env import ParameterEnv
from .errors import EmptyChange, StageNotOne, StaleReport
from .evidence import (
    Attestation,
    EvidenceBinding,
    EvidenceStatus,
    FormulaBinding,
    Remediation,
    binding_inputs_hash,
    evaluate_evidence,
)
from .gsn import Status, leaves, propagate_status
from .kinematics import scenario_from_doc, scenario_linked_params, simulate_fp_braking
from .store import (
    Case,
    CaseStore,
    Snapshot,
    TagQuery,
    case_digest,
    digest,
    query_tags,
    snapshot,
)
from .trace import Trace, write_csv


class ChangeSource(enum.Enum):
    INCIDENT_REPORT = "incident_report"
    CONTEXT_EVOLUTION = "context_evolution"
    MONITORING_EVENT = "monitoring_event"


@dataclass(frozen=True)
class ChangeRequest:
    id: str
    source: ChangeSource
    payload: str
    tags: frozenset[str]
    param_updates: Mapping[str, float]
    structural: bool
    created_at: str
    state: str = "open"

    @staticmethod
    def create(
        source: ChangeSource,
        payload: str,
        tags: Sequence[str] = (),
        param_updates: Optional[Mapping[str, float]] = None,
        structural: bool = False,
    ) -> "ChangeRequest":
        from .gsn import normalize_tag

        norm_tags = frozenset(normalize_tag(t) for t in tags if t.strip())
        updates = dict(param_updates or {})
        if not norm_tags and not updates and not structural:
            raise EmptyChange(
                "a change request needs tags, parameter updates, or the "
                "structural flag"
            )
        content = {
            "source": source.value,
            "payload": payload,
            "tags": sorted(norm_tags),
            "param_updates": {k: float(v) for k, v in sorted(updates.items())},
            "structural": structural,
        }
        return ChangeRequest(
            id="ch-" + digest(content)[:12],
            source=source,
            payload=payload,
            tags=norm_tags,
            param_updates=content["param_updates"],
            structural=structural,
            created_at=datetime.now(timezone.utc).isoformat(),
        )

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "source": self.source.value,
            "payload": self.payload,
            "tags": sorted(self.tags),
            "param_updates": dict(self.param_updates),
            "structural": self.structural,
            "created_at": self.created_at,
            "state": self.state,
        }

    @staticmethod
    def from_doc(doc: Mapping) -> "ChangeRequest":
        return ChangeRequest(
            id=doc["id"],
            source=ChangeSource(doc["source"]),
            payload=doc.get("payload", ""),
            tags=frozenset(doc.get("tags", [])),
            param_updates={
                k: float(v) for k, v in (doc.get("param_updates") or {}).items()
            },
            structural=bool(doc.get("structural", False)),
            created_at=doc.get("created_at", ""),
            state=doc.get("state", "open"),
        )


@dataclass(frozen=True)
class ImpactReport:
    change_id: str
    base_case_digest: str
    matched_nodes: tuple[str, ...]
    reevaluated: Mapping[str, tuple[EvidenceStatus, EvidenceStatus]]
    status_map: Mapping[str, Status]
    stage: int
    rationale: str

    def to_doc(self) -> dict:
        """Deterministic document form (no wall-clock fields)."""
        return {
            "change_id": self.change_id,
            "base_case_digest": self.base_case_digest,
            "matched_nodes": list(self.matched_nodes),
            "reevaluated": {
                node: {
                    "before": before.to_doc(with_timestamp=False),
                    "after": after.to_doc(with_timestamp=False),
                }
                for node, (before, after) in sorted(self.reevaluated.items())
            },
            "status_map": {
                node: status.value
                for node, status in sorted(self.status_map.items())
            },
            "stage": self.stage,
            "rationale": self.rationale,
        }


def classify(
    structural: bool,
    leaf_values: Mapping[str, Status],
    remediations: Mapping[str, Optional[Remediation]],
) -> int:
    """Map (structural flag, leaf statuses, declared remediations) to a stage."""
    failing = [n for n, s in leaf_values.items() if s is not Status.VALID]
    if structural:
        return 3
    if not failing:
        return 1
    if any(remediations.get(n) is None for n in failing):
        return 3
    return 2


# --- evaluation over a whole case ----------------------------------------------


def leaf_statuses(
    case: Case,
    artifacts: Mapping[str, object],
    attestations: Mapping[str, Sequence[Attestation]],
    env: Optional[ParameterEnv] = None,
) -> dict[str, EvidenceStatus]:
    """Evaluate every bound leaf; unbound leaves come back UNKNOWN."""
    env = env if env is not None else case.env
    env_values = env.as_dict()
    statuses: dict[str, EvidenceStatus] = {}
    for node_id in leaves(case.tree):
        binding = case.bindings.get(node_id)
        if binding is None:
            statuses[node_id] = EvidenceStatus(
                Status.UNKNOWN,
                "no evidence binding",
                datetime.now(timezone.utc).isoformat(),
                "",
            )
            continue
        statuses[node_id] = evaluate_evidence(
            binding, env_values, artifacts, attestations.get(node_id, ())
        )
    return statuses


def case_status(
    case: Case,
    artifacts: Mapping[str, object],
    attestations: Mapping[str, Sequence[Attestation]],
) -> tuple[dict[str, EvidenceStatus], dict[str, Status]]:
    statuses = leaf_statuses(case, artifacts, attestations)
    propagated = propagate_status(
        case.tree, {n: s.value for n, s in statuses.items()}
    )
    return statuses, propagated


# --- impact analysis ----------------------------------------------------------


def binding_dependencies(
    case: Case, binding: EvidenceBinding, artifacts: Mapping[str, object]
) -> frozenset[str]:
    """Parameter names this binding's evaluation can depend on.

    Formula bindings depend on their free parameters plus, when their
    trace is regenerated from a scenario, every parameter the scenario
    document links. Metric and manual bindings depend on no parameters.
    """
    if not isinstance(binding, FormulaBinding):
        return frozenset()
    try:
        params, _ = F.free_symbols(F.parse_formula(binding.formula))
    except Exception:
        params = frozenset()
    names = set(params)
    scenario_name = _generator_of(case, binding.trace_ref)
    if scenario_name is not None:
        doc = artifacts.get(scenario_name)
        if isinstance(doc, dict):
            names |= scenario_linked_params(doc)
    return frozenset(names)


def _generator_of(case: Case, trace_ref: Optional[str]) -> Optional[str]:
    if trace_ref is None:
        return None
    ref = case.artifacts.get(trace_ref)
    if ref is None or ref.kind != "trace":
        return None
    return ref.generated_from


def _regenerate_traces(
    case: Case,
    env: ParameterEnv,
    artifacts: Mapping[str, object],
    only: Optional[set[str]] = None,
) -> dict[str, Trace]:
    """Re-simulate scenario-generated trace artifacts under `env`."""
    regenerated: dict[str, Trace] = {}
    env_values = env.as_dict()
    for name, ref in case.artifacts.items():
        if ref.kind != "trace" or ref.generated_from is None:
            continue
        if only is not None and name not in only:
            continue
        doc = artifacts.get(ref.generated_from)
        if not isinstance(doc, dict):
            continue
        scenario = scenario_from_doc(doc, env_values)
        regenerated[name] = simulate_fp_braking(scenario)
    return regenerated


def impact(
    case: Case,
    change: ChangeRequest,
    artifacts: Mapping[str, object],
    attestations: Optional[Mapping[str, Sequence[Attestation]]] = None,
) -> ImpactReport:
    """Side-effect-free what-if analysis of a change against a case."""
    attestations = attestations or {}
    candidate_env = case.env.with_updates(change.param_updates)

    matched = (
        query_tags(case, TagQuery(mode="any", tags=change.tags))
        if change.tags
        else []
    )

    # close updates over derived parameters; scenario links are handled
    # per binding below
    affected = case.env.derivation_dependents(set(change.param_updates))

    leaf_ids = leaves(case.tree)
    matched_set = set(matched)
    current = leaf_statuses(case, artifacts, attestations)

    # candidate traces for re-simulation, regenerated lazily per binding
    candidate_traces: dict[str, Trace] = {}

    reevaluated: dict[str, tuple[EvidenceStatus, EvidenceStatus]] = {}
    final_values: dict[str, Status] = {}
    env_values = case.env.as_dict()
    candidate_values = candidate_env.as_dict()

    for node_id in leaf_ids:
        binding = case.bindings.get(node_id)
        final_values[node_id] = current[node_id].value
        if binding is None:
            continue
        deps = binding_dependencies(case, binding, artifacts)
        is_candidate = bool(deps & affected) or node_id in matched_set
        if not is_candidate:
            continue

        candidate_artifacts = dict(artifacts)
        scenario_name = _generator_of(
            case, getattr(binding, "trace_ref", None)
        )
        if scenario_name is not None:
            trace_ref = binding.trace_ref
            if trace_ref not in candidate_traces:
                candidate_traces.update(
                    _regenerate_traces(
                        case, candidate_env, artifacts, only={trace_ref}
                    )
                )
            if trace_ref in candidate_traces:
                candidate_artifacts[trace_ref] = candidate_traces[trace_ref]

        history = attestations.get(node_id, ())
        before_hash = binding_inputs_hash(
            binding, env_values, artifacts, history
        )
        after_hash = binding_inputs_hash(
            binding, candidate_values, candidate_artifacts, history
        )
        if before_hash == after_hash:
            continue  # inputs unchanged; current status stands

        after = evaluate_evidence(
            binding, candidate_values, candidate_artifacts, history
        )
        reevaluated[node_id] = (current[node_id], after)
        final_values[node_id] = after.value

    status_map = propagate_status(case.tree, final_values)
    remediations = {
        node_id: getattr(case.bindings.get(node_id), "remediation", None)
        for node_id in leaf_ids
    }
    stage = classify(change.structural, final_values, remediations)
    rationale = _rationale(change, reevaluated, final_values, remediations, stage)

    return ImpactReport(
        change_id=change.id,
        base_case_digest=case_digest(case),
        matched_nodes=tuple(matched),
        reevaluated=reevaluated,
        status_map=status_map,
        stage=stage,
        rationale=rationale,
    )


def _rationale(
    change: ChangeRequest,
    reevaluated: Mapping[str, tuple[EvidenceStatus, EvidenceStatus]],
    final_values: Mapping[str, Status],
    remediations: Mapping[str, Optional[Remediation]],
    stage: int,
) -> str:
    failing = sorted(
        n for n, s in final_values.items() if s is not Status.VALID
    )
    parts = [
        f"{len(reevaluated)} evidence item(s) re-evaluated under the "
        f"candidate parameters"
    ]
    if change.structural:
        parts.append("change is flagged structural")
    if failing:
        described = []
        for n in failing:
            rem = remediations.get(n)
            described.append(
                f"{n} ({final_values[n].value}"
                + (f", remediation: {rem.action}" if rem else ", no remediation")
                + ")"
            )
        parts.append("not demonstrably valid: " + "; ".join(described))
    else:
        parts.append("every evidence item remains valid")
    if stage == 1:
        parts.append("stage 1: parameters can be applied in place")
    elif stage == 2:
        parts.append("stage 2: declared improvement actions can restore validity")
    else:
        parts.append("stage 3: the argument structure needs human rework")
    return "; ".join(parts)


# --- applying a stage-1 change ---------------------------------------------------


@dataclass(frozen=True)
class ApplyResult:
    case: Case
    pre_change_snapshot: Snapshot
    regenerated_traces: Mapping[str, str]  # artifact name -> csv text
    change: ChangeRequest


def apply_change(
    case: Case,
    change: ChangeRequest,
    report: ImpactReport,
    artifacts: Mapping[str, object],
) -> ApplyResult:
    """Produce the updated case for a stage-1 report (pure; no persistence)."""
    if report.stage != 1:
        raise StageNotOne(
            f"only stage-1 reports can be applied directly; this one is "
            f"stage {report.stage}"
        )
    current_digest = case_digest(case)
    if report.base_case_digest != current_digest:
        raise StaleReport(
            "the case changed after this report was computed; re-run impact"
        )
    if report.change_id != change.id:
        raise StaleReport(
            f"report belongs to change {report.change_id}, not {change.id}"
        )

    pre = snapshot(case, label=f"pre-{change.id}")
    new_env = case.env.with_updates(change.param_updates)
    regenerated = _regenerate_traces(case, new_env, artifacts)

    from dataclasses import replace as dc_replace
    import hashlib

    new_artifacts = dict(case.artifacts)
    csv_blobs: dict[str, str] = {}
    for name, trace in regenerated.items():
        csv_text = write_csv(trace)
        csv_blobs[name] = csv_text
        new_artifacts[name] = dc_replace(
            case.artifacts[name],
            sha256=hashlib.sha256(csv_text.encode("utf-8")).hexdigest(),
        )

    new_case = Case(
        tree=case.tree,
        env=new_env,
        bindings=case.bindings,
        artifacts=new_artifacts,
        metadata=case.metadata,
    )
    closed = ChangeRequest(
        id=change.id,
        source=change.source,
        payload=change.payload,
        tags=change.tags,
        param_updates=change.param_updates,
        structural=change.structural,
        created_at=change.created_at,
        state="closed",
    )
    return ApplyResult(
        case=new_case,
        pre_change_snapshot=pre,
        regenerated_traces=csv_blobs,
        change=closed,
    )


# --- store-level orchestration --------------------------------------------------


def open_change(store: CaseStore, change: ChangeRequest) -> ChangeRequest:
    """Persist a change request in state open (idempotent by content id)."""
    existing = None
    try:
        existing = store.read_change(change.id)
    except Exception:
        pass
    if existing is None:
        store.write_change({**change.to_doc(), "reports": []})
    return change


def record_report(store: CaseStore, report: ImpactReport) -> dict:
    """Attach a what-if report to its persisted change (deduplicated)."""
    doc = store.read_change(report.change_id)
    report_doc = report.to_doc()
    reports = doc.setdefault("reports", [])
    if report_doc not in reports:
        reports.append(report_doc)
    store.write_change(doc)
    return report_doc


def apply_and_persist(
    store: CaseStore, change: ChangeRequest, report: ImpactReport
) -> Case:
    """Apply a stage-1 change to the stored case under the writer lock."""
    with store.writer_lock():
        case = store.load()
        artifacts = store.load_artifacts(case)
        result = apply_change(case, change, report, artifacts)
        store.write_snapshot(result.pre_change_snapshot)
        new_refs = dict(result.case.artifacts)
        for name, csv_text in result.regenerated_traces.items():
            new_refs[name] = store.write_artifact(case, name, csv_text)
        final_case = Case(
            tree=result.case.tree,
            env=result.case.env,
            bindings=result.case.bindings,
            artifacts=new_refs,
            metadata=result.case.metadata,
        )
        store.save(final_case)
        try:
            doc = store.read_change(change.id)
        except Exception:
            doc = {**result.change.to_doc(), "reports": []}
        doc["state"] = "closed"
        doc["applied_report"] = report.to_doc()
        store.write_change(doc)
        return final_case
