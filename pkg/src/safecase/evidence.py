"""Evidence bindings and their evaluation to a three-valued status.

A binding says how a leaf's validity is demonstrated: a formula over
parameters and (optionally) a trace, a threshold on a metric from an
ingested tool report, or a manual attestation by a named role. Every
status records a digest of exactly the inputs it was computed from so
staleness is detectable.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Mapping, Optional, Sequence, Union

from . import formula as F
from .errors import (
    MalformedReport,
    MissingTrace,
    NonFiniteValue,
    ParseFailure,
    RoleMismatch,
    WrongBindingKind,
)
from .evaluator import evaluate_detailed
from .gsn import Status
from .trace import Trace, write_csv
from .tribool import TriBool

_COMPARATORS = {
    ">=": lambda a, b: a >= b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    "<": lambda a, b: a < b,
    "==": lambda a, b: a == b,
}

REMEDIATION_ACTIONS = ("collect_data", "retest", "rerun_tool")


@dataclass(frozen=True)
class Remediation:
    """Improvement action declared for restoring an invalid evidence."""

    action: str  # one of REMEDIATION_ACTIONS
    description: str = ""

    def __post_init__(self):
        if self.action not in REMEDIATION_ACTIONS:
            raise ValueError(f"unknown remediation action {self.action!r}")


@dataclass(frozen=True)
class FormulaBinding:
    formula: str
    trace_ref: Optional[str] = None
    remediation: Optional[Remediation] = None
    kind = "formula"


@dataclass(frozen=True)
class MetricBinding:
    metric: str
    comparator: str
    threshold: float
    report_ref: str
    remediation: Optional[Remediation] = None
    kind = "metric"

    def __post_init__(self):
        if self.comparator not in _COMPARATORS:
            raise ValueError(f"unknown comparator {self.comparator!r}")
        if not math.isfinite(self.threshold):
            raise ValueError("threshold must be finite")


@dataclass(frozen=True)
class ManualBinding:
    required_role: str
    remediation: Optional[Remediation] = None
    kind = "manual"


EvidenceBinding = Union[FormulaBinding, MetricBinding, ManualBinding]


@dataclass(frozen=True)
class MetricReport:
    tool: str
    produced_at: str
    metrics: Mapping[str, float]
    provenance: str = ""
    extras: Mapping[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class Attestation:
    evidence_id: str
    status: Status  # VALID or INVALID only
    by: str
    role: str
    at: str  # RFC-3339 timestamp
    note: str = ""

    def __post_init__(self):
        if self.status is Status.UNKNOWN:
            raise ValueError("attestations assert valid or invalid, not unknown")


@dataclass(frozen=True)
class EvidenceStatus:
    value: Status
    reason: str
    evaluated_at: str
    inputs_hash: str

    def to_doc(self, with_timestamp: bool = True) -> dict:
        doc = {
            "value": self.value.value,
            "reason": self.reason,
            "inputs_hash": self.inputs_hash,
        }
        if with_timestamp:
            doc["evaluated_at"] = self.evaluated_at
        return doc


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _digest(payload: object) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def trace_digest(trace: Trace) -> str:
    return hashlib.sha256(write_csv(trace).encode("utf-8")).hexdigest()


def report_digest(report: MetricReport) -> str:
    return _digest(
        {
            "tool": report.tool,
            "produced_at": report.produced_at,
            "metrics": dict(sorted(report.metrics.items())),
        }
    )


def binding_inputs_hash(
    binding: EvidenceBinding,
    env: Mapping[str, float],
    artifacts: Mapping[str, object],
    attestations: Sequence[Attestation] = (),
) -> str:
    """Digest of exactly the inputs the binding's evaluation depends on."""
    if isinstance(binding, FormulaBinding):
        try:
            params, _ = F.free_symbols(F.parse_formula(binding.formula))
        except Exception:
            params = frozenset()
        trace = artifacts.get(binding.trace_ref) if binding.trace_ref else None
        payload = {
            "kind": "formula",
            "formula": binding.formula,
            "params": {p: env.get(p) for p in sorted(params)},
            "trace": trace_digest(trace) if isinstance(trace, Trace) else None,
        }
    elif isinstance(binding, MetricBinding):
        report = artifacts.get(binding.report_ref)
        payload = {
            "kind": "metric",
            "metric": binding.metric,
            "comparator": binding.comparator,
            "threshold": binding.threshold,
            "report": report_digest(report)
            if isinstance(report, MetricReport)
            else None,
        }
    else:
        payload = {
            "kind": "manual",
            "required_role": binding.required_role,
            "log": [
                [a.status.value, a.by, a.role, a.at, a.note]
                for a in attestations
            ],
        }
    return _digest(payload)


def evaluate_evidence(
    binding: EvidenceBinding,
    env: Mapping[str, float],
    artifacts: Mapping[str, object],
    attestations: Sequence[Attestation] = (),
) -> EvidenceStatus:
    """Turn a binding into a status. Missing inputs degrade to UNKNOWN."""
    inputs_hash = binding_inputs_hash(binding, env, artifacts, attestations)
    at = _now()

    if isinstance(binding, FormulaBinding):
        try:
            parsed = F.parse_formula(binding.formula)
        except Exception as exc:
            raise ParseFailure(f"stored formula does not parse: {exc}")
        trace = None
        if binding.trace_ref is not None:
            trace = artifacts.get(binding.trace_ref)
            if trace is None:
                return EvidenceStatus(
                    Status.UNKNOWN,
                    f"missing artifact: {binding.trace_ref}",
                    at,
                    inputs_hash,
                )
            if not isinstance(trace, Trace):
                return EvidenceStatus(
                    Status.UNKNOWN,
                    f"artifact {binding.trace_ref!r} is not a trace",
                    at,
                    inputs_hash,
                )
        try:
            outcome = evaluate_detailed(parsed, env, trace)
        except MissingTrace as exc:
            return EvidenceStatus(Status.UNKNOWN, str(exc), at, inputs_hash)
        if outcome.value is TriBool.TRUE:
            return EvidenceStatus(
                Status.VALID, "formula holds", at, inputs_hash
            )
        if outcome.value is TriBool.FALSE:
            return EvidenceStatus(
                Status.INVALID,
                outcome.describe() or "formula violated",
                at,
                inputs_hash,
            )
        return EvidenceStatus(
            Status.UNKNOWN, outcome.describe(), at, inputs_hash
        )

    if isinstance(binding, MetricBinding):
        report = artifacts.get(binding.report_ref)
        if report is None:
            return EvidenceStatus(
                Status.UNKNOWN,
                f"missing artifact: {binding.report_ref}",
                at,
                inputs_hash,
            )
        if not isinstance(report, MetricReport):
            return EvidenceStatus(
                Status.UNKNOWN,
                f"artifact {binding.report_ref!r} is not a metric report",
                at,
                inputs_hash,
            )
        value = report.metrics.get(binding.metric)
        if value is None:
            return EvidenceStatus(
                Status.UNKNOWN,
                f"missing metric: {binding.metric}",
                at,
                inputs_hash,
            )
        ok = _COMPARATORS[binding.comparator](value, binding.threshold)
        detail = (
            f"{binding.metric} = {value:g} "
            f"{binding.comparator} {binding.threshold:g}"
        )
        return EvidenceStatus(
            Status.VALID if ok else Status.INVALID,
            detail if ok else f"threshold violated: {detail} is false",
            at,
            inputs_hash,
        )

    if isinstance(binding, ManualBinding):
        relevant = [a for a in attestations if a.role == binding.required_role]
        if not relevant:
            return EvidenceStatus(
                Status.UNKNOWN, "no attestation", at, inputs_hash
            )
        latest = max(enumerate(relevant), key=lambda ia: (ia[1].at, ia[0]))[1]
        return EvidenceStatus(
            latest.status,
            f"attested {latest.status.value} by {latest.by} "
            f"({latest.role}) at {latest.at}",
            at,
            inputs_hash,
        )

    raise WrongBindingKind(f"unknown binding type {type(binding).__name__}")


def attest(
    evidence_id: str,
    attestation: Attestation,
    binding: EvidenceBinding,
    history: Sequence[Attestation] = (),
) -> tuple[list[Attestation], EvidenceStatus]:
    """Append an attestation and return (new history, resulting status)."""
    if not isinstance(binding, ManualBinding):
        raise WrongBindingKind(
            f"evidence {evidence_id} is {binding.kind}-bound; only manual "
            f"evidence accepts attestations"
        )
    if attestation.role != binding.required_role:
        raise RoleMismatch(
            f"evidence {evidence_id} requires role "
            f"{binding.required_role!r}, got {attestation.role!r}"
        )
    if attestation.evidence_id != evidence_id:
        raise WrongBindingKind(
            f"attestation targets {attestation.evidence_id!r}, "
            f"not {evidence_id!r}"
        )
    new_history = list(history) + [attestation]
    status = evaluate_evidence(binding, {}, {}, new_history)
    return new_history, status


def ingest_metric_report(doc: bytes) -> MetricReport:
    """Parse the documented metric-report format (strict about the basics)."""

    def reject_nonfinite(value: str):
        raise NonFiniteValue(f"non-finite metric value {value!r}")

    try:
        payload = json.loads(doc.decode("utf-8"), parse_constant=reject_nonfinite)
    except NonFiniteValue:
        raise
    except Exception as exc:
        raise MalformedReport(f"not a valid report document: {exc}")
    if not isinstance(payload, dict):
        raise MalformedReport("report must be a JSON object")
    tool = payload.get("tool")
    metrics = payload.get("metrics")
    if not isinstance(tool, str) or not tool:
        raise MalformedReport("report is missing a 'tool' name")
    if not isinstance(metrics, dict) or not metrics:
        raise MalformedReport("report is missing a 'metrics' map")
    parsed: dict[str, float] = {}
    for name, value in metrics.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise MalformedReport(f"metric {name!r} is not a number")
        if not math.isfinite(float(value)):
            raise NonFiniteValue(f"metric {name!r} is not finite")
        parsed[name] = float(value)
    known = {"tool", "produced_at", "metrics", "provenance"}
    extras = {k: v for k, v in payload.items() if k not in known}
    return MetricReport(
        tool=tool,
        produced_at=str(payload.get("produced_at", "")),
        metrics=parsed,
        provenance=str(payload.get("provenance", "")),
        extras=extras,
    )
