from __future__ import annotations

import json

import pytest

from safecase.errors import (
    MalformedReport,
    NonFiniteValue,
    ParseFailure,
    RoleMismatch,
    WrongBindingKind,
)
from safecase.evidence import (
    Attestation,
    FormulaBinding,
    ManualBinding,
    MetricBinding,
    MetricReport,
    Remediation,
    attest,
    binding_inputs_hash,
    evaluate_evidence,
    ingest_metric_report,
)
from safecase.gsn import Status
from safecase.trace import Trace


def make_report(**metrics) -> MetricReport:
    return MetricReport(
        tool="scanner", produced_at="2026-01-01T00:00:00+00:00",
        metrics=metrics or {"scenario_coverage": 0.95},
    )


def ramp_trace():
    return Trace(
        dt=0.5, t0=0.0,
        columns={"x": [1.0, 2.0, 3.0, 4.0], "ok": [True, True, True, True]},
    )


def test_metric_above_threshold_is_valid():
    binding = MetricBinding("scenario_coverage", ">=", 0.9, "report")
    status = evaluate_evidence(binding, {}, {"report": make_report()})
    assert status.value is Status.VALID
    assert "0.95" in status.reason


def test_metric_below_threshold_is_invalid():
    binding = MetricBinding("scenario_coverage", ">=", 0.99, "report")
    status = evaluate_evidence(binding, {}, {"report": make_report()})
    assert status.value is Status.INVALID


def test_missing_report_or_metric_is_unknown():
    binding = MetricBinding("scenario_coverage", ">=", 0.9, "report")
    status = evaluate_evidence(binding, {}, {})
    assert status.value is Status.UNKNOWN
    assert "report" in status.reason
    status = evaluate_evidence(
        MetricBinding("nope", ">=", 0.9, "report"), {}, {"report": make_report()}
    )
    assert status.value is Status.UNKNOWN
    assert "nope" in status.reason


def test_formula_binding_with_trace():
    binding = FormulaBinding("forall t in trace: x(t) > 0", trace_ref="tr")
    status = evaluate_evidence(binding, {}, {"tr": ramp_trace()})
    assert status.value is Status.VALID

    binding = FormulaBinding("forall t in trace: x(t) > 2", trace_ref="tr")
    status = evaluate_evidence(binding, {}, {"tr": ramp_trace()})
    assert status.value is Status.INVALID
    assert "counterexample" in status.reason


def test_formula_binding_without_trace():
    binding = FormulaBinding("v * v / (2 * a) <= budget")
    env = {"v": 2.0, "a": 2.0, "budget": 3.0}
    assert evaluate_evidence(binding, env, {}).value is Status.VALID
    status = evaluate_evidence(binding, {"v": 2.0, "a": 2.0}, {})
    assert status.value is Status.UNKNOWN
    assert "budget" in status.reason


def test_formula_binding_missing_trace_artifact_is_unknown():
    binding = FormulaBinding("forall t in trace: x(t) > 0", trace_ref="tr")
    status = evaluate_evidence(binding, {}, {})
    assert status.value is Status.UNKNOWN
    assert "tr" in status.reason


def test_unparseable_stored_formula_is_parse_failure():
    binding = FormulaBinding("forall t in", trace_ref=None)
    with pytest.raises(ParseFailure):
        evaluate_evidence(binding, {}, {})


def test_manual_binding_flow():
    binding = ManualBinding(required_role="safety_engineer")
    status = evaluate_evidence(binding, {}, {}, [])
    assert status.value is Status.UNKNOWN
    assert status.reason == "no attestation"

    first = Attestation("E1", Status.VALID, "ana", "safety_engineer",
                        "2026-01-01T10:00:00+00:00")
    history, status = attest("E1", first, binding, [])
    assert status.value is Status.VALID

    second = Attestation("E1", Status.INVALID, "bo", "safety_engineer",
                         "2026-02-01T10:00:00+00:00", note="rule withdrawn")
    history, status = attest("E1", second, binding, history)
    assert status.value is Status.INVALID  # latest timestamp wins
    assert len(history) == 2

    # replaying the log in order reproduces the final status
    replayed = evaluate_evidence(binding, {}, {}, history)
    assert replayed.value is Status.INVALID


def test_attest_guards():
    formula = FormulaBinding("true")
    with pytest.raises(WrongBindingKind):
        attest(
            "E1",
            Attestation("E1", Status.VALID, "x", "safety_engineer",
                        "2026-01-01T00:00:00+00:00"),
            formula,
        )
    manual = ManualBinding(required_role="safety_engineer")
    with pytest.raises(RoleMismatch):
        attest(
            "E1",
            Attestation("E1", Status.VALID, "x", "intern",
                        "2026-01-01T00:00:00+00:00"),
            manual,
        )


def test_attestations_cannot_assert_unknown():
    with pytest.raises(ValueError):
        Attestation("E1", Status.UNKNOWN, "x", "r", "2026-01-01T00:00:00+00:00")


def test_inputs_hash_is_stable_and_input_sensitive():
    binding = FormulaBinding("forall t in trace: x(t) > 0", trace_ref="tr")
    env = {"irrelevant": 1.0}
    h1 = binding_inputs_hash(binding, env, {"tr": ramp_trace()})
    h2 = binding_inputs_hash(binding, {"irrelevant": 2.0}, {"tr": ramp_trace()})
    assert h1 == h2  # only symbols the formula reads participate

    other_trace = Trace(dt=0.5, t0=0.0, columns={"x": [1.0, 2.0, 3.0, 5.0]})
    assert binding_inputs_hash(binding, env, {"tr": other_trace}) != h1

    s1 = evaluate_evidence(binding, env, {"tr": ramp_trace()})
    s2 = evaluate_evidence(binding, env, {"tr": ramp_trace()})
    assert s1.inputs_hash == s2.inputs_hash
    assert s1.value == s2.value


def test_deleting_artifact_degrades_to_unknown_with_new_hash():
    binding = MetricBinding("scenario_coverage", ">=", 0.9, "report")
    with_report = evaluate_evidence(binding, {}, {"report": make_report()})
    without = evaluate_evidence(binding, {}, {})
    assert with_report.value is Status.VALID
    assert without.value is Status.UNKNOWN
    assert with_report.inputs_hash != without.inputs_hash


# --- report ingestion ---------------------------------------------------------


def test_ingest_minimal_report():
    report = ingest_metric_report(
        json.dumps({"tool": "scanner", "metrics": {"m": 1.0}}).encode()
    )
    assert report.tool == "scanner"
    assert report.metrics == {"m": 1.0}


def test_ingest_preserves_unknown_fields():
    report = ingest_metric_report(
        json.dumps(
            {
                "tool": "scanner",
                "metrics": {"scenario_coverage": 0.95},
                "produced_at": "2026-01-01T00:00:00+00:00",
                "future_field": {"nested": True},
            }
        ).encode()
    )
    assert report.metrics["scenario_coverage"] == 0.95
    assert report.extras == {"future_field": {"nested": True}}


def test_ingest_rejects_malformed():
    with pytest.raises(MalformedReport):
        ingest_metric_report(b"not json")
    with pytest.raises(MalformedReport):
        ingest_metric_report(json.dumps({"metrics": {"m": 1}}).encode())
    with pytest.raises(MalformedReport):
        ingest_metric_report(json.dumps({"tool": "t"}).encode())
    with pytest.raises(MalformedReport):
        ingest_metric_report(
            json.dumps({"tool": "t", "metrics": {"m": "high"}}).encode()
        )


def test_ingest_rejects_non_finite():
    with pytest.raises(NonFiniteValue):
        ingest_metric_report(b'{"tool": "t", "metrics": {"m": NaN}}')
    with pytest.raises(NonFiniteValue):
        ingest_metric_report(b'{"tool": "t", "metrics": {"m": Infinity}}')


def test_remediation_actions_validated():
    Remediation("retest", "run it again")
    with pytest.raises(ValueError):
        Remediation("hope", "wish hard")
