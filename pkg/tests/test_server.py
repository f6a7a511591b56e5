from __future__ import annotations

import json
from urllib.error import HTTPError
from urllib.request import Request, urlopen

import pytest

from safecase.server import serve_in_thread


@pytest.fixture()
def service(sample_case_dir):
    httpd, thread = serve_in_thread(sample_case_dir)
    base = f"http://127.0.0.1:{httpd.server_address[1]}"
    yield base, sample_case_dir
    httpd.shutdown()
    httpd.server_close()


def get(base, path, raw=False):
    with urlopen(base + path) as response:
        body = response.read()
    return body if raw else json.loads(body)


def post(base, path, payload=None):
    request = Request(
        base + path,
        data=json.dumps(payload or {}).encode(),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    with urlopen(request) as response:
        return json.loads(response.read())


def post_error(base, path, payload=None):
    try:
        post(base, path, payload)
    except HTTPError as exc:
        return exc.code, json.loads(exc.read())["error"]
    raise AssertionError("expected an error response")


def test_get_case_payload(service):
    base, _ = service
    doc = get(base, "/case")
    assert doc["metadata"]["name"] == "agv-fp-braking"
    assert len(doc["tree"]["nodes"]) == 20
    assert doc["leaves"] == ["A1", "A2", "A3", "Sn1", "Sn2", "Sn3", "Sn4"]
    assert all(v == "valid" for v in doc["statuses"].values())
    assert doc["evidence"]["Sn1"]["reason"] == "formula holds"
    assert doc["digest"]


def test_get_status(service):
    base, _ = service
    statuses = get(base, "/status")
    assert statuses["G1"] == "valid"
    assert len(statuses) == 20


def test_post_query(service):
    base, _ = service
    assert post(base, "/query", {"tags": ["braking distance"]}) == {
        "nodes": ["A1"]
    }
    assert post(base, "/query", {"mode": "all", "tags": ["fusion", "detection"]}) == {
        "nodes": ["C4"]
    }
    code, err = post_error(base, "/query", {"tags": []})
    assert code == 400


def test_change_impact_apply_cycle(service):
    base, _ = service
    change = post(
        base,
        "/changes",
        {
            "source": "context_evolution",
            "payload": "faster camera",
            "tags": ["frame rate"],
            "param_updates": {"frame_rate": 20.0},
        },
    )
    assert change["state"] == "open"
    report = post(base, f"/changes/{change['id']}/impact")
    assert report["stage"] == 1
    result = post(base, f"/changes/{change['id']}/apply")
    assert result["applied"] == change["id"]
    assert result["env"]["frame_rate"]["value"] == 20.0
    statuses = get(base, "/status")
    assert statuses["G1"] == "valid"


def test_stage_two_apply_conflicts(service):
    base, _ = service
    change = post(
        base,
        "/changes",
        {
            "source": "context_evolution",
            "payload": "faster line",
            "tags": ["corridor"],
            "param_updates": {"v_agv": 4.0},
        },
    )
    report = post(base, f"/changes/{change['id']}/impact")
    assert report["stage"] == 2
    assert report["status_map"]["Sn1"] == "invalid"
    code, err = post_error(base, f"/changes/{change['id']}/apply")
    assert code == 409
    assert err["code"] == "stage_not_one"


def test_apply_without_report_conflicts(service):
    base, _ = service
    change = post(
        base,
        "/changes",
        {"source": "monitoring_event", "payload": "x", "tags": ["rear-agent"]},
    )
    code, err = post_error(base, f"/changes/{change['id']}/apply")
    assert code == 409
    assert err["code"] == "stale_report"


def test_attest_endpoint(service):
    base, _ = service
    result = post(
        base,
        "/evidence/A1/attest",
        {
            "status": "invalid",
            "by": "j.doe",
            "role": "safety_engineer",
            "note": "rule suspended",
        },
    )
    assert result["value"] == "invalid"
    statuses = get(base, "/status")
    assert statuses["G3"] == "invalid"
    assert statuses["G1"] == "invalid"

    code, err = post_error(
        base,
        "/evidence/A1/attest",
        {"status": "valid", "by": "x", "role": "intern"},
    )
    assert code == 400
    assert err["code"] == "role_mismatch"

    code, err = post_error(
        base,
        "/evidence/Sn1/attest",
        {"status": "valid", "by": "x", "role": "safety_engineer"},
    )
    assert code == 400
    assert err["code"] == "wrong_binding_kind"

    code, err = post_error(
        base,
        "/evidence/NOPE/attest",
        {"status": "valid", "by": "x", "role": "safety_engineer"},
    )
    assert code == 404


def test_snapshots_endpoints(service):
    base, _ = service
    created = post(base, "/snapshots", {"label": "audit"})
    listed = get(base, "/snapshots")["snapshots"]
    assert [s["id"] for s in listed] == [created["id"]]


def test_trace_endpoint(service):
    base, _ = service
    body = get(base, "/traces/trace_fp_braking", raw=True).decode()
    assert body.splitlines()[0] == "t,d_agv_rear,detected_fusion,fp_ml,v_agv,v_rear"
    try:
        get(base, "/traces/nope")
        raise AssertionError("expected 404")
    except HTTPError as exc:
        assert exc.code == 404


def test_unknown_route_is_404(service):
    base, _ = service
    try:
        get(base, "/nope")
        raise AssertionError("expected 404")
    except HTTPError as exc:
        assert exc.code == 404


def test_restart_reproduces_state(service, sample_case_dir):
    base, _ = service
    change = post(
        base,
        "/changes",
        {
            "source": "context_evolution",
            "payload": "faster camera",
            "tags": ["frame rate"],
            "param_updates": {"frame_rate": 20.0},
        },
    )
    post(base, f"/changes/{change['id']}/impact")
    post(base, f"/changes/{change['id']}/apply")
    before = get(base, "/case")

    fresh_httpd, _ = serve_in_thread(sample_case_dir)
    fresh = f"http://127.0.0.1:{fresh_httpd.server_address[1]}"
    try:
        after = get(fresh, "/case")
        for key in ("tree", "env", "bindings", "statuses", "digest"):
            assert after[key] == before[key]
    finally:
        fresh_httpd.shutdown()
        fresh_httpd.server_close()


def test_cli_and_api_reports_are_byte_identical(service, tmp_path, capsys):
    base, case_dir = service
    payload = {
        "source": "context_evolution",
        "payload": "faster line",
        "tags": ["corridor"],
        "param_updates": {"v_agv": 4.0},
    }
    change = post(base, "/changes", payload)
    api_report = post(base, f"/changes/{change['id']}/impact")

    from safecase.cli import main

    change_file = tmp_path / "change.json"
    change_file.write_text(json.dumps(payload))
    main(["impact", str(case_dir), str(change_file)])
    cli_report = json.loads(capsys.readouterr().out)
    assert json.dumps(cli_report, sort_keys=True) == json.dumps(
        api_report, sort_keys=True
    )
