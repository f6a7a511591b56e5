"""HTTP/JSON service exposing one case directory.

The service is stateless between requests: every request reads the case
from disk, so restarting it after any sequence of applied changes
reproduces identical responses. Writes funnel through the store's
writer lock. Endpoint schemas are documented in docs/http-api.md.
"""

from __future__ import annotations

import json
import re
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional

from . import change as change_mod
from .change import ChangeRequest, ChangeSource, impact, open_change, record_report
from .errors import (
    CaseNotFound,
    EmptyChange,
    EnvError,
    FormulaError,
    LockTimeout,
    MalformedCase,
    MalformedReport,
    RoleMismatch,
    SafecaseError,
    SchemaVersionMismatch,
    StageNotOne,
    StaleReport,
    UnknownArtifact,
    UnknownChange,
    WrongBindingKind,
)
from .evidence import Attestation, attest
from .gsn import Status, leaves
from .store import (
    CaseStore,
    TagQuery,
    case_digest,
    case_to_doc,
    query_tags,
    snapshot,
)

_STATUS_BY_ERROR = [
    ((StageNotOne, StaleReport, LockTimeout), 409),
    ((CaseNotFound, UnknownArtifact, UnknownChange), 404),
    (
        (
            MalformedCase,
            SchemaVersionMismatch,
            MalformedReport,
            EmptyChange,
            EnvError,
            FormulaError,
            WrongBindingKind,
            RoleMismatch,
        ),
        400,
    ),
]


def _http_status(exc: Exception) -> int:
    for types, status in _STATUS_BY_ERROR:
        if isinstance(exc, types):
            return status
    if isinstance(exc, (ValueError, KeyError, TypeError)):
        return 400
    return 500


class NotFound(SafecaseError):
    code = "not_found"


class ApiHandler(BaseHTTPRequestHandler):
    server_version = "safecase"
    store: CaseStore = None  # injected by serve()
    ui_dir: Optional[Path] = None

    # -- plumbing

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, status: int, payload, content_type="application/json"):
        if isinstance(payload, (dict, list)):
            body = json.dumps(
                payload, indent=2, sort_keys=True, ensure_ascii=False
            ).encode("utf-8")
        elif isinstance(payload, str):
            body = payload.encode("utf-8")
        else:
            body = payload
        self.send_response(status)
        self.send_header("Content-Type", content_type + "; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header(
            "Access-Control-Allow-Methods", "GET, POST, OPTIONS"
        )
        self.end_headers()
        self.wfile.write(body)

    def _error(self, exc: Exception):
        status = _http_status(exc)
        code = getattr(exc, "code", "internal")
        if isinstance(exc, NotFound):
            status = 404
        self._send(
            status,
            {
                "error": {
                    "code": code if status != 500 else "internal",
                    "message": str(exc),
                    "details": type(exc).__name__,
                }
            },
        )

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        raw = self.rfile.read(length)
        try:
            doc = json.loads(raw.decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedReport(f"request body is not valid JSON: {exc}")
        if not isinstance(doc, dict):
            raise MalformedReport("request body must be a JSON object")
        return doc

    # -- http verbs

    def do_OPTIONS(self):
        self._send(204, b"", content_type="text/plain")

    def do_GET(self):
        try:
            self._route("GET")
        except Exception as exc:  # every error becomes an envelope
            self._error(exc)

    def do_POST(self):
        try:
            self._route("POST")
        except Exception as exc:
            self._error(exc)

    # -- routing

    def _route(self, method: str):
        path = self.path.split("?", 1)[0].rstrip("/") or "/"
        routes = [
            ("GET", r"^/case$", self.get_case),
            ("GET", r"^/status$", self.get_status),
            ("POST", r"^/query$", self.post_query),
            ("POST", r"^/changes$", self.post_changes),
            ("GET", r"^/changes$", self.get_changes),
            ("POST", r"^/changes/([^/]+)/impact$", self.post_impact),
            ("POST", r"^/changes/([^/]+)/apply$", self.post_apply),
            ("POST", r"^/evidence/([^/]+)/attest$", self.post_attest),
            ("GET", r"^/snapshots$", self.get_snapshots),
            ("POST", r"^/snapshots$", self.post_snapshots),
            ("GET", r"^/traces/([^/]+)$", self.get_trace),
        ]
        for verb, pattern, handler in routes:
            if verb != method:
                continue
            match = re.match(pattern, path)
            if match:
                handler(*match.groups())
                return
        if method == "GET" and self.ui_dir is not None:
            if self._serve_static(path):
                return
        raise NotFound(f"no route for {method} {path}")

    # -- endpoint handlers

    def get_case(self):
        case = self.store.load()
        artifacts = self.store.load_artifacts(case)
        attestations = self.store.attestations()
        statuses, status_map = change_mod.case_status(
            case, artifacts, attestations
        )
        doc = case_to_doc(case)
        doc["digest"] = case_digest(case)
        doc["leaves"] = leaves(case.tree)
        doc["statuses"] = {
            node: value.value for node, value in sorted(status_map.items())
        }
        doc["evidence"] = {
            node: status.to_doc() for node, status in sorted(statuses.items())
        }
        self._send(200, doc)

    def get_status(self):
        case = self.store.load()
        artifacts = self.store.load_artifacts(case)
        attestations = self.store.attestations()
        _, status_map = change_mod.case_status(case, artifacts, attestations)
        self._send(
            200, {node: value.value for node, value in sorted(status_map.items())}
        )

    def post_query(self):
        body = self._body()
        case = self.store.load(verify_artifacts=False)
        query = TagQuery(
            mode=body.get("mode", "any"),
            tags=frozenset(body.get("tags") or []),
        )
        self._send(200, {"nodes": query_tags(case, query)})

    def post_changes(self):
        body = self._body()
        try:
            source = ChangeSource(body.get("source", ""))
        except ValueError:
            raise EmptyChange(
                "source must be one of incident_report, context_evolution, "
                "monitoring_event"
            )
        request = ChangeRequest.create(
            source=source,
            payload=str(body.get("payload", "")),
            tags=body.get("tags") or [],
            param_updates=body.get("param_updates") or {},
            structural=bool(body.get("structural", False)),
        )
        with self.store.writer_lock():
            open_change(self.store, request)
        self._send(201, self.store.read_change(request.id))

    def get_changes(self):
        self._send(200, {"changes": self.store.list_changes()})

    def _load_change(self, change_id: str) -> ChangeRequest:
        try:
            doc = self.store.read_change(change_id)
        except UnknownArtifact:
            raise UnknownChange(f"no change request {change_id!r}")
        return ChangeRequest.from_doc(doc)

    def post_impact(self, change_id: str):
        request = self._load_change(change_id)
        case = self.store.load()
        artifacts = self.store.load_artifacts(case)
        attestations = self.store.attestations()
        report = impact(case, request, artifacts, attestations)
        with self.store.writer_lock():
            report_doc = record_report(self.store, report)
        self._send(200, report_doc)

    def post_apply(self, change_id: str):
        body = self._body()
        request = self._load_change(change_id)
        doc = self.store.read_change(change_id)
        reports = doc.get("reports") or []
        if not reports:
            raise StaleReport(
                f"change {change_id} has no impact report; run impact first"
            )
        wanted = body.get("base_case_digest")
        report_doc = None
        if wanted:
            for candidate in reports:
                if candidate["base_case_digest"] == wanted:
                    report_doc = candidate
                    break
            if report_doc is None:
                raise StaleReport("no impact report matches that case digest")
        else:
            report_doc = reports[-1]
        from .cli import _report_from_doc

        report = _report_from_doc(report_doc)
        new_case = change_mod.apply_and_persist(self.store, request, report)
        self._send(
            200,
            {
                "applied": change_id,
                "case_digest": case_digest(new_case),
                "env": new_case.env.to_doc(),
            },
        )

    def post_attest(self, evidence_id: str):
        body = self._body()
        case = self.store.load(verify_artifacts=False)
        if evidence_id not in case.tree.nodes:
            raise NotFound(f"no node {evidence_id!r}")
        binding = case.bindings.get(evidence_id)
        if binding is None:
            raise WrongBindingKind(f"node {evidence_id!r} has no binding")
        try:
            status = Status(body.get("status", ""))
        except ValueError:
            raise MalformedReport("status must be 'valid' or 'invalid'")
        attestation = Attestation(
            evidence_id=evidence_id,
            status=status,
            by=str(body.get("by", "")),
            role=str(body.get("role", "")),
            at=str(
                body.get("at") or datetime.now(timezone.utc).isoformat()
            ),
            note=str(body.get("note", "")),
        )
        with self.store.writer_lock():
            history = self.store.attestations().get(evidence_id, [])
            _, result = attest(evidence_id, attestation, binding, history)
            self.store.append_attestation(attestation)
        self._send(200, result.to_doc())

    def get_snapshots(self):
        self._send(200, {"snapshots": self.store.list_snapshots()})

    def post_snapshots(self):
        body = self._body()
        label = str(body.get("label", "")) or "unlabelled"
        with self.store.writer_lock():
            case = self.store.load()
            snap = snapshot(case, label=label)
            self.store.write_snapshot(snap)
        self._send(
            201,
            {"id": snap.id, "label": snap.label, "created_at": snap.created_at},
        )

    def get_trace(self, artifact: str):
        case = self.store.load(verify_artifacts=False)
        ref = case.artifacts.get(artifact)
        if ref is None or ref.kind != "trace":
            raise UnknownArtifact(f"no trace artifact {artifact!r}")
        path = self.store.case_dir / ref.path
        if not path.is_file():
            raise UnknownArtifact(f"trace file missing for {artifact!r}")
        self._send(200, path.read_text(encoding="utf-8"), content_type="text/csv")

    # -- static UI assets

    _CONTENT_TYPES = {
        ".html": "text/html",
        ".js": "application/javascript",
        ".css": "text/css",
        ".svg": "image/svg+xml",
        ".png": "image/png",
        ".ico": "image/x-icon",
        ".map": "application/json",
    }

    def _serve_static(self, path: str) -> bool:
        rel = "index.html" if path == "/" else path.lstrip("/")
        target = (self.ui_dir / rel).resolve()
        try:
            target.relative_to(self.ui_dir.resolve())
        except ValueError:
            return False
        if not target.is_file():
            return False
        content_type = self._CONTENT_TYPES.get(
            target.suffix.lower(), "application/octet-stream"
        )
        self._send(200, target.read_bytes(), content_type=content_type)
        return True


def make_server(
    case_dir, port: int = 0, ui_dir: Optional[str] = None
) -> ThreadingHTTPServer:
    store = CaseStore(case_dir)
    store.load(verify_artifacts=True)  # fail fast on a broken case
    handler = type(
        "BoundApiHandler",
        (ApiHandler,),
        {
            "store": store,
            "ui_dir": Path(ui_dir).resolve() if ui_dir else None,
        },
    )
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve(case_dir, port: int = 8077, ui_dir: Optional[str] = None) -> None:
    httpd = make_server(case_dir, port=port, ui_dir=ui_dir)
    host, bound_port = httpd.server_address[:2]
    print(f"serving case {case_dir} on http://{host}:{bound_port}")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()


def serve_in_thread(
    case_dir, port: int = 0, ui_dir: Optional[str] = None
) -> tuple[ThreadingHTTPServer, threading.Thread]:
    """Start the service on a background thread (used by tests)."""
    httpd = make_server(case_dir, port=port, ui_dir=ui_dir)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    return httpd, thread
