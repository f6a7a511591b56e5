"""Case persistence: documents, tag queries, snapshots, and the on-disk store.

A case lives in one directory: the case document, its artifact files
(traces, metric reports, scenario definitions), immutable snapshots,
an append-only attestation log, and change requests with their impact
reports. Writes to a case are serialized through a file lock; readers
never lock because every write replaces files atomically.
"""

from __future__ import annotations

import fcntl
import hashlib
import json
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator, Mapping, Optional, Union

from . import formula as F
from .env import ParameterEnv
from .errors import (
    CaseNotFound,
    IntegrityError,
    LockTimeout,
    MalformedCase,
    SchemaVersionMismatch,
    UnknownArtifact,
)
from .evidence import (
    Attestation,
    EvidenceBinding,
    FormulaBinding,
    ManualBinding,
    MetricBinding,
    Remediation,
    ingest_metric_report,
)
from .gsn import (
    EdgeKind,
    GsnEdge,
    GsnNode,
    GsnTree,
    NodeKind,
    Status,
    build_tree,
    leaves,
    normalize_tag,
)
from .trace import read_csv

SCHEMA_VERSION = 1

CASE_FILE = "case.json"
ARTIFACT_DIR = "artifacts"
SNAPSHOT_DIR = "snapshots"
CHANGE_DIR = "changes"
ATTESTATION_LOG = "attestations.jsonl"
LOCK_FILE = ".lock"

ARTIFACT_KINDS = ("trace", "metric_report", "scenario")


def canonical_json(payload: object) -> str:
    return json.dumps(
        payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    )


def digest(payload: object) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


# --- case model ---------------------------------------------------------------


@dataclass(frozen=True)
class ArtifactRef:
    path: str  # relative to the case directory
    sha256: str
    kind: str  # one of ARTIFACT_KINDS
    generated_from: Optional[str] = None  # scenario artifact for traces

    def __post_init__(self):
        if self.kind not in ARTIFACT_KINDS:
            raise MalformedCase(f"unknown artifact kind {self.kind!r}")


@dataclass(frozen=True)
class CaseMetadata:
    name: str
    version: str = "1"
    description: str = ""


@dataclass(frozen=True)
class Case:
    tree: GsnTree
    env: ParameterEnv
    bindings: Mapping[str, EvidenceBinding]
    artifacts: Mapping[str, ArtifactRef]
    metadata: CaseMetadata
    #: optional controlled vocabulary; when set, every node tag must be in it
    allowed_tags: Optional[frozenset[str]] = None

    def __post_init__(self):
        if self.allowed_tags is not None:
            normalized = frozenset(normalize_tag(t) for t in self.allowed_tags)
            object.__setattr__(self, "allowed_tags", normalized)
            for node_id, node in self.tree.nodes.items():
                stray = node.tags - normalized
                if stray:
                    raise MalformedCase(
                        f"node {node_id} uses tag(s) outside the case's "
                        f"allowed list: {sorted(stray)}"
                    )
        leaf_set = set(leaves(self.tree))
        for node_id in self.bindings:
            if node_id not in leaf_set:
                raise MalformedCase(
                    f"binding on {node_id!r}, which is not a solution or "
                    f"assumption leaf"
                )
        for node_id, node in self.tree.nodes.items():
            has_ref = node.binding is not None
            if has_ref != (node_id in self.bindings):
                raise MalformedCase(
                    f"node {node_id}: binding reference and bindings map "
                    f"disagree"
                )
            if has_ref and node.binding != node_id:
                raise MalformedCase(
                    f"node {node_id}: binding reference must equal the node id"
                )
        for node_id, binding in self.bindings.items():
            for ref_name in _binding_artifact_refs(binding):
                if ref_name not in self.artifacts:
                    raise MalformedCase(
                        f"binding on {node_id} references missing artifact "
                        f"{ref_name!r}"
                    )
            if isinstance(binding, FormulaBinding):
                try:
                    F.parse_formula(binding.formula)
                except Exception as exc:
                    raise MalformedCase(
                        f"binding on {node_id}: formula does not parse: {exc}"
                    )


def _binding_artifact_refs(binding: EvidenceBinding) -> tuple[str, ...]:
    if isinstance(binding, FormulaBinding) and binding.trace_ref:
        return (binding.trace_ref,)
    if isinstance(binding, MetricBinding):
        return (binding.report_ref,)
    return ()


# --- tag queries -----------------------------------------------------------------


@dataclass(frozen=True)
class TagQuery:
    mode: str  # "any" | "all"
    tags: frozenset[str]

    def __post_init__(self):
        if self.mode not in ("any", "all"):
            raise ValueError(f"mode must be any/all, got {self.mode!r}")
        normalized = frozenset(normalize_tag(t) for t in self.tags)
        if not normalized or any(not t for t in normalized):
            raise ValueError("tag query needs at least one non-empty tag")
        object.__setattr__(self, "tags", normalized)


def query_tags(case: Case, query: TagQuery) -> list[str]:
    """Node ids whose tags match the query, sorted for determinism."""
    hits = []
    for node_id, node in case.tree.nodes.items():
        if query.mode == "any":
            if node.tags & query.tags:
                hits.append(node_id)
        else:
            if query.tags <= node.tags:
                hits.append(node_id)
    return sorted(hits)


# --- serialization ----------------------------------------------------------------

_NODE_FIELDS = {"id", "kind", "text", "tags", "binding", "undeveloped"}
_EDGE_FIELDS = {"source", "target", "kind"}
_ENV_FIELDS = {"value", "unit", "derived"}
_BINDING_FIELDS = {
    "formula": {"kind", "formula", "trace_ref", "remediation"},
    "metric": {"kind", "metric", "comparator", "threshold", "report_ref", "remediation"},
    "manual": {"kind", "required_role", "remediation"},
}
_ARTIFACT_FIELDS = {"path", "sha256", "kind", "generated_from"}
_CASE_FIELDS = {
    "schema_version", "metadata", "tree", "env", "bindings", "artifacts",
    "allowed_tags",
}
_TREE_FIELDS = {"root", "nodes", "edges"}
_METADATA_FIELDS = {"name", "version", "description"}
_REMEDIATION_FIELDS = {"action", "description"}


def _check_fields(doc: Mapping, allowed: set, where: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise MalformedCase(
            f"{where}: unknown field(s) {sorted(unknown)}; this store is "
            f"strict to protect certification snapshots"
        )


def binding_to_doc(binding: EvidenceBinding) -> dict:
    doc: dict = {"kind": binding.kind}
    if isinstance(binding, FormulaBinding):
        doc["formula"] = binding.formula
        doc["trace_ref"] = binding.trace_ref
    elif isinstance(binding, MetricBinding):
        doc.update(
            metric=binding.metric,
            comparator=binding.comparator,
            threshold=binding.threshold,
            report_ref=binding.report_ref,
        )
    elif isinstance(binding, ManualBinding):
        doc["required_role"] = binding.required_role
    else:
        raise MalformedCase(f"unknown binding type {type(binding).__name__}")
    if binding.remediation is not None:
        doc["remediation"] = {
            "action": binding.remediation.action,
            "description": binding.remediation.description,
        }
    else:
        doc["remediation"] = None
    return doc


def binding_from_doc(doc: Mapping, where: str) -> EvidenceBinding:
    if not isinstance(doc, Mapping):
        raise MalformedCase(f"{where}: binding must be an object")
    kind = doc.get("kind")
    if kind not in _BINDING_FIELDS:
        raise MalformedCase(f"{where}: unknown binding kind {kind!r}")
    _check_fields(doc, _BINDING_FIELDS[kind], where)
    remediation = None
    rem_doc = doc.get("remediation")
    if rem_doc is not None:
        _check_fields(rem_doc, _REMEDIATION_FIELDS, f"{where}.remediation")
        try:
            remediation = Remediation(
                action=rem_doc.get("action"),
                description=str(rem_doc.get("description", "")),
            )
        except ValueError as exc:
            raise MalformedCase(f"{where}: {exc}")
    try:
        if kind == "formula":
            return FormulaBinding(
                formula=str(doc["formula"]),
                trace_ref=doc.get("trace_ref"),
                remediation=remediation,
            )
        if kind == "metric":
            return MetricBinding(
                metric=str(doc["metric"]),
                comparator=str(doc["comparator"]),
                threshold=float(doc["threshold"]),
                report_ref=str(doc["report_ref"]),
                remediation=remediation,
            )
        return ManualBinding(
            required_role=str(doc["required_role"]), remediation=remediation
        )
    except KeyError as exc:
        raise MalformedCase(f"{where}: missing binding field {exc}")
    except ValueError as exc:
        raise MalformedCase(f"{where}: {exc}")


def case_to_doc(case: Case) -> dict:
    nodes = [
        {
            "id": n.id,
            "kind": n.kind.value,
            "text": n.text,
            "tags": sorted(n.tags),
            "binding": n.binding,
            "undeveloped": n.undeveloped,
        }
        for _, n in sorted(case.tree.nodes.items())
    ]
    edges = sorted(
        (
            {"source": e.source, "target": e.target, "kind": e.kind.value}
            for e in case.tree.edges
        ),
        key=lambda e: (e["source"], e["target"], e["kind"]),
    )
    return {
        "schema_version": SCHEMA_VERSION,
        "metadata": {
            "name": case.metadata.name,
            "version": case.metadata.version,
            "description": case.metadata.description,
        },
        "tree": {"root": case.tree.root, "nodes": nodes, "edges": edges},
        "env": case.env.to_doc(),
        "bindings": {
            node_id: binding_to_doc(b)
            for node_id, b in sorted(case.bindings.items())
        },
        "artifacts": {
            name: {
                "path": ref.path,
                "sha256": ref.sha256,
                "kind": ref.kind,
                "generated_from": ref.generated_from,
            }
            for name, ref in sorted(case.artifacts.items())
        },
        "allowed_tags": sorted(case.allowed_tags)
        if case.allowed_tags is not None
        else None,
    }


def case_from_doc(doc: Mapping) -> Case:
    if not isinstance(doc, Mapping):
        raise MalformedCase("case document must be an object")
    if "schema_version" not in doc:
        raise MalformedCase("case document is missing schema_version")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"case schema_version {doc['schema_version']!r}; this build "
            f"reads version {SCHEMA_VERSION}"
        )
    _check_fields(doc, _CASE_FIELDS, "case")
    tree_doc = doc.get("tree")
    if not isinstance(tree_doc, Mapping):
        raise MalformedCase("case is missing the tree")
    _check_fields(tree_doc, _TREE_FIELDS, "tree")
    meta_doc = doc.get("metadata") or {}
    _check_fields(meta_doc, _METADATA_FIELDS, "metadata")

    nodes = []
    for i, node_doc in enumerate(tree_doc.get("nodes", [])):
        where = f"nodes[{i}]"
        _check_fields(node_doc, _NODE_FIELDS, where)
        try:
            kind = NodeKind(node_doc["kind"])
        except (KeyError, ValueError):
            raise MalformedCase(f"{where}: bad node kind")
        try:
            nodes.append(
                GsnNode(
                    id=node_doc.get("id", ""),
                    kind=kind,
                    text=str(node_doc.get("text", "")),
                    tags=frozenset(node_doc.get("tags", [])),
                    binding=node_doc.get("binding"),
                    undeveloped=bool(node_doc.get("undeveloped", False)),
                )
            )
        except Exception as exc:
            raise MalformedCase(f"{where}: {exc}")
    edges = []
    for i, edge_doc in enumerate(tree_doc.get("edges", [])):
        where = f"edges[{i}]"
        _check_fields(edge_doc, _EDGE_FIELDS, where)
        try:
            kind = EdgeKind(edge_doc["kind"])
        except (KeyError, ValueError):
            raise MalformedCase(f"{where}: bad edge kind")
        edges.append(
            GsnEdge(
                source=str(edge_doc.get("source", "")),
                target=str(edge_doc.get("target", "")),
                kind=kind,
            )
        )
    root = tree_doc.get("root")
    if not isinstance(root, str):
        raise MalformedCase("tree.root must be a node id")
    try:
        tree = build_tree(nodes, edges, root)
    except Exception as exc:
        raise MalformedCase(f"invalid tree: {exc}")

    env_doc = doc.get("env") or {}
    for name, spec in env_doc.items():
        if not isinstance(spec, Mapping) or "value" not in spec:
            raise MalformedCase(f"env[{name}]: expected an object with value")
        _check_fields(spec, _ENV_FIELDS, f"env[{name}]")
    try:
        env = ParameterEnv.from_doc(env_doc)
    except Exception as exc:
        raise MalformedCase(f"invalid environment: {exc}")

    bindings = {
        node_id: binding_from_doc(b_doc, f"bindings[{node_id}]")
        for node_id, b_doc in (doc.get("bindings") or {}).items()
    }

    artifacts = {}
    for name, ref_doc in (doc.get("artifacts") or {}).items():
        _check_fields(ref_doc, _ARTIFACT_FIELDS, f"artifacts[{name}]")
        try:
            artifacts[name] = ArtifactRef(
                path=str(ref_doc["path"]),
                sha256=str(ref_doc["sha256"]),
                kind=str(ref_doc["kind"]),
                generated_from=ref_doc.get("generated_from"),
            )
        except KeyError as exc:
            raise MalformedCase(f"artifacts[{name}]: missing field {exc}")

    metadata = CaseMetadata(
        name=str(meta_doc.get("name", "")),
        version=str(meta_doc.get("version", "1")),
        description=str(meta_doc.get("description", "")),
    )
    allowed = doc.get("allowed_tags")
    if allowed is not None and (
        not isinstance(allowed, list)
        or any(not isinstance(t, str) for t in allowed)
    ):
        raise MalformedCase("allowed_tags must be a list of strings")
    return Case(
        tree=tree,
        env=env,
        bindings=bindings,
        artifacts=artifacts,
        metadata=metadata,
        allowed_tags=frozenset(allowed) if allowed is not None else None,
    )


def case_digest(case: Case) -> str:
    """Content digest over the case document plus its artifact digests."""
    doc = case_to_doc(case)
    doc["artifact_digests"] = {
        name: ref.sha256 for name, ref in sorted(case.artifacts.items())
    }
    return digest(doc)


# --- snapshots -----------------------------------------------------------------


@dataclass(frozen=True)
class Snapshot:
    id: str
    label: str
    created_at: str
    case: Case

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "created_at": self.created_at,
            "case": case_to_doc(self.case),
        }


def snapshot(case: Case, label: str) -> Snapshot:
    """Content-addressed frozen copy; equal cases yield equal ids."""
    return Snapshot(
        id=case_digest(case), label=label, created_at=_now(), case=case
    )


@dataclass(frozen=True)
class ChangeSet:
    added_nodes: tuple[str, ...] = ()
    removed_nodes: tuple[str, ...] = ()
    modified_nodes: tuple[str, ...] = ()
    added_edges: tuple[tuple[str, str, str], ...] = ()
    removed_edges: tuple[tuple[str, str, str], ...] = ()
    added_env: tuple[str, ...] = ()
    removed_env: tuple[str, ...] = ()
    modified_env: tuple[str, ...] = ()
    added_bindings: tuple[str, ...] = ()
    removed_bindings: tuple[str, ...] = ()
    modified_bindings: tuple[str, ...] = ()
    added_artifacts: tuple[str, ...] = ()
    removed_artifacts: tuple[str, ...] = ()
    modified_artifacts: tuple[str, ...] = ()
    metadata_changed: bool = False

    def is_empty(self) -> bool:
        return not any(
            getattr(self, f.name)
            for f in self.__dataclass_fields__.values()
        )

    def to_doc(self) -> dict:
        return {
            f.name: (
                list(getattr(self, f.name))
                if isinstance(getattr(self, f.name), tuple)
                else getattr(self, f.name)
            )
            for f in self.__dataclass_fields__.values()
        }


def _diff_maps(a: Mapping, b: Mapping):
    added = tuple(sorted(set(b) - set(a)))
    removed = tuple(sorted(set(a) - set(b)))
    modified = tuple(sorted(k for k in set(a) & set(b) if a[k] != b[k]))
    return added, removed, modified


def diff_snapshots(a: Snapshot, b: Snapshot) -> ChangeSet:
    return diff_cases(a.case, b.case)


def diff_cases(a: Case, b: Case) -> ChangeSet:
    a_doc, b_doc = case_to_doc(a), case_to_doc(b)
    a_nodes = {n["id"]: n for n in a_doc["tree"]["nodes"]}
    b_nodes = {n["id"]: n for n in b_doc["tree"]["nodes"]}
    an, rn, mn = _diff_maps(a_nodes, b_nodes)
    a_edges = {(e["source"], e["target"], e["kind"]) for e in a_doc["tree"]["edges"]}
    b_edges = {(e["source"], e["target"], e["kind"]) for e in b_doc["tree"]["edges"]}
    ae, re_, me = _diff_maps(a_doc["env"], b_doc["env"])
    ab, rb, mb = _diff_maps(a_doc["bindings"], b_doc["bindings"])
    aa, ra, ma = _diff_maps(a_doc["artifacts"], b_doc["artifacts"])
    return ChangeSet(
        added_nodes=an,
        removed_nodes=rn,
        modified_nodes=mn,
        added_edges=tuple(sorted(b_edges - a_edges)),
        removed_edges=tuple(sorted(a_edges - b_edges)),
        added_env=ae,
        removed_env=re_,
        modified_env=me,
        added_bindings=ab,
        removed_bindings=rb,
        modified_bindings=mb,
        added_artifacts=aa,
        removed_artifacts=ra,
        modified_artifacts=ma,
        metadata_changed=a_doc["metadata"] != b_doc["metadata"],
    )


# --- on-disk store ---------------------------------------------------------------


def _write_atomic(path: Path, data: Union[str, bytes]) -> None:
    tmp = path.with_name(path.name + ".tmp")
    if isinstance(data, str):
        tmp.write_text(data, encoding="utf-8")
    else:
        tmp.write_bytes(data)
    os.replace(tmp, path)


def _dump(doc: object) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def save_case(case: Case, case_dir: Union[str, Path]) -> Path:
    """Write the case document; artifact files are managed by the caller."""
    case_dir = Path(case_dir)
    case_dir.mkdir(parents=True, exist_ok=True)
    (case_dir / ARTIFACT_DIR).mkdir(exist_ok=True)
    (case_dir / SNAPSHOT_DIR).mkdir(exist_ok=True)
    (case_dir / CHANGE_DIR).mkdir(exist_ok=True)
    path = case_dir / CASE_FILE
    _write_atomic(path, _dump(case_to_doc(case)))
    return path


def load_case(case_dir: Union[str, Path], verify_artifacts: bool = True) -> Case:
    case_dir = Path(case_dir)
    path = case_dir / CASE_FILE
    if not path.is_file():
        raise CaseNotFound(f"no {CASE_FILE} in {case_dir}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedCase(f"case file is not valid JSON: {exc}")
    case = case_from_doc(doc)
    if verify_artifacts:
        for name, ref in case.artifacts.items():
            target = case_dir / ref.path
            if not target.is_file():
                raise IntegrityError(f"artifact {name!r} missing at {ref.path}")
            actual = file_digest(target)
            if actual != ref.sha256:
                raise IntegrityError(
                    f"artifact {name!r} digest mismatch: case says "
                    f"{ref.sha256[:12]}, file is {actual[:12]}"
                )
    return case


class CaseStore:
    """Directory-backed access to one case and its side documents."""

    def __init__(self, case_dir: Union[str, Path]):
        self.case_dir = Path(case_dir)

    # -- case document

    def load(self, verify_artifacts: bool = True) -> Case:
        return load_case(self.case_dir, verify_artifacts=verify_artifacts)

    def save(self, case: Case) -> None:
        save_case(case, self.case_dir)

    # -- locking

    @contextmanager
    def writer_lock(self, timeout: float = 10.0) -> Iterator[None]:
        self.case_dir.mkdir(parents=True, exist_ok=True)
        lock_path = self.case_dir / LOCK_FILE
        handle = open(lock_path, "a+")
        deadline = time.monotonic() + timeout
        try:
            while True:
                try:
                    fcntl.flock(handle, fcntl.LOCK_EX | fcntl.LOCK_NB)
                    break
                except BlockingIOError:
                    if time.monotonic() >= deadline:
                        raise LockTimeout(
                            f"could not acquire writer lock on {self.case_dir}"
                        )
                    time.sleep(0.02)
            yield
        finally:
            try:
                fcntl.flock(handle, fcntl.LOCK_UN)
            finally:
                handle.close()

    # -- artifacts

    def artifact_path(self, case: Case, name: str) -> Path:
        if name not in case.artifacts:
            raise UnknownArtifact(f"no artifact named {name!r}")
        return self.case_dir / case.artifacts[name].path

    def load_artifact(self, case: Case, name: str):
        """Load and parse an artifact by its declared kind."""
        ref = case.artifacts.get(name)
        if ref is None:
            raise UnknownArtifact(f"no artifact named {name!r}")
        path = self.case_dir / ref.path
        if not path.is_file():
            raise IntegrityError(f"artifact {name!r} missing at {ref.path}")
        data = path.read_bytes()
        actual = hashlib.sha256(data).hexdigest()
        if actual != ref.sha256:
            raise IntegrityError(f"artifact {name!r} digest mismatch")
        if ref.kind == "trace":
            return read_csv(data.decode("utf-8"))
        if ref.kind == "metric_report":
            return ingest_metric_report(data)
        return json.loads(data.decode("utf-8"))

    def load_artifacts(self, case: Case) -> dict[str, object]:
        return {name: self.load_artifact(case, name) for name in case.artifacts}

    def write_artifact(
        self, case: Case, name: str, data: Union[str, bytes]
    ) -> ArtifactRef:
        """Write artifact content and return its updated reference."""
        ref = case.artifacts.get(name)
        if ref is None:
            raise UnknownArtifact(f"no artifact named {name!r}")
        blob = data.encode("utf-8") if isinstance(data, str) else data
        target = self.case_dir / ref.path
        target.parent.mkdir(parents=True, exist_ok=True)
        _write_atomic(target, blob)
        return replace(ref, sha256=hashlib.sha256(blob).hexdigest())

    # -- attestation log (append-only)

    def attestations(self) -> dict[str, list[Attestation]]:
        log_path = self.case_dir / ATTESTATION_LOG
        result: dict[str, list[Attestation]] = {}
        if not log_path.is_file():
            return result
        for lineno, line in enumerate(
            log_path.read_text(encoding="utf-8").splitlines(), start=1
        ):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                att = Attestation(
                    evidence_id=doc["evidence_id"],
                    status=Status(doc["status"]),
                    by=doc["by"],
                    role=doc["role"],
                    at=doc["at"],
                    note=doc.get("note", ""),
                )
            except Exception as exc:
                raise MalformedCase(f"attestation log line {lineno}: {exc}")
            result.setdefault(att.evidence_id, []).append(att)
        return result

    def append_attestation(self, attestation: Attestation) -> None:
        log_path = self.case_dir / ATTESTATION_LOG
        line = canonical_json(
            {
                "evidence_id": attestation.evidence_id,
                "status": attestation.status.value,
                "by": attestation.by,
                "role": attestation.role,
                "at": attestation.at,
                "note": attestation.note,
            }
        )
        with open(log_path, "a", encoding="utf-8") as handle:
            handle.write(line + "\n")

    # -- snapshots

    def write_snapshot(self, snap: Snapshot) -> Path:
        snap_dir = self.case_dir / SNAPSHOT_DIR
        snap_dir.mkdir(parents=True, exist_ok=True)
        path = snap_dir / f"{snap.id}.json"
        if not path.exists():  # snapshots are immutable; same id, same content
            _write_atomic(path, _dump(snap.to_doc()))
        return path

    def list_snapshots(self) -> list[dict]:
        snap_dir = self.case_dir / SNAPSHOT_DIR
        if not snap_dir.is_dir():
            return []
        entries = []
        for path in sorted(snap_dir.glob("*.json")):
            doc = json.loads(path.read_text(encoding="utf-8"))
            entries.append(
                {
                    "id": doc["id"],
                    "label": doc["label"],
                    "created_at": doc["created_at"],
                }
            )
        return entries

    def load_snapshot(self, ref: str) -> Snapshot:
        """Resolve by exact id, unique id prefix, or exact label."""
        snap_dir = self.case_dir / SNAPSHOT_DIR
        candidates = []
        if snap_dir.is_dir():
            for path in sorted(snap_dir.glob("*.json")):
                doc = json.loads(path.read_text(encoding="utf-8"))
                if doc["id"] == ref:
                    candidates = [doc]
                    break
                if doc["id"].startswith(ref) or doc["label"] == ref:
                    candidates.append(doc)
        if not candidates:
            raise UnknownArtifact(f"no snapshot matching {ref!r}")
        if len(candidates) > 1:
            raise UnknownArtifact(f"snapshot reference {ref!r} is ambiguous")
        doc = candidates[0]
        return Snapshot(
            id=doc["id"],
            label=doc["label"],
            created_at=doc["created_at"],
            case=case_from_doc(doc["case"]),
        )

    # -- change documents

    def change_path(self, change_id: str) -> Path:
        return self.case_dir / CHANGE_DIR / f"{change_id}.json"

    def write_change(self, doc: dict) -> Path:
        path = self.change_path(doc["id"])
        path.parent.mkdir(parents=True, exist_ok=True)
        _write_atomic(path, _dump(doc))
        return path

    def read_change(self, change_id: str) -> dict:
        path = self.change_path(change_id)
        if not path.is_file():
            raise UnknownArtifact(f"no change request {change_id!r}")
        return json.loads(path.read_text(encoding="utf-8"))

    def list_changes(self) -> list[dict]:
        change_dir = self.case_dir / CHANGE_DIR
        if not change_dir.is_dir():
            return []
        return [
            json.loads(p.read_text(encoding="utf-8"))
            for p in sorted(change_dir.glob("*.json"))
        ]
