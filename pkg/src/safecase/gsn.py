"""Typed GSN argumentation tree with three-valued status propagation.

The tree is the why-is-it-safe structure: goals decomposed via
strategies down to solutions (evidence), with assumptions, contexts and
justifications attached sideways. Statuses live on the leaves
(solutions and assumptions) and are propagated upward so one invalid
leaf taints every goal above it.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .errors import (
    BadEdgeKind,
    CycleDetected,
    DanglingEdge,
    DisconnectedNode,
    InvalidNode,
    MultipleParents,
    NoRoot,
    UnknownLeafId,
)

NODE_ID_RE = re.compile(r"^[A-Za-z0-9_.-]+$")


class NodeKind(enum.Enum):
    GOAL = "goal"
    STRATEGY = "strategy"
    SOLUTION = "solution"
    ASSUMPTION = "assumption"
    CONTEXT = "context"
    JUSTIFICATION = "justification"


class EdgeKind(enum.Enum):
    SUPPORTED_BY = "supported_by"
    IN_CONTEXT_OF = "in_context_of"


class Status(enum.Enum):
    """Three-valued validity of a node; UNKNOWN means not demonstrable."""

    VALID = "valid"
    INVALID = "invalid"
    UNKNOWN = "unknown"


#: node kinds that may appear as SupportedBy targets (the argument spine)
SPINE_KINDS = frozenset({NodeKind.GOAL, NodeKind.STRATEGY, NodeKind.SOLUTION})
#: node kinds attached via InContextOf
CONTEXTUAL_KINDS = frozenset(
    {NodeKind.ASSUMPTION, NodeKind.CONTEXT, NodeKind.JUSTIFICATION}
)
#: leaf kinds that carry evidence bindings and statuses
LEAF_KINDS = frozenset({NodeKind.SOLUTION, NodeKind.ASSUMPTION})


def normalize_tag(tag: str) -> str:
    """Lowercase, trim, and collapse internal whitespace to single spaces."""
    return " ".join(tag.split()).lower()


@dataclass(frozen=True)
class GsnNode:
    id: str
    kind: NodeKind
    text: str
    tags: frozenset[str] = frozenset()
    binding: Optional[str] = None
    undeveloped: bool = False

    def __post_init__(self):
        if not NODE_ID_RE.match(self.id or ""):
            raise InvalidNode(f"bad node id {self.id!r}")
        object.__setattr__(
            self, "tags", frozenset(normalize_tag(t) for t in self.tags)
        )
        if any(not t for t in self.tags):
            raise InvalidNode(f"node {self.id}: empty tag")
        if self.binding is not None and self.kind not in LEAF_KINDS:
            raise InvalidNode(
                f"node {self.id}: only solutions and assumptions may carry "
                f"an evidence binding, not {self.kind.value}"
            )
        if self.undeveloped and self.kind not in (
            NodeKind.GOAL,
            NodeKind.STRATEGY,
        ):
            raise InvalidNode(
                f"node {self.id}: only goals/strategies can be undeveloped"
            )


@dataclass(frozen=True)
class GsnEdge:
    source: str
    target: str
    kind: EdgeKind


# legal (source kind, target kind) pairs per edge kind
_SUPPORTED_BY_SOURCES = frozenset({NodeKind.GOAL, NodeKind.STRATEGY})
_SUPPORTED_BY_TARGETS = SPINE_KINDS
_IN_CONTEXT_OF_SOURCES = frozenset({NodeKind.GOAL, NodeKind.STRATEGY})
_IN_CONTEXT_OF_TARGETS = CONTEXTUAL_KINDS


@dataclass(frozen=True)
class GsnTree:
    """Validated argumentation tree. Immutable; mutate by rebuilding."""

    nodes: Mapping[str, GsnNode]
    edges: tuple[GsnEdge, ...]
    root: str
    _children: Mapping[str, tuple[str, ...]] = field(repr=False, default=None)
    _contexts: Mapping[str, tuple[str, ...]] = field(repr=False, default=None)

    def supported_children(self, node_id: str) -> tuple[str, ...]:
        return self._children.get(node_id, ())

    def context_attachments(self, node_id: str) -> tuple[str, ...]:
        return self._contexts.get(node_id, ())


def build_tree(
    nodes: Iterable[GsnNode], edges: Iterable[GsnEdge], root: str
) -> GsnTree:
    """Validating constructor; raises a GsnError subclass on any violation."""
    node_map: dict[str, GsnNode] = {}
    for n in nodes:
        if n.id in node_map:
            raise InvalidNode(f"duplicate node id {n.id!r}")
        node_map[n.id] = n
    edge_list = tuple(edges)

    for e in edge_list:
        for endpoint in (e.source, e.target):
            if endpoint not in node_map:
                raise DanglingEdge(
                    f"edge {e.source}->{e.target} references unknown node "
                    f"{endpoint!r}"
                )
        src, tgt = node_map[e.source].kind, node_map[e.target].kind
        if e.kind is EdgeKind.SUPPORTED_BY:
            if src not in _SUPPORTED_BY_SOURCES or tgt not in _SUPPORTED_BY_TARGETS:
                raise BadEdgeKind(
                    f"supported-by {e.source}({src.value}) -> "
                    f"{e.target}({tgt.value}) is not allowed"
                )
        else:
            if src not in _IN_CONTEXT_OF_SOURCES or tgt not in _IN_CONTEXT_OF_TARGETS:
                raise BadEdgeKind(
                    f"in-context-of {e.source}({src.value}) -> "
                    f"{e.target}({tgt.value}) is not allowed"
                )

    support_parent: dict[str, str] = {}
    children: dict[str, list[str]] = {}
    contexts: dict[str, list[str]] = {}
    for e in edge_list:
        if e.kind is EdgeKind.SUPPORTED_BY:
            if e.target in support_parent:
                raise MultipleParents(
                    f"node {e.target} has supported-by parents "
                    f"{support_parent[e.target]} and {e.source}"
                )
            support_parent[e.target] = e.source
            children.setdefault(e.source, []).append(e.target)
        else:
            contexts.setdefault(e.source, []).append(e.target)

    # acyclicity of the supported-by subgraph (checked before the root so
    # a cycle through the declared root is still reported as a cycle)
    indegree = {nid: 0 for nid in node_map}
    for target in support_parent:
        indegree[target] = 1
    queue = [nid for nid, deg in indegree.items() if deg == 0]
    seen = 0
    while queue:
        nid = queue.pop()
        seen += 1
        for kid in children.get(nid, ()):
            indegree[kid] -= 1
            if indegree[kid] == 0:
                queue.append(kid)
    if seen != len(node_map):
        cyclic = sorted(nid for nid, deg in indegree.items() if deg > 0)
        raise CycleDetected(f"supported-by cycle through {', '.join(cyclic)}")

    if root not in node_map:
        raise NoRoot(f"root {root!r} is not a node")
    if node_map[root].kind is not NodeKind.GOAL:
        raise NoRoot(f"root {root!r} must be a goal")
    if root in support_parent:
        raise NoRoot(f"root {root!r} has an incoming supported-by edge")
    for nid, node in node_map.items():
        if node.kind is NodeKind.GOAL and nid != root and nid not in support_parent:
            raise NoRoot(f"goal {nid} is a second root (no supported-by parent)")

    # everything on the spine must hang off the root
    reachable: set[str] = set()
    stack = [root]
    while stack:
        nid = stack.pop()
        if nid in reachable:
            continue
        reachable.add(nid)
        stack.extend(children.get(nid, ()))

    for nid, node in node_map.items():
        if node.kind in SPINE_KINDS and nid not in reachable:
            raise DisconnectedNode(
                f"{node.kind.value} {nid} is not reachable from the root"
            )
        if node.kind in (NodeKind.GOAL, NodeKind.STRATEGY):
            if not children.get(nid) and not node.undeveloped:
                raise InvalidNode(
                    f"{node.kind.value} {nid} has no supporting children and "
                    f"is not marked undeveloped"
                )

    return GsnTree(
        nodes=dict(node_map),
        edges=edge_list,
        root=root,
        _children={k: tuple(v) for k, v in children.items()},
        _contexts={k: tuple(v) for k, v in contexts.items()},
    )


def leaves(tree: GsnTree) -> list[str]:
    """Solution and assumption node ids, sorted for determinism."""
    return sorted(
        nid for nid, n in tree.nodes.items() if n.kind in LEAF_KINDS
    )


def propagate_status(
    tree: GsnTree, leaf_statuses: Mapping[str, Status]
) -> dict[str, Status]:
    """Propagate leaf validity up to the root goal.

    A goal/strategy is INVALID if any supporting child or any attached
    assumption is INVALID; else UNKNOWN if any is UNKNOWN (or the node is
    undeveloped); else VALID. Contexts and justifications are always
    VALID and never affect their parent. Missing leaves default UNKNOWN.
    """
    leaf_set = set(leaves(tree))
    for key in leaf_statuses:
        if key not in leaf_set:
            raise UnknownLeafId(f"{key!r} is not a leaf of this tree")

    status: dict[str, Status] = {}
    for nid, node in tree.nodes.items():
        if node.kind in LEAF_KINDS:
            status[nid] = leaf_statuses.get(nid, Status.UNKNOWN)
        elif node.kind in (NodeKind.CONTEXT, NodeKind.JUSTIFICATION):
            status[nid] = Status.VALID

    def compute(nid: str) -> Status:
        if nid in status:
            return status[nid]
        node = tree.nodes[nid]
        inputs: list[Status] = []
        for kid in tree.supported_children(nid):
            inputs.append(compute(kid))
        for ctx in tree.context_attachments(nid):
            if tree.nodes[ctx].kind is NodeKind.ASSUMPTION:
                inputs.append(compute(ctx))
        result = Status.VALID
        if node.undeveloped:
            result = Status.UNKNOWN
        for s in inputs:
            if s is Status.INVALID:
                return status.setdefault(nid, Status.INVALID)
            if s is Status.UNKNOWN:
                result = Status.UNKNOWN
        status[nid] = result
        return result

    # recursion depth is bounded by tree height; compute every node so the
    # returned map is total (including attachments hanging off any node)
    for nid in sorted(tree.nodes):
        compute(nid)
    return status
