"""Hypothesis strategies for formulas, trees, and cases."""

from __future__ import annotations

import hypothesis.strategies as st

from safecase import formula as F
from safecase.env import ParamEntry, ParameterEnv
from safecase.evidence import FormulaBinding, ManualBinding, MetricBinding
from safecase.gsn import EdgeKind, GsnEdge, GsnNode, NodeKind, build_tree
from safecase.store import ArtifactRef, Case, CaseMetadata
from safecase.trace import Trace

PARAM_NAMES = ("p", "q", "r_lim", "vmax")
SIGNAL_NAMES = ("x", "y")
BOOL_SIGNAL_NAMES = ("flag", "armed")

numbers = st.floats(
    min_value=-50, max_value=50, allow_nan=False, allow_infinity=False
).map(lambda v: round(v, 3))


@st.composite
def terms(draw, scope: tuple[str, ...], depth: int = 2, signals: bool = True):
    choices = ["num", "param"]
    if scope:
        choices.append("var")
    if depth > 0:
        choices += ["arith", "neg"]
        if signals and scope:
            choices.append("signal")
    kind = draw(st.sampled_from(choices))
    if kind == "num":
        return F.NumLit(draw(numbers))
    if kind == "param":
        return F.Param(draw(st.sampled_from(PARAM_NAMES)))
    if kind == "var":
        return F.Var(draw(st.sampled_from(scope)))
    if kind == "neg":
        return F.neg(draw(terms(scope, depth - 1, signals)))
    if kind == "signal":
        # sample signals at the innermost bound time so lookups stay in range
        return F.Signal(
            draw(st.sampled_from(SIGNAL_NAMES)), F.Var(scope[-1])
        )
    op = draw(st.sampled_from(["+", "-", "*"]))
    return F.Arith(
        op,
        draw(terms(scope, depth - 1, signals)),
        draw(terms(scope, depth - 1, signals)),
    )


@st.composite
def formulas(
    draw,
    scope: tuple[str, ...] = (),
    depth: int = 3,
    quantified: bool = True,
):
    choices = ["literal", "compare"]
    if scope:
        choices.append("bool_signal")
    if depth > 0:
        choices += ["not", "and", "or", "implies"]
        if quantified and len(scope) < 3:
            choices += ["forall", "exists"]
    kind = draw(st.sampled_from(choices))
    if kind == "literal":
        return F.Literal(draw(st.booleans()))
    if kind == "compare":
        op = draw(st.sampled_from(["<", "<=", ">", ">=", "==", "!="]))
        return F.Compare(
            op, draw(terms(scope, 2)), draw(terms(scope, 2))
        )
    if kind == "bool_signal":
        return F.BoolSignal(
            draw(st.sampled_from(BOOL_SIGNAL_NAMES)), F.Var(scope[-1])
        )
    if kind == "not":
        return F.Not(draw(formulas(scope, depth - 1, quantified)))
    if kind in ("and", "or"):
        items = tuple(
            draw(
                st.lists(
                    formulas(scope, depth - 1, quantified),
                    min_size=2,
                    max_size=3,
                )
            )
        )
        return F.And(items) if kind == "and" else F.Or(items)
    if kind == "implies":
        return F.Implies(
            draw(formulas(scope, depth - 1, quantified)),
            draw(formulas(scope, depth - 1, quantified)),
        )
    var = draw(st.sampled_from(["t", "u", "w"]))
    if var in scope:
        var = var + str(len(scope))
    if draw(st.booleans()) or not scope:
        domain = F.TraceDomain()
    else:
        # interval bounds anchored at an outer variable stay clampable
        lo = F.Var(scope[-1])
        width = F.NumLit(draw(st.floats(min_value=0.0, max_value=5.0).map(lambda v: round(v, 2))))
        domain = F.Interval(lo, F.Arith("+", F.Var(scope[-1]), width))
    body = draw(formulas(scope + (var,), depth - 1, quantified))
    return F.Quantifier(kind, var, domain, body)


@st.composite
def small_traces(draw):
    n = draw(st.integers(min_value=1, max_value=20))
    dt = draw(st.sampled_from([0.1, 0.5, 1.0]))
    columns = {}
    for name in SIGNAL_NAMES:
        columns[name] = [
            draw(st.floats(min_value=-10, max_value=10, allow_nan=False))
            for _ in range(n)
        ]
    for name in BOOL_SIGNAL_NAMES:
        columns[name] = [draw(st.booleans()) for _ in range(n)]
    return Trace(dt=dt, t0=0.0, columns=columns)


@st.composite
def param_envs(draw):
    bound = draw(st.sets(st.sampled_from(PARAM_NAMES)))
    return {
        name: draw(st.floats(min_value=-10, max_value=10, allow_nan=False))
        for name in bound
    }


# --- random GSN trees ---------------------------------------------------------


@st.composite
def gsn_trees(draw):
    """Valid trees: a goal root, strategies/goals inside, leaves at the
    bottom, optional contextual attachments."""
    nodes = [GsnNode("G0", NodeKind.GOAL, "root goal")]
    edges: list[GsnEdge] = []
    spine = ["G0"]  # goals/strategies that still need children
    counter = 0
    budget = draw(st.integers(min_value=1, max_value=12))
    while spine:
        parent = spine.pop(0)
        n_children = draw(st.integers(min_value=1, max_value=3))
        for _ in range(n_children):
            counter += 1
            if budget <= 0 or draw(st.integers(0, 2)) == 0:
                kind = NodeKind.SOLUTION
                node_id = f"Sn{counter}"
            else:
                budget -= 1
                kind = draw(
                    st.sampled_from([NodeKind.GOAL, NodeKind.STRATEGY])
                )
                node_id = f"N{counter}"
            nodes.append(GsnNode(node_id, kind, f"node {counter}"))
            edges.append(GsnEdge(parent, node_id, EdgeKind.SUPPORTED_BY))
            if kind is not NodeKind.SOLUTION:
                spine.append(node_id)
        # contextual attachments
        if draw(st.booleans()):
            counter += 1
            kind = draw(
                st.sampled_from(
                    [NodeKind.ASSUMPTION, NodeKind.CONTEXT, NodeKind.JUSTIFICATION]
                )
            )
            prefix = {"assumption": "A", "context": "C", "justification": "J"}[
                kind.value
            ]
            node_id = f"{prefix}{counter}"
            nodes.append(GsnNode(node_id, kind, f"attachment {counter}"))
            edges.append(GsnEdge(parent, node_id, EdgeKind.IN_CONTEXT_OF))
    return build_tree(nodes, edges, root="G0")


@st.composite
def cases(draw):
    """Random valid cases with mixed binding kinds and no artifacts."""
    tree = draw(gsn_trees())
    from safecase.gsn import leaves

    bindings = {}
    nodes = dict(tree.nodes)
    for leaf_id in leaves(tree):
        style = draw(st.integers(0, 3))
        if style == 0:
            continue  # unbound leaf
        if style == 1:
            bindings[leaf_id] = ManualBinding(
                required_role=draw(st.sampled_from(["safety", "ops"]))
            )
        elif style == 2:
            bindings[leaf_id] = FormulaBinding(
                formula=draw(st.sampled_from(["p > 0", "p + q <= 10", "true"]))
            )
        else:
            bindings[leaf_id] = MetricBinding(
                metric="m1",
                comparator=draw(st.sampled_from([">=", "<", "=="])),
                threshold=draw(numbers),
                report_ref="report",
            )
        node = nodes[leaf_id]
        nodes[leaf_id] = GsnNode(
            node.id, node.kind, node.text, node.tags, leaf_id, node.undeveloped
        )
    tags_pool = ["alpha", "beta", "gamma", "frame rate"]
    tagged_nodes = []
    for node in nodes.values():
        tags = draw(
            st.sets(st.sampled_from(tags_pool), min_size=0, max_size=2)
        )
        tagged_nodes.append(
            GsnNode(node.id, node.kind, node.text, frozenset(tags), node.binding, node.undeveloped)
        )
    tree = build_tree(tagged_nodes, list(tree.edges), root=tree.root)

    env_entries = [
        ParamEntry("p", draw(numbers), "m"),
        ParamEntry("q", draw(numbers), "s"),
    ]
    if draw(st.booleans()):
        env_entries.append(ParamEntry("total", 0.0, "m", derived="p + q"))
    artifacts = {}
    if any(isinstance(b, MetricBinding) for b in bindings.values()):
        artifacts["report"] = ArtifactRef(
            path="artifacts/report.json",
            sha256="0" * 64,
            kind="metric_report",
        )
    return Case(
        tree=tree,
        env=ParameterEnv(env_entries),
        bindings=bindings,
        artifacts=artifacts,
        metadata=CaseMetadata(
            name=draw(st.sampled_from(["case-a", "case-b"])),
            version=draw(st.sampled_from(["1", "2.0"])),
            description="generated",
        ),
    )
