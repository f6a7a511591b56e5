"""Continuous safety-assurance engine.

Stores a GSN safety case whose evidence is evaluable (formulas over
traces, metrics from tool reports, manual attestations), answers
tag-driven change-impact queries, and classifies changes into the three
incorporation stages.
"""

from .change import (
    ApplyResult,
    ChangeRequest,
    ChangeSource,
    ImpactReport,
    apply_and_persist,
    apply_change,
    case_status,
    classify,
    impact,
    leaf_statuses,
    open_change,
)
from .env import ParamEntry, ParameterEnv
from .evaluator import (
    EvalOutcome,
    MonotonicityReport,
    check_monotone,
    evaluate,
    evaluate_detailed,
    evaluate_term,
)
from .evidence import (
    Attestation,
    EvidenceStatus,
    FormulaBinding,
    ManualBinding,
    MetricBinding,
    MetricReport,
    Remediation,
    attest,
    evaluate_evidence,
    ingest_metric_report,
)
from .formula import free_symbols, parse_formula, parse_term, pretty_print
from .gsn import (
    EdgeKind,
    GsnEdge,
    GsnNode,
    GsnTree,
    NodeKind,
    Status,
    build_tree,
    leaves,
    propagate_status,
)
from .kinematics import (
    AgentParams,
    FpScenario,
    min_safe_rear_gap,
    reaction_time,
    scenario_from_doc,
    scenario_linked_params,
    simulate_fp_braking,
    stopping_distance,
)
from .store import (
    ArtifactRef,
    Case,
    CaseMetadata,
    CaseStore,
    ChangeSet,
    Snapshot,
    TagQuery,
    case_digest,
    diff_cases,
    diff_snapshots,
    load_case,
    query_tags,
    save_case,
    snapshot,
)
from .trace import Trace, read_csv, write_csv
from .tribool import TriBool

__version__ = "0.1.0"
