"""Exception hierarchy shared by all safecase modules.

Every error a caller is expected to handle has its own class so CLI and
HTTP layers can map them to exit codes / status codes without string
matching.
"""

from __future__ import annotations


class SafecaseError(Exception):
    """Base class for all errors raised by this package."""

    #: machine-readable code used by the HTTP error envelope
    code = "internal"


# --- argumentation tree -------------------------------------------------

class GsnError(SafecaseError):
    code = "invalid_tree"


class InvalidNode(GsnError):
    code = "invalid_node"


class CycleDetected(GsnError):
    code = "cycle_detected"


class MultipleParents(GsnError):
    code = "multiple_parents"


class DanglingEdge(GsnError):
    code = "dangling_edge"


class BadEdgeKind(GsnError):
    code = "bad_edge_kind"


class NoRoot(GsnError):
    code = "no_root"


class DisconnectedNode(GsnError):
    code = "disconnected_node"


class UnknownLeafId(GsnError):
    code = "unknown_leaf_id"


# --- formula language ---------------------------------------------------

class FormulaError(SafecaseError):
    code = "formula_error"


class FormulaSyntaxError(FormulaError):
    code = "syntax_error"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnboundVariable(FormulaError):
    code = "unbound_variable"

    def __init__(self, name: str, line: int = 0, column: int = 0):
        loc = f" (line {line}, column {column})" if line else ""
        super().__init__(f"unbound variable '{name}'{loc}")
        self.name = name


class EvaluationError(FormulaError):
    """Malformed model during evaluation (div by zero, type mismatch, ...)."""

    code = "evaluation_error"


class TraceRangeError(EvaluationError):
    code = "trace_range_error"


class MissingTrace(FormulaError):
    code = "missing_trace"


class UnboundParam(FormulaError):
    code = "unbound_param"

    def __init__(self, names):
        self.names = sorted(names)
        super().__init__("unbound symbol(s): " + ", ".join(self.names))


# --- parameter environment ----------------------------------------------

class EnvError(SafecaseError):
    code = "env_error"


class UnknownParam(EnvError):
    code = "unknown_param"


class DerivedParamUpdate(EnvError):
    code = "derived_param_update"


class BadDerivation(EnvError):
    code = "bad_derivation"


# --- kinematics ----------------------------------------------------------

class KinematicsError(SafecaseError):
    code = "kinematics_error"


class NonPositiveFrameRate(KinematicsError):
    code = "non_positive_frame_rate"


class NonPositiveDecel(KinematicsError):
    code = "non_positive_decel"


class HorizonTooShort(KinematicsError):
    code = "horizon_too_short"


class BadScenario(KinematicsError):
    code = "bad_scenario"


# --- traces ----------------------------------------------------------------

class TraceError(SafecaseError):
    code = "trace_error"


class MalformedTrace(TraceError):
    code = "malformed_trace"


# --- evidence --------------------------------------------------------------

class EvidenceError(SafecaseError):
    code = "evidence_error"


class ParseFailure(EvidenceError):
    """Stored formula no longer parses; signals case-file corruption."""

    code = "parse_failure"


class MalformedReport(EvidenceError):
    code = "malformed_report"


class NonFiniteValue(EvidenceError):
    code = "non_finite_value"


class WrongBindingKind(EvidenceError):
    code = "wrong_binding_kind"


class RoleMismatch(EvidenceError):
    code = "role_mismatch"


# --- case store --------------------------------------------------------------

class StoreError(SafecaseError):
    code = "store_error"


class MalformedCase(StoreError):
    code = "malformed_case"


class SchemaVersionMismatch(StoreError):
    code = "schema_version_mismatch"


class IntegrityError(StoreError):
    code = "integrity_error"


class UnknownArtifact(StoreError):
    code = "unknown_artifact"


class CaseNotFound(StoreError):
    code = "case_not_found"


class LockTimeout(StoreError):
    code = "lock_conflict"


# --- change engine --------------------------------------------------------

class ChangeError(SafecaseError):
    code = "change_error"


class EmptyChange(ChangeError):
    code = "empty_change"


class UnknownChange(ChangeError):
    code = "unknown_change"


class StageNotOne(ChangeError):
    code = "stage_not_one"


class StaleReport(ChangeError):
    code = "stale_report"
