"""Three-valued evaluation of formulas over parameter environments and traces.

Quantifiers expand over the finite sample set of the trace. A parameter
or signal name that cannot be resolved makes the enclosing atom UNKNOWN;
structural problems (division by zero, boolean/numeric signal mixups,
lookups outside the trace) are errors because they indicate a malformed
model rather than missing data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from . import formula as F
from .errors import EvaluationError, MissingTrace, UnboundParam
from .tribool import TriBool
from .trace import Trace


class _Missing:
    """Sentinel for a term that references unresolved symbols."""

    __slots__ = ()

    def __repr__(self):
        return "<missing>"


_MISSING = _Missing()


@dataclass(frozen=True)
class EvalOutcome:
    value: TriBool
    witness: Optional[dict[str, float]]
    missing: tuple[str, ...]

    def describe(self) -> str:
        if self.value is TriBool.UNKNOWN:
            return "unresolved symbols: " + ", ".join(self.missing)
        if self.value is TriBool.FALSE and self.witness:
            at = ", ".join(f"{k}={v:g}" for k, v in self.witness.items())
            return f"counterexample at {at}"
        return ""


class _Evaluator:
    def __init__(self, env: Mapping[str, float], trace: Optional[Trace]):
        self.env = env
        self.trace = trace
        self.bindings: dict[str, float] = {}
        self.missing: set[str] = set()
        self.witness: Optional[dict[str, float]] = None

    # -- terms

    def term(self, t: F.Term) -> Union[float, _Missing]:
        if isinstance(t, F.NumLit):
            return t.value
        if isinstance(t, F.Var):
            try:
                return self.bindings[t.name]
            except KeyError:
                raise EvaluationError(f"unbound variable {t.name!r}")
        if isinstance(t, F.Param):
            value = self.env.get(t.name)
            if value is None:
                self.missing.add(t.name)
                return _MISSING
            return value
        if isinstance(t, F.Signal):
            if self.trace is None:
                raise MissingTrace(
                    f"signal {t.name!r} referenced but no trace supplied"
                )
            at = self.term(t.time)
            if at is _MISSING:
                return _MISSING
            if not self.trace.has_signal(t.name):
                self.missing.add(t.name)
                return _MISSING
            if self.trace.is_boolean(t.name):
                raise EvaluationError(
                    f"boolean signal {t.name!r} used in numeric position"
                )
            return self.trace.value_at(t.name, at)
        if isinstance(t, F.Neg):
            v = self.term(t.operand)
            return _MISSING if v is _MISSING else -v
        if isinstance(t, F.Arith):
            lhs = self.term(t.lhs)
            rhs = self.term(t.rhs)
            if lhs is _MISSING or rhs is _MISSING:
                return _MISSING
            if t.op == "+":
                value = lhs + rhs
            elif t.op == "-":
                value = lhs - rhs
            elif t.op == "*":
                value = lhs * rhs
            else:
                if rhs == 0:
                    raise EvaluationError("division by zero")
                value = lhs / rhs
            if not math.isfinite(value):
                raise EvaluationError("non-finite arithmetic result in term")
            return value
        raise TypeError(f"not a term: {t!r}")

    # -- formulas

    def formula(self, f: F.Formula) -> TriBool:
        if isinstance(f, F.Literal):
            return TriBool.from_bool(f.value)
        if isinstance(f, F.Compare):
            lhs = self.term(f.lhs)
            rhs = self.term(f.rhs)
            if lhs is _MISSING or rhs is _MISSING:
                return TriBool.UNKNOWN
            return TriBool.from_bool(_COMPARES[f.op](lhs, rhs))
        if isinstance(f, F.BoolSignal):
            if self.trace is None:
                raise MissingTrace(
                    f"signal {f.name!r} referenced but no trace supplied"
                )
            at = self.term(f.time)
            if at is _MISSING:
                return TriBool.UNKNOWN
            if not self.trace.has_signal(f.name):
                self.missing.add(f.name)
                return TriBool.UNKNOWN
            if not self.trace.is_boolean(f.name):
                raise EvaluationError(
                    f"numeric signal {f.name!r} used as a boolean"
                )
            return TriBool.from_bool(self.trace.value_at(f.name, at))
        if isinstance(f, F.Not):
            return self.formula(f.operand).negate()
        if isinstance(f, F.And):
            result = TriBool.TRUE
            for item in f.items:
                v = self.formula(item)
                if v is TriBool.FALSE:
                    return TriBool.FALSE
                if v is TriBool.UNKNOWN:
                    result = TriBool.UNKNOWN
            return result
        if isinstance(f, F.Or):
            result = TriBool.FALSE
            for item in f.items:
                v = self.formula(item)
                if v is TriBool.TRUE:
                    return TriBool.TRUE
                if v is TriBool.UNKNOWN:
                    result = TriBool.UNKNOWN
            return result
        if isinstance(f, F.Implies):
            a = self.formula(f.antecedent)
            if a is TriBool.FALSE:
                return TriBool.TRUE
            b = self.formula(f.consequent)
            return a.implies(b)
        if isinstance(f, F.Quantifier):
            return self.quantifier(f)
        raise TypeError(f"not a formula: {f!r}")

    def quantifier(self, q: F.Quantifier) -> TriBool:
        if self.trace is None:
            raise MissingTrace("quantified formula requires a trace")
        if isinstance(q.domain, F.TraceDomain):
            indices = range(len(self.trace))
        else:
            lo = self.term(q.domain.lo)
            hi = self.term(q.domain.hi)
            if lo is _MISSING or hi is _MISSING:
                return TriBool.UNKNOWN
            if lo > hi:
                raise EvaluationError(
                    f"empty interval [{lo}, {hi}] in quantifier domain"
                )
            # bounds beyond the trace clamp to its span (documented)
            indices = self.trace.indices_between(
                self.trace.clamp(lo), self.trace.clamp(hi)
            )

        forall = q.kind == "forall"
        result = TriBool.TRUE if forall else TriBool.FALSE
        outer = self.bindings.get(q.var)
        shadowed = q.var in self.bindings
        try:
            for k in indices:
                t = self.trace.t0 + k * self.trace.dt
                self.bindings[q.var] = t
                v = self.formula(q.body)
                if forall and v is TriBool.FALSE:
                    if self.witness is None:
                        self.witness = dict(self.bindings)
                    return TriBool.FALSE
                if not forall and v is TriBool.TRUE:
                    return TriBool.TRUE
                if v is TriBool.UNKNOWN:
                    result = TriBool.UNKNOWN
        finally:
            if shadowed:
                self.bindings[q.var] = outer
            else:
                self.bindings.pop(q.var, None)
        return result


_COMPARES = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


def evaluate(
    f: F.Formula,
    env: Mapping[str, float],
    trace: Optional[Trace] = None,
) -> TriBool:
    return evaluate_detailed(f, env, trace).value


def evaluate_detailed(
    f: F.Formula,
    env: Mapping[str, float],
    trace: Optional[Trace] = None,
) -> EvalOutcome:
    ev = _Evaluator(env, trace)
    value = ev.formula(f)
    witness = ev.witness if value is TriBool.FALSE else None
    missing = tuple(sorted(ev.missing)) if value is TriBool.UNKNOWN else ()
    return EvalOutcome(value=value, witness=witness, missing=missing)


def evaluate_term(
    term: F.Term,
    env: Mapping[str, float],
    trace: Optional[Trace] = None,
) -> float:
    """Evaluate a closed term; unresolved symbols raise UnboundParam."""
    ev = _Evaluator(env, trace)
    value = ev.term(term)
    if value is _MISSING:
        raise UnboundParam(ev.missing)
    return value


# --- sampled monotonicity check ---------------------------------------------


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of a sampled (not proven) monotonicity check."""

    holds: bool
    direction: str
    param: str
    lo: float
    hi: float
    samples: int
    violation: Optional[tuple[float, float, float, float]]
    note: str = (
        "sampled check over evenly spaced points; holds means the sampled "
        "sequence is strictly monotone, it is not a proof"
    )

    def to_doc(self) -> dict:
        return {
            "holds": self.holds,
            "direction": self.direction,
            "param": self.param,
            "lo": self.lo,
            "hi": self.hi,
            "samples": self.samples,
            "violation": list(self.violation) if self.violation else None,
            "note": self.note,
        }


def check_monotone(
    term: Union[F.Term, str],
    param: str,
    lo: float,
    hi: float,
    samples: int,
    direction: str,
    env: Mapping[str, float],
) -> MonotonicityReport:
    """Sample `term` at evenly spaced values of `param` over [lo, hi].

    Every other symbol must be bound in `env`. Reports the first pair of
    consecutive samples violating strict monotonicity, if any.
    """
    if isinstance(term, str):
        term = F.parse_term(term)
    if direction not in ("increasing", "decreasing"):
        raise ValueError(f"direction must be increasing/decreasing: {direction}")
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    others = F.term_params(term) - {param}
    unbound = {name for name in others if name not in env}
    if F.term_signals(term):
        unbound |= set(F.term_signals(term))
    if unbound:
        raise UnboundParam(unbound)

    step = (hi - lo) / (samples - 1)
    xs = [lo + i * step for i in range(samples)]
    xs[-1] = hi
    scoped = dict(env)
    ys: list[float] = []
    for x in xs:
        scoped[param] = x
        ys.append(evaluate_term(term, scoped))

    increasing = direction == "increasing"
    for i in range(len(xs) - 1):
        ok = ys[i + 1] > ys[i] if increasing else ys[i + 1] < ys[i]
        if not ok:
            return MonotonicityReport(
                holds=False,
                direction=direction,
                param=param,
                lo=lo,
                hi=hi,
                samples=samples,
                violation=(xs[i], ys[i], xs[i + 1], ys[i + 1]),
            )
    return MonotonicityReport(
        holds=True,
        direction=direction,
        param=param,
        lo=lo,
        hi=hi,
        samples=samples,
        violation=None,
    )
