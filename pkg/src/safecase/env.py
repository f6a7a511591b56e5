"""Parameter environment: named constants with units, some derived.

A derived entry carries an arithmetic expression over other parameters
and is recomputed whenever a base value changes, so constants like a
worst-case braking window stay consistent with the frame rate and speed
they were derived from. The stored value is kept for audit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

from . import formula as F
from .errors import BadDerivation, DerivedParamUpdate, UnknownParam
from .evaluator import evaluate_term


@dataclass(frozen=True)
class ParamEntry:
    name: str
    value: float
    unit: str = ""
    derived: Optional[str] = None  # term text over other parameter names

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise BadDerivation(f"parameter {self.name}: non-finite value")


class ParameterEnv:
    """Immutable name -> (value, unit, derivation) map."""

    def __init__(self, entries: list[ParamEntry] | dict[str, ParamEntry]):
        if isinstance(entries, dict):
            entries = list(entries.values())
        by_name: dict[str, ParamEntry] = {}
        for e in entries:
            if e.name in by_name:
                raise BadDerivation(f"duplicate parameter {e.name!r}")
            by_name[e.name] = e
        self._entries = dict(sorted(by_name.items()))
        self._recompute_derived()

    # -- construction helpers

    def _recompute_derived(self) -> None:
        deps: dict[str, frozenset[str]] = {}
        for name, entry in self._entries.items():
            if entry.derived is None:
                continue
            try:
                term = F.parse_term(entry.derived)
            except Exception as exc:
                raise BadDerivation(f"parameter {name}: {exc}")
            if F.term_signals(term):
                raise BadDerivation(
                    f"parameter {name}: derivations cannot reference signals"
                )
            deps[name] = F.term_params(term)
            unknown = deps[name] - set(self._entries)
            if unknown:
                raise BadDerivation(
                    f"parameter {name} derives from unknown "
                    f"parameter(s): {', '.join(sorted(unknown))}"
                )

        # evaluate derivations in dependency order
        resolved: dict[str, float] = {
            n: e.value for n, e in self._entries.items() if e.derived is None
        }
        pending = dict(deps)
        while pending:
            ready = [n for n, d in pending.items() if d <= set(resolved)]
            if not ready:
                raise BadDerivation(
                    "cyclic parameter derivation involving: "
                    + ", ".join(sorted(pending))
                )
            for name in ready:
                entry = self._entries[name]
                value = evaluate_term(F.parse_term(entry.derived), resolved)
                if not math.isfinite(value):
                    raise BadDerivation(f"parameter {name}: non-finite result")
                resolved[name] = value
                self._entries[name] = ParamEntry(
                    name=name, value=value, unit=entry.unit, derived=entry.derived
                )
                del pending[name]

    # -- read API

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __iter__(self):
        return iter(self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)

    def entry(self, name: str) -> ParamEntry:
        try:
            return self._entries[name]
        except KeyError:
            raise UnknownParam(f"parameter {name!r} is not in the environment")

    def value(self, name: str) -> float:
        return self.entry(name).value

    def as_dict(self) -> dict[str, float]:
        return {n: e.value for n, e in self._entries.items()}

    def derived_names(self) -> frozenset[str]:
        return frozenset(n for n, e in self._entries.items() if e.derived)

    def derivation_dependents(self, names: set[str]) -> frozenset[str]:
        """Transitive closure: names plus derived params depending on them."""
        affected = set(names)
        changed = True
        while changed:
            changed = False
            for n, e in self._entries.items():
                if e.derived is None or n in affected:
                    continue
                if F.term_params(F.parse_term(e.derived)) & affected:
                    affected.add(n)
                    changed = True
        return frozenset(affected)

    # -- update API

    def with_updates(self, updates: Mapping[str, float]) -> "ParameterEnv":
        """New environment with base values replaced; derived recomputed."""
        entries = dict(self._entries)
        for name, value in updates.items():
            if name not in entries:
                raise UnknownParam(
                    f"parameter {name!r} is not in the environment"
                )
            old = entries[name]
            if old.derived is not None:
                raise DerivedParamUpdate(
                    f"parameter {name!r} is derived ({old.derived}); update "
                    f"its inputs instead"
                )
            if not math.isfinite(float(value)):
                raise BadDerivation(f"parameter {name}: non-finite value")
            entries[name] = ParamEntry(
                name=name, value=float(value), unit=old.unit, derived=None
            )
        return ParameterEnv(list(entries.values()))

    # -- serialization

    def to_doc(self) -> dict[str, dict]:
        return {
            n: {
                "value": e.value,
                "unit": e.unit,
                "derived": e.derived,
            }
            for n, e in self._entries.items()
        }

    @staticmethod
    def from_doc(doc: Mapping[str, Mapping]) -> "ParameterEnv":
        entries = [
            ParamEntry(
                name=name,
                value=float(spec["value"]),
                unit=str(spec.get("unit", "")),
                derived=spec.get("derived"),
            )
            for name, spec in doc.items()
        ]
        return ParameterEnv(entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, ParameterEnv) and self._entries == other._entries

    def __repr__(self) -> str:
        return f"ParameterEnv({list(self._entries)})"
