"""Three-valued truth with strong-Kleene connectives.

UNKNOWN models missing information (an unresolved parameter or signal),
so FALSE dominates conjunction and TRUE dominates disjunction: knowing
one conjunct is false settles the conjunction no matter what the
missing data turns out to be.
"""

from __future__ import annotations

import enum
from typing import Iterable


class TriBool(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @staticmethod
    def from_bool(b: bool) -> "TriBool":
        return TriBool.TRUE if b else TriBool.FALSE

    def is_true(self) -> bool:
        return self is TriBool.TRUE

    def is_false(self) -> bool:
        return self is TriBool.FALSE

    def is_unknown(self) -> bool:
        return self is TriBool.UNKNOWN

    def negate(self) -> "TriBool":
        if self is TriBool.UNKNOWN:
            return self
        return TriBool.from_bool(self is TriBool.FALSE)

    def and_(self, other: "TriBool") -> "TriBool":
        if TriBool.FALSE in (self, other):
            return TriBool.FALSE
        if TriBool.UNKNOWN in (self, other):
            return TriBool.UNKNOWN
        return TriBool.TRUE

    def or_(self, other: "TriBool") -> "TriBool":
        if TriBool.TRUE in (self, other):
            return TriBool.TRUE
        if TriBool.UNKNOWN in (self, other):
            return TriBool.UNKNOWN
        return TriBool.FALSE

    def implies(self, other: "TriBool") -> "TriBool":
        return self.negate().or_(other)

    @staticmethod
    def all_(values: Iterable["TriBool"]) -> "TriBool":
        """Conjunction over a finite iterable; TRUE when empty."""
        result = TriBool.TRUE
        for v in values:
            if v is TriBool.FALSE:
                return TriBool.FALSE
            if v is TriBool.UNKNOWN:
                result = TriBool.UNKNOWN
        return result

    @staticmethod
    def any_(values: Iterable["TriBool"]) -> "TriBool":
        """Disjunction over a finite iterable; FALSE when empty."""
        result = TriBool.FALSE
        for v in values:
            if v is TriBool.TRUE:
                return TriBool.TRUE
            if v is TriBool.UNKNOWN:
                result = TriBool.UNKNOWN
        return result

    def __str__(self) -> str:
        return self.value
