"""Uniformly sampled signal table: the finite model for temporal formulas.

Signals are left-continuous piecewise-constant: a lookup at time t reads
the latest sample with timestamp <= t. Lookups outside [t0, t_end] are
errors; quantifier interval bounds are clamped by the evaluator before
any lookup happens.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .errors import MalformedTrace, TraceRangeError

Column = Union[Sequence[float], Sequence[bool]]

# relative slack absorbing float noise in time arithmetic
_REL_EPS = 1e-9


@dataclass(frozen=True)
class Trace:
    dt: float
    t0: float
    columns: Mapping[str, tuple]

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise MalformedTrace(f"dt must be positive, got {self.dt}")
        if not math.isfinite(self.t0):
            raise MalformedTrace("t0 must be finite")
        if not self.columns:
            raise MalformedTrace("trace needs at least one column")
        lengths = {len(c) for c in self.columns.values()}
        if len(lengths) != 1:
            raise MalformedTrace(f"column lengths differ: {sorted(lengths)}")
        (n,) = lengths
        if n < 1:
            raise MalformedTrace("columns must hold at least one sample")
        frozen = {}
        for name, col in self.columns.items():
            values = tuple(col)
            kinds = {type(v) for v in values}
            if kinds <= {bool}:
                pass
            elif bool in kinds:
                raise MalformedTrace(f"column {name!r} mixes bool and numbers")
            else:
                values = tuple(float(v) for v in values)
                if any(not math.isfinite(v) for v in values):
                    raise MalformedTrace(f"column {name!r} has non-finite values")
            frozen[name] = values
        object.__setattr__(self, "columns", frozen)

    def __len__(self) -> int:
        return len(next(iter(self.columns.values())))

    @property
    def t_end(self) -> float:
        return self.t0 + (len(self) - 1) * self.dt

    def times(self) -> list[float]:
        return [self.t0 + k * self.dt for k in range(len(self))]

    def index_at(self, t: float) -> int:
        """Index of the latest sample with timestamp <= t."""
        k = math.floor((t - self.t0) / self.dt + _REL_EPS)
        if k < 0 or k >= len(self):
            raise TraceRangeError(
                f"time {t} outside trace span [{self.t0}, {self.t_end}]"
            )
        return k

    def value_at(self, name: str, t: float):
        return self.columns[name][self.index_at(t)]

    def has_signal(self, name: str) -> bool:
        return name in self.columns

    def is_boolean(self, name: str) -> bool:
        return isinstance(self.columns[name][0], bool)

    def clamp(self, t: float) -> float:
        return min(max(t, self.t0), self.t_end)

    def indices_between(self, lo: float, hi: float) -> range:
        """Sample indices with lo <= t <= hi (caller clamps first)."""
        k_lo = math.ceil((lo - self.t0) / self.dt - _REL_EPS)
        k_hi = math.floor((hi - self.t0) / self.dt + _REL_EPS)
        k_lo = max(k_lo, 0)
        k_hi = min(k_hi, len(self) - 1)
        return range(k_lo, k_hi + 1)


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(float(v))


def write_csv(trace: Trace) -> str:
    """Serialize to the trace CSV format (header row, first column t)."""
    names = sorted(trace.columns)
    out = io.StringIO()
    out.write(",".join(["t"] + names) + "\n")
    times = trace.times()
    for k in range(len(trace)):
        row = [repr(times[k])] + [
            _format_value(trace.columns[n][k]) for n in names
        ]
        out.write(",".join(row) + "\n")
    return out.getvalue()


def read_csv(text: str) -> Trace:
    """Parse the trace CSV format; strict about header, step and types."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise MalformedTrace("trace CSV needs a header row and one sample")
    header = [h.strip() for h in lines[0].split(",")]
    if not header or header[0] != "t":
        raise MalformedTrace("first CSV column must be 't'")
    names = header[1:]
    if len(set(names)) != len(names):
        raise MalformedTrace("duplicate column names")

    times: list[float] = []
    raw_columns: list[list[str]] = [[] for _ in names]
    for lineno, line in enumerate(lines[1:], start=2):
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != len(header):
            raise MalformedTrace(f"line {lineno}: expected {len(header)} cells")
        try:
            times.append(float(cells[0]))
        except ValueError:
            raise MalformedTrace(f"line {lineno}: bad timestamp {cells[0]!r}")
        for i, cell in enumerate(cells[1:]):
            raw_columns[i].append(cell)

    if len(times) >= 2:
        dt = times[1] - times[0]
        if dt <= 0:
            raise MalformedTrace("timestamps must be strictly increasing")
        for i in range(1, len(times)):
            step = times[i] - times[i - 1]
            if abs(step - dt) > max(1e-12, abs(dt) * 1e-6):
                raise MalformedTrace(
                    f"non-uniform step at row {i + 1}: {step} != {dt}"
                )
    else:
        dt = 1.0  # single-sample trace; step is irrelevant

    columns: dict[str, tuple] = {}
    for name, cells in zip(names, raw_columns):
        lowered = {c.lower() for c in cells}
        if lowered <= {"true", "false"}:
            columns[name] = tuple(c.lower() == "true" for c in cells)
        else:
            try:
                values = tuple(float(c) for c in cells)
            except ValueError as exc:
                raise MalformedTrace(f"column {name!r}: {exc}")
            if any(not math.isfinite(v) for v in values):
                raise MalformedTrace(f"column {name!r} has non-finite values")
            columns[name] = values
    return Trace(dt=dt, t0=times[0], columns=columns)
