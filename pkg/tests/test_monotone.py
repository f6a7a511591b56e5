from __future__ import annotations

import pytest

from safecase.errors import UnboundParam
from safecase.evaluator import check_monotone


def test_identity_term_is_increasing():
    report = check_monotone(
        "p", param="p", lo=0.0, hi=1.0, samples=5, direction="increasing", env={}
    )
    assert report.holds
    assert report.violation is None
    assert "not a proof" in report.note


def test_stopping_distance_decreasing_in_frame_rate():
    # d(f) = v*(1/f + t_proc) + v^2/(2a) with v=2, t_proc=0.1, a=2
    report = check_monotone(
        "v * (1 / f + t_proc) + v * v / (2 * a)",
        param="f",
        lo=5.0,
        hi=30.0,
        samples=26,
        direction="decreasing",
        env={"v": 2.0, "t_proc": 0.1, "a": 2.0},
    )
    assert report.holds
    # cross-check by direct evaluation at all sampled points
    values = [2.0 * (1.0 / f + 0.1) + 1.0 for f in
              [5.0 + i for i in range(26)]]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_parabola_reports_first_descending_pair():
    report = check_monotone(
        "(p - 0.5) * (p - 0.5)",
        param="p",
        lo=0.0,
        hi=1.0,
        samples=5,
        direction="increasing",
        env={},
    )
    assert not report.holds
    x1, y1, x2, y2 = report.violation
    assert (x1, x2) == (0.0, 0.25)
    assert y2 < y1


def test_other_symbols_must_be_bound():
    with pytest.raises(UnboundParam) as exc:
        check_monotone(
            "v * (1 / f + t_proc)",
            param="f",
            lo=1.0,
            hi=10.0,
            samples=3,
            direction="decreasing",
            env={"v": 2.0},
        )
    assert "t_proc" in exc.value.names


def test_signals_are_rejected():
    with pytest.raises(UnboundParam):
        check_monotone(
            "p + y_sig(0.5)",
            param="p",
            lo=0.0,
            hi=1.0,
            samples=3,
            direction="increasing",
            env={},
        )


def test_parameter_validation():
    with pytest.raises(ValueError):
        check_monotone("p", "p", 0.0, 1.0, samples=1, direction="increasing", env={})
    with pytest.raises(ValueError):
        check_monotone("p", "p", 1.0, 0.0, samples=5, direction="increasing", env={})
    with pytest.raises(ValueError):
        check_monotone("p", "p", 0.0, 1.0, samples=5, direction="sideways", env={})
