from __future__ import annotations

import random

import pytest

from safecase.kinematics import (
    AgentParams,
    FpScenario,
    min_safe_rear_gap,
    reaction_time,
)
from safecase.sample_case import write_sample_case
from safecase.store import CaseStore


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): acceptance criterion, printed PASS/FAIL"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    terminal = item.config.pluginmanager.get_plugin("terminalreporter")
    line = f"ACCEPTANCE {marker.args[0]}: {'PASS' if report.passed else 'FAIL'}"
    if terminal is not None:
        terminal.write_line(line)
    else:
        print(line)


@pytest.fixture()
def sample_case_dir(tmp_path):
    case_dir = tmp_path / "agv-case"
    write_sample_case(case_dir)
    return case_dir


@pytest.fixture()
def sample_store(sample_case_dir):
    return CaseStore(sample_case_dir)


@pytest.fixture()
def sample_case(sample_store):
    return sample_store.load()


def draw_settling_rear_scenario(rng: random.Random):
    """Scenario family where the rear agent brakes no harder than the AGV.

    The rear agent is then still moving when the AGV stops, so the gap
    deficit grows monotonically to its closed-form total and the
    collision boundary equals min_safe_rear_gap exactly.
    """
    v = rng.uniform(1.0, 3.0)
    a_agv = rng.uniform(0.8, 2.5)
    a_rear = rng.uniform(0.5, a_agv)
    t_react = rng.uniform(0.3, 1.5)
    frame_rate = rng.uniform(5.0, 30.0)
    t_proc = rng.uniform(0.02, 0.2)
    t_fp = rng.uniform(0.3, 1.5)
    agv = AgentParams(v0=v, decel=a_agv)
    rear = AgentParams(v0=v, decel=a_rear, t_react=t_react)
    horizon = (
        t_fp
        + reaction_time(frame_rate, t_proc)
        + t_react
        + v / a_rear
        + 1.0
    )
    return {
        "agv": agv,
        "rear": rear,
        "frame_rate": frame_rate,
        "t_proc": t_proc,
        "t_fp": t_fp,
        "horizon": horizon,
    }


def draw_corridor_scenario(rng: random.Random, force_wide_boundary: bool):
    """Scenario family for checking the stop-safety formula against the
    simulator: shared line speed, a gently braking AGV and a nimbler rear
    agent that settles before the AGV stops, so any collision falls inside
    the AGV's braking window and the gap overshoot past the closed-form
    boundary stays below the test margins.
    """
    while True:
        v = rng.uniform(1.0, 2.5)
        a_agv = rng.uniform(0.6, 1.2)
        a_rear = rng.uniform(a_agv + 0.5, 8.0)
        t_react_max = v / a_agv - v / a_rear - 0.05
        if t_react_max <= 0.2:
            continue
        t_react = (
            rng.uniform(0.6 * t_react_max, t_react_max)
            if force_wide_boundary
            else rng.uniform(0.2, t_react_max)
        )
        # gap deficit keeps growing until the braking speeds cross; the
        # overshoot past the closed-form boundary must stay below the
        # 0.5 m test margin
        tau_cross = a_rear * t_react / (a_rear - a_agv)
        w = v - a_agv * tau_cross
        overshoot = (
            w * w * (a_rear - a_agv) / (2.0 * a_agv * a_rear) if w > 0 else 0.0
        )
        if overshoot > 0.35:
            continue
        frame_rate = rng.uniform(5.0, 30.0)
        t_proc = rng.uniform(0.02, 0.2)
        t_fp = rng.uniform(0.3, 1.5)
        agv = AgentParams(v0=v, decel=a_agv)
        rear = AgentParams(v0=v, decel=a_rear, t_react=t_react)
        reac = reaction_time(frame_rate, t_proc)
        return {
            "agv": agv,
            "rear": rear,
            "frame_rate": frame_rate,
            "t_proc": t_proc,
            "t_fp": t_fp,
            "braking_window": reac + v / a_agv,
            "boundary": min_safe_rear_gap(rear, agv),
            "horizon": t_fp + reac + v / a_agv + 1.0,
        }


def scenario_with_gap(params: dict, gap0: float) -> FpScenario:
    return FpScenario(
        agv=params["agv"],
        rear=params["rear"],
        gap0=gap0,
        frame_rate=params["frame_rate"],
        t_proc=params["t_proc"],
        t_fp=params["t_fp"],
        dt=0.01,
        horizon=params["horizon"],
    )
