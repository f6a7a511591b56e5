"""Braking kinematics for the AGV false-positive emergency-stop scenario.

Closed forms cover worst-case reaction latency, stopping distance, and
the smallest rear gap that avoids a rear-end collision when the vehicle
ahead brakes without warning. The simulator produces the sampled traces
the formula evaluator quantifies over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    BadScenario,
    HorizonTooShort,
    NonPositiveDecel,
    NonPositiveFrameRate,
)
from .trace import Trace


@dataclass(frozen=True)
class AgentParams:
    v0: float  # initial speed, m/s
    decel: float  # braking deceleration, m/s^2
    t_react: float = 0.0  # reaction time, s

    def __post_init__(self):
        if self.v0 < 0 or not math.isfinite(self.v0):
            raise BadScenario(f"v0 must be >= 0, got {self.v0}")
        if self.decel <= 0 or not math.isfinite(self.decel):
            raise NonPositiveDecel(f"decel must be > 0, got {self.decel}")
        if self.t_react < 0 or not math.isfinite(self.t_react):
            raise BadScenario(f"t_react must be >= 0, got {self.t_react}")

    @property
    def brake_duration(self) -> float:
        return self.v0 / self.decel


def reaction_time(frame_rate: float, t_proc: float) -> float:
    """Worst-case detection latency: one full frame plus processing."""
    if frame_rate <= 0 or not math.isfinite(frame_rate):
        raise NonPositiveFrameRate(f"frame rate must be > 0, got {frame_rate}")
    if t_proc < 0:
        raise BadScenario(f"t_proc must be >= 0, got {t_proc}")
    return 1.0 / frame_rate + t_proc


def stopping_distance(v0: float, t_react: float, decel: float) -> float:
    """Distance covered from the triggering event to standstill."""
    if decel <= 0:
        raise NonPositiveDecel(f"decel must be > 0, got {decel}")
    if v0 < 0:
        raise BadScenario(f"v0 must be >= 0, got {v0}")
    if t_react < 0:
        raise BadScenario(f"t_react must be >= 0, got {t_react}")
    return v0 * t_react + v0 * v0 / (2.0 * decel)


def min_safe_rear_gap(rear: AgentParams, agv: AgentParams) -> float:
    """Smallest initial gap that avoids a rear-end hit if the AGV brakes now.

    The rear agent reacts after its own t_react and then brakes; the AGV
    is credited its braking travel, mirroring the worst-case longitudinal
    safe-distance construction.
    """
    rear_travel = stopping_distance(rear.v0, rear.t_react, rear.decel)
    agv_travel = agv.v0 * agv.v0 / (2.0 * agv.decel)
    return max(0.0, rear_travel - agv_travel)


@dataclass(frozen=True)
class FpScenario:
    agv: AgentParams
    rear: AgentParams
    gap0: float  # initial gap between AGV tail and rear agent, m
    frame_rate: float  # Hz
    t_proc: float  # s
    t_fp: float  # time the false positive fires, s
    dt: float = 0.01  # s
    horizon: float = 10.0  # s
    fusion_confirms: bool = True  # detected_fusion mirrors fp_ml when True

    def __post_init__(self):
        if self.gap0 < 0:
            raise BadScenario(f"gap0 must be >= 0, got {self.gap0}")
        if self.t_fp < 0:
            raise BadScenario(f"t_fp must be >= 0, got {self.t_fp}")
        if self.dt <= 0:
            raise BadScenario(f"dt must be > 0, got {self.dt}")
        if self.horizon <= 0:
            raise BadScenario(f"horizon must be > 0, got {self.horizon}")
        settle = self.settle_time
        if self.horizon < settle:
            raise HorizonTooShort(
                f"horizon {self.horizon} s ends before both agents stop "
                f"(~{settle:.2f} s)"
            )

    @property
    def reaction(self) -> float:
        return reaction_time(self.frame_rate, self.t_proc)

    @property
    def settle_time(self) -> float:
        """Time by which both agents are stationary."""
        agv_stop = self.t_fp + self.reaction + self.agv.brake_duration
        rear_stop = (
            self.t_fp
            + self.reaction
            + self.rear.t_react
            + self.rear.brake_duration
        )
        return max(agv_stop, rear_stop)


def simulate_fp_braking(s: FpScenario) -> Trace:
    """Explicit-Euler simulation of the false-positive emergency stop.

    The AGV cruises until the detection pipeline reacts to the false
    positive, then brakes to zero. The rear agent perceives the braking
    instantly but only acts after its own reaction time. The gap floors
    at zero on collision and stays there.
    """
    n = int(math.floor(s.horizon / s.dt + 1e-9)) + 1
    agv_brake_at = s.t_fp + s.reaction
    rear_brake_at = agv_brake_at + s.rear.t_react
    fp_until = s.t_fp + 1.0 / s.frame_rate

    gap = s.gap0
    v_agv = s.agv.v0
    v_rear = s.rear.v0
    collided = gap <= 0.0

    gaps = [0.0 if collided else gap]
    v_agvs = [v_agv]
    v_rears = [v_rear]
    fps = [s.t_fp <= 0.0 < fp_until]

    for k in range(1, n):
        t_prev = (k - 1) * s.dt
        if not collided:
            gap += (v_agv - v_rear) * s.dt
            if gap <= 0.0:
                gap = 0.0
                collided = True
        t = k * s.dt
        if t_prev >= agv_brake_at - 1e-12:
            v_agv = max(0.0, v_agv - s.agv.decel * s.dt)
        if t_prev >= rear_brake_at - 1e-12:
            v_rear = max(0.0, v_rear - s.rear.decel * s.dt)
        gaps.append(gap)
        v_agvs.append(v_agv)
        v_rears.append(v_rear)
        fps.append(s.t_fp - 1e-12 <= t < fp_until - 1e-12)

    fused = fps if s.fusion_confirms else [False] * n
    return Trace(
        dt=s.dt,
        t0=0.0,
        columns={
            "d_agv_rear": gaps,
            "v_agv": v_agvs,
            "v_rear": v_rears,
            "fp_ml": fps,
            "detected_fusion": list(fused),
        },
    )


# --- scenario documents -------------------------------------------------------
#
# A scenario file stores each numeric field either as a literal
# {"value": 1.0} or as an environment link {"param": "v_agv"}, so trace
# regeneration under a candidate environment picks up parameter changes.

_AGENT_FIELDS = ("v0", "decel", "t_react")
_SCALAR_FIELDS = ("gap0", "frame_rate", "t_proc", "t_fp", "dt", "horizon")


def _resolve_field(spec, env, where: str) -> float:
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return float(spec)
    if isinstance(spec, dict):
        if "value" in spec:
            return float(spec["value"])
        if "param" in spec:
            name = spec["param"]
            if env is None or name not in env:
                raise BadScenario(
                    f"{where}: linked parameter {name!r} is not bound"
                )
            return float(env[name])
    raise BadScenario(f"{where}: expected a number, {{'value': x}} or {{'param': name}}")


def scenario_from_doc(doc: dict, env=None) -> FpScenario:
    """Build an FpScenario from its document form, resolving env links."""
    if not isinstance(doc, dict) or doc.get("kind") != "fp_scenario":
        raise BadScenario("not an fp_scenario document")

    def agent(key: str) -> AgentParams:
        spec = doc.get(key)
        if not isinstance(spec, dict):
            raise BadScenario(f"scenario is missing the {key!r} agent")
        return AgentParams(
            v0=_resolve_field(spec.get("v0"), env, f"{key}.v0"),
            decel=_resolve_field(spec.get("decel"), env, f"{key}.decel"),
            t_react=_resolve_field(spec.get("t_react", 0.0), env, f"{key}.t_react"),
        )

    kwargs = {}
    for name in _SCALAR_FIELDS:
        if name in ("dt", "horizon") and name not in doc:
            continue
        if name not in doc:
            raise BadScenario(f"scenario is missing field {name!r}")
        kwargs[name] = _resolve_field(doc[name], env, name)
    return FpScenario(
        agv=agent("agv"),
        rear=agent("rear"),
        fusion_confirms=bool(doc.get("fusion_confirms", True)),
        **kwargs,
    )


def scenario_linked_params(doc: dict) -> frozenset[str]:
    """Environment names a scenario document reads when resolved."""
    names: set[str] = set()

    def collect(spec):
        if isinstance(spec, dict) and "param" in spec:
            names.add(spec["param"])

    for key in ("agv", "rear"):
        agent = doc.get(key)
        if isinstance(agent, dict):
            for f in _AGENT_FIELDS:
                collect(agent.get(f))
    for f in _SCALAR_FIELDS:
        collect(doc.get(f))
    return frozenset(names)
