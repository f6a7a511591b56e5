#!/usr/bin/env python3
"""Sweep the initial rear gap around the closed-form safe boundary.

Usage: python scripts/gap_boundary_sweep.py

Prints, for a ladder of initial gaps, the minimum gap the simulation
reaches and the stop-safety formula's verdict on that trace, so the
agreement between the closed form, the simulator, and the formula is
visible at a glance.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import safecase as sc  # noqa: E402
from safecase.sample_case import STOP_SAFETY_FORMULA  # noqa: E402


def main() -> int:
    agv = sc.AgentParams(v0=2.0, decel=2.0)
    rear = sc.AgentParams(v0=2.0, decel=2.0, t_react=0.5)
    boundary = sc.min_safe_rear_gap(rear, agv)
    window = sc.reaction_time(10.0, 0.1) + agv.v0 / agv.decel
    formula = sc.parse_formula(STOP_SAFETY_FORMULA)

    print(f"closed-form safe gap: {boundary:.3f} m; braking window {window:.2f} s")
    print(f"{'gap0 [m]':>9}  {'min gap [m]':>12}  {'collision':>9}  verdict")
    for offset in (-0.6, -0.4, -0.2, -0.05, 0.0, 0.05, 0.2, 0.4, 0.6):
        gap0 = max(0.0, boundary + offset)
        scenario = sc.FpScenario(
            agv=agv, rear=rear, gap0=gap0, frame_rate=10.0, t_proc=0.1,
            t_fp=1.0, dt=0.01, horizon=6.0,
        )
        trace = sc.simulate_fp_braking(scenario)
        min_gap = min(trace.columns["d_agv_rear"])
        verdict = sc.evaluate(
            formula, {"d_b_rear": gap0, "t_b_agv": window}, trace
        )
        print(
            f"{gap0:9.3f}  {min_gap:12.3f}  {str(min_gap <= 0.0):>9}  {verdict}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
