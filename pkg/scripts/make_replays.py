#!/usr/bin/env python3
"""Generate the bundled sensor replay streams under scenarios/replays/.

Each stream is a `t_seconds,p_inlet_pa,p_outlet_pa` CSV with a quiet prefix
(t <= 0) for baseline estimation and the event starting at t = 0.  Pressures
are rounded to 100 Pa, the resolution of a gauge read to two decimals in
units of 1e4 Pa.
"""

from __future__ import annotations

from pathlib import Path

from leakline.model import DEFAULT_SERIES, PIPELINE_B, LeakScenario
from leakline.model import inlet_pressure, outlet_pressure

HERE = Path(__file__).resolve().parent.parent
OUT = HERE / "scenarios" / "replays"

QUANTUM = 100.0
STEP = 60.0
PREFIX = [-300.0, -240.0, -180.0, -120.0, -60.0, 0.0]


def _q(v: float) -> float:
    return round(v / QUANTUM) * QUANTUM


def _write(name: str, rows: list[tuple[float, float, float]]) -> None:
    lines = ["t_seconds,p_inlet_pa,p_outlet_pa"]
    lines += [f"{t:g},{pin:g},{pout:g}" for t, pin, pout in rows]
    (OUT / name).write_text("\n".join(lines) + "\n", encoding="ascii")
    print(f"wrote {OUT / name} ({len(rows)} samples)")


def leak_replay() -> None:
    """Short-line rupture 5 km from the inlet."""
    leak = LeakScenario(ell2=0.5e4, g_leak=PIPELINE_B.g0)
    rows = [(t, PIPELINE_B.p_inlet_0, PIPELINE_B.p_outlet_0) for t in PREFIX]
    for k in range(1, 11):
        t = k * STEP
        rows.append((t, _q(inlet_pressure(PIPELINE_B, leak, DEFAULT_SERIES, t)),
                     _q(outlet_pressure(PIPELINE_B, leak, DEFAULT_SERIES, t))))
    _write("pipeline_b_start_leak.csv", rows)


def flat_replay() -> None:
    rows = [(t, PIPELINE_B.p_inlet_0, PIPELINE_B.p_outlet_0)
            for t in PREFIX + [k * STEP for k in range(1, 11)]]
    _write("pipeline_b_flat.csv", rows)


def technological_ramp() -> None:
    """Inlet drop twelve times the outlet drop: outside the admissible band."""
    rows = [(t, PIPELINE_B.p_inlet_0, PIPELINE_B.p_outlet_0) for t in PREFIX]
    for k in range(1, 11):
        t = k * STEP
        dev_out = 200.0 * k
        rows.append((t, PIPELINE_B.p_inlet_0 - 12.0 * dev_out,
                     PIPELINE_B.p_outlet_0 - dev_out))
    _write("pipeline_b_tech_ramp.csv", rows)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    leak_replay()
    flat_replay()
    technological_ramp()
