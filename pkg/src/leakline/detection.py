"""Leak localisation and regime discrimination from end-pressure histories.

The detection statistic is the ratio p(t) of the inlet pressure drop to the
outlet pressure drop, both measured against the pre-event steady end
pressures.  A single leak at normalised position theta = ell2 / L maps to

    theta = 1/2 + ((1 - p) / (1 + p)) * position_gain(t)

where the gain tends to 2/3 at late times.  Ratios consistent with some
theta in (0, 1) form an open admissible band around p = 1; ratios outside
the band indicate a technological regime change rather than a rupture.
"""

from __future__ import annotations

import enum
import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .model import (
    LeakScenario,
    PipelineSpec,
    SeriesConfig,
    decay_rate,
    inlet_pressure,
    outlet_pressure,
)

PI_SQ = math.pi**2

# Deviations below this floor (Pa) are treated as unmeasurable; matches a
# gauge resolution of 0.01e4 Pa.
DEFAULT_EPS_MEAS = 100.0


class Verdict(str, enum.Enum):
    ACCIDENT = "Accident"
    TECHNOLOGICAL = "Technological"
    INDETERMINATE = "Indeterminate"


class UndefinedCause(str, enum.Enum):
    BELOW_FLOOR = "below_floor"          # a deviation smaller than eps_meas
    NEGATIVE_DEVIATION = "pressure_rise"  # an end pressure above its baseline


@dataclass(frozen=True)
class RatioPoint:
    """The drop ratio at one instant; p is NaN when not defined."""

    t: float
    p: float
    defined: bool
    cause: UndefinedCause | None = None
    dev_inlet: float = float("nan")
    dev_outlet: float = float("nan")


@dataclass(frozen=True)
class RegimeBand:
    """Open interval of drop ratios consistent with a single leak."""

    lo: float
    hi: float
    t: float

    def contains(self, p: float) -> bool:
        return self.lo < p < self.hi


@dataclass(frozen=True)
class ThetaEstimate:
    """Localisation outcome at the fixation instant.

    theta is clamped to [0, 1]; theta_raw keeps the unclamped value because
    out-of-range results carry meaning (they indicate a non-leak regime).
    Both are None when the ratio was not measurable.
    """

    theta: float | None
    ell2_est: float | None
    t_fix: float
    verdict: Verdict
    theta_raw: float | None = None
    ratio: RatioPoint | None = None


class ThetaValue(NamedTuple):
    theta: float
    in_range: bool


@dataclass(frozen=True)
class PressureTrajectory:
    """Sampled end-pressure histories with their pre-event baseline."""

    samples: tuple[tuple[float, float, float], ...]  # (t, p_inlet, p_outlet)
    baseline: tuple[float, float]                    # (P1, P2)

    def __post_init__(self):
        p1, p2 = self.baseline
        if not p1 > p2 > 0:
            raise ValueError("baseline must satisfy P1 > P2 > 0")
        times = [s[0] for s in self.samples]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ValueError("sample times must be strictly increasing")
        if any(s[1] <= 0 or s[2] <= 0 for s in self.samples):
            raise ValueError("pressures must be positive")

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(s[0] for s in self.samples)

    @property
    def span(self) -> tuple[float, float]:
        return self.samples[0][0], self.samples[-1][0]

    def at(self, t: float) -> tuple[float, float]:
        """Inlet/outlet pressures of the sample at time t (exact lookup)."""
        times = self.times
        i = bisect_left(times, t - 1e-9 * max(1.0, abs(t)))
        if i < len(times) and math.isclose(times[i], t, rel_tol=1e-9, abs_tol=1e-9):
            return self.samples[i][1], self.samples[i][2]
        raise ValueError(f"no sample at t = {t:.6g} s")

    def median_step(self) -> float:
        times = self.times
        if len(times) < 2:
            raise ValueError("need at least two samples")
        return float(np.median(np.diff(times)))


def simulate_trajectory(spec: PipelineSpec, scenario: LeakScenario,
                        cfg: SeriesConfig, times: Sequence[float],
                        quantum: float | None = None) -> PressureTrajectory:
    """Sample the analytical model into a trajectory.

    quantum, when given, rounds the pressures to that resolution (100 Pa
    mimics a gauge reading two decimals in units of 1e4 Pa).
    """
    rows = []
    for t in times:
        pin = inlet_pressure(spec, scenario, cfg, t)
        pout = outlet_pressure(spec, scenario, cfg, t)
        if quantum is not None:
            pin = round(pin / quantum) * quantum
            pout = round(pout / quantum) * quantum
        rows.append((float(t), pin, pout))
    return PressureTrajectory(samples=tuple(rows),
                              baseline=(spec.p_inlet_0, spec.p_outlet_0))


def ratio_from_deviations(dev_inlet: float, dev_outlet: float, t: float,
                          eps_meas: float) -> RatioPoint:
    """Build the drop ratio from raw deviations, applying the floor rules."""
    if dev_inlet < 0 or dev_outlet < 0:
        return RatioPoint(t=t, p=float("nan"), defined=False,
                          cause=UndefinedCause.NEGATIVE_DEVIATION,
                          dev_inlet=dev_inlet, dev_outlet=dev_outlet)
    if dev_inlet < eps_meas or dev_outlet < eps_meas:
        return RatioPoint(t=t, p=float("nan"), defined=False,
                          cause=UndefinedCause.BELOW_FLOOR,
                          dev_inlet=dev_inlet, dev_outlet=dev_outlet)
    return RatioPoint(t=t, p=dev_inlet / dev_outlet, defined=True,
                      dev_inlet=dev_inlet, dev_outlet=dev_outlet)


def pressure_ratio(traj: PressureTrajectory, t: float,
                   eps_meas: float = DEFAULT_EPS_MEAS) -> RatioPoint:
    """Drop ratio at sample time t; undefined below the measurability floor."""
    lo, hi = traj.span
    if not lo <= t <= hi:
        raise ValueError(f"t = {t:.6g} outside trajectory span [{lo:.6g}, {hi:.6g}]")
    p_in, p_out = traj.at(t)
    p1, p2 = traj.baseline
    return ratio_from_deviations(p1 - p_in, p2 - p_out, t, eps_meas)


def position_gain(spec: PipelineSpec, t: float) -> float:
    """Gain mapping (1-p)/(1+p) to theta - 1/2; rises monotonically to 2/3."""
    if t < 0:
        raise ValueError("t must be >= 0")
    a = decay_rate(spec)
    return 2.0 / 3.0 + (math.exp(-2.0 * a * t) - 4.0 * math.exp(-a * t)) / PI_SQ


def theta_from_ratio(spec: PipelineSpec, p: float, t: float) -> ThetaValue:
    """Normalised leak coordinate implied by drop ratio p at time t.

    Values outside [0, 1] are returned as-is with in_range=False; they signal
    that the observed ratio is not consistent with a single leak.
    """
    if p <= 0:
        raise ValueError("ratio p must be > 0")
    theta = 0.5 + (1.0 - p) / (1.0 + p) * position_gain(spec, t)
    return ThetaValue(theta=theta, in_range=0.0 <= theta <= 1.0)


def admissible_band(spec: PipelineSpec, t: float) -> RegimeBand | None:
    """Open ratio band consistent with a leak, or None while unavailable.

    The band exists once the gain exceeds 1/2; at late times it tends to
    (1/7, 7).  Algebraically p inside the band is equivalent to
    theta_from_ratio(p, t) lying strictly inside (0, 1).
    """
    g = position_gain(spec, t)
    if g <= 0.5:
        return None
    return RegimeBand(lo=(g - 0.5) / (g + 0.5), hi=(g + 0.5) / (g - 0.5), t=t)


def first_band_time(spec: PipelineSpec, resolution: float = 1e-3) -> float:
    """Earliest time at which the admissible band exists (bisection scan)."""
    lo, hi = 0.0, 1.0
    while position_gain(spec, hi) <= 0.5:
        hi *= 2.0
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if position_gain(spec, mid) <= 0.5:
            lo = mid
        else:
            hi = mid
    return hi


def _judge(spec: PipelineSpec, rp: RatioPoint, t: float) -> tuple[Verdict, ThetaValue | None]:
    if not rp.defined:
        if rp.cause is UndefinedCause.NEGATIVE_DEVIATION:
            # a pressure rise cannot come from a leak
            return Verdict.TECHNOLOGICAL, None
        return Verdict.INDETERMINATE, None
    tv = theta_from_ratio(spec, rp.p, t)
    band = admissible_band(spec, t)
    if band is not None:
        ok = band.contains(rp.p)
    else:
        ok = 0.0 < tv.theta < 1.0
    return (Verdict.ACCIDENT if ok else Verdict.TECHNOLOGICAL), tv


def classify_regime(spec: PipelineSpec, traj: PressureTrajectory, t_fix: float,
                    eps_meas: float = DEFAULT_EPS_MEAS) -> Verdict:
    """Accident / Technological / Indeterminate at the fixation instant."""
    rp = pressure_ratio(traj, t_fix, eps_meas)
    verdict, _ = _judge(spec, rp, t_fix)
    return verdict


def estimate_position(spec: PipelineSpec, traj: PressureTrajectory, t_fix: float,
                      eps_meas: float = DEFAULT_EPS_MEAS) -> ThetaEstimate:
    """Full localisation outcome (verdict plus theta and ell2) at t_fix."""
    rp = pressure_ratio(traj, t_fix, eps_meas)
    verdict, tv = _judge(spec, rp, t_fix)
    if tv is None:
        return ThetaEstimate(theta=None, ell2_est=None, t_fix=t_fix,
                             verdict=verdict, ratio=rp)
    clamped = min(1.0, max(0.0, tv.theta))
    return ThetaEstimate(theta=clamped, ell2_est=clamped * spec.length,
                         t_fix=t_fix, verdict=verdict, theta_raw=tv.theta, ratio=rp)


def min_information_latency(spec: PipelineSpec) -> float:
    """Sound travel time L/c: no end-to-end information arrives faster."""
    return spec.length / spec.sound_speed


def fixation_time(spec: PipelineSpec, sampling_step: float) -> float:
    """Grid rule: first sampling instant strictly after the travel time."""
    if sampling_step <= 0:
        raise ValueError("sampling_step must be > 0")
    latency = min_information_latency(spec)
    k = math.floor(latency / sampling_step) + 1
    return k * sampling_step


def fixation_time_empirical(traj: PressureTrajectory,
                            eps_meas: float = DEFAULT_EPS_MEAS,
                            window: float | None = None) -> float | None:
    """Empirical rule: earliest defined sample where |p - 1| is not exceeded
    within a trailing confirmation window.

    Returns None when the ratio is never defined.  window defaults to the
    trajectory's median sampling step.
    """
    points = [pressure_ratio(traj, t, eps_meas) for t in traj.times]
    defined = [rp for rp in points if rp.defined]
    if not defined:
        return None
    if window is None:
        window = traj.median_step() if len(traj.times) > 1 else 0.0
    for i, rp in enumerate(defined):
        trailing = [q for q in defined[i + 1:] if q.t <= rp.t + window]
        if all(abs(rp.p - 1.0) >= abs(q.p - 1.0) for q in trailing):
            return rp.t
    return defined[-1].t
