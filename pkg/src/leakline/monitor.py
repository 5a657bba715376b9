"""Stream replay of end-pressure sensors with the dispatcher decision flow.

A monitor consumes one timestamped stream per line: the first samples fix the
baseline end pressures, a deviation beyond the measurability floor opens an
episode, and at the configured fixation time the drop ratio is classified.
An Accident verdict yields a localisation estimate and a valve isolation
plan; a Technological verdict re-arms the monitor once the line settles.
Each line is monitored independently (a rupture on one line of the pair does
not disturb the other), so the damaged line identifies itself.
"""

from __future__ import annotations

import enum
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .detection import (
    DEFAULT_EPS_MEAS,
    Verdict,
    _judge,
    fixation_time,
    ratio_from_deviations,
)
from .isolation import ValveLayout, build_isolation_plan
from .model import PipelineSpec

BASELINE_SAMPLES = 5
LOG_HEADER = "t,kind,payload"


class FixationRule(str, enum.Enum):
    GRID = "grid"
    EMPIRICAL = "empirical"


class EventKind(str, enum.Enum):
    BASELINE = "Baseline"
    DATA_QUALITY = "DataQuality"
    DEVIATION_DETECTED = "DeviationDetected"
    FIXATION = "Fixation"
    VERDICT = "Verdict"
    PLAN_ISSUED = "PlanIssued"


class StreamFormatError(ValueError):
    """Malformed stream input; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class StreamOrderError(ValueError):
    """Non-monotone timestamps; the stream cannot be replayed further."""


class EventLogError(OSError):
    """The log destination was not writable; in-memory events are intact."""


@dataclass(frozen=True)
class MonitorConfig:
    spec: PipelineSpec
    layout: ValveLayout | None = None
    sampling_step: float = 60.0
    eps_meas: float = DEFAULT_EPS_MEAS
    fixation_rule: FixationRule = FixationRule.GRID

    def __post_init__(self):
        if self.sampling_step <= 0:
            raise ValueError("sampling_step must be > 0")
        if self.eps_meas <= 0:
            raise ValueError("eps_meas must be > 0")
        if not isinstance(self.fixation_rule, FixationRule):
            object.__setattr__(self, "fixation_rule", FixationRule(self.fixation_rule))


@dataclass(frozen=True)
class MonitorEvent:
    t: float
    kind: EventKind
    payload: dict = field(default_factory=dict)


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "|".join(_fmt_value(x) for x in v)
    if isinstance(v, enum.Enum):
        return str(v.value)
    return str(v).replace(",", "_").replace(";", "_")


def format_event(event: MonitorEvent) -> str:
    payload = ";".join(f"{k}={_fmt_value(v)}" for k, v in sorted(event.payload.items()))
    return f"{event.t:.3f},{event.kind.value},{payload}"


def read_pressure_stream(path: str | Path) -> Iterator[tuple[float, float, float]]:
    """Parse a `t_seconds,p_inlet_pa,p_outlet_pa` CSV (header required)."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline()
        if [c.strip() for c in header.strip().split(",")] != [
                "t_seconds", "p_inlet_pa", "p_outlet_pa"]:
            raise StreamFormatError(1, "expected header 't_seconds,p_inlet_pa,p_outlet_pa'")
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise StreamFormatError(line_no, f"expected 3 fields, got {len(parts)}")
            try:
                yield float(parts[0]), float(parts[1]), float(parts[2])
            except ValueError as exc:
                raise StreamFormatError(line_no, str(exc)) from None


@dataclass
class _Episode:
    t_onset: float
    points: list = field(default_factory=list)   # defined RatioPoint history


def run_monitor(cfg: MonitorConfig,
                stream: Iterable[tuple[float, float, float]]) -> list[MonitorEvent]:
    """Replay a stream and return the ordered decision events.

    The episode clock is anchored at the last sample before the first
    measurable deviation (the earliest instant the rupture can have
    happened), so a grid-rule verdict lands at onset + fixation_time.
    """
    events: list[MonitorEvent] = []
    baseline_buf: list[tuple[float, float, float]] = []
    baseline: tuple[float, float] | None = None
    prev_t: float | None = None
    prev_quiet_t: float | None = None
    episode: _Episode | None = None
    done = False
    rearm_pending = False
    quiet_since: float | None = None
    t_fix_target = fixation_time(cfg.spec, cfg.sampling_step)

    def emit(t, kind, **payload):
        events.append(MonitorEvent(t=t, kind=kind, payload=payload))

    def issue_verdict(t_abs, tau, rp):
        verdict, tv = _judge(cfg.spec, rp, tau)
        payload = {"verdict": verdict, "t_onset": episode.t_onset, "tau": tau,
                   "p": rp.p if rp.defined else float("nan")}
        if tv is not None:
            theta = min(1.0, max(0.0, tv.theta))
            payload.update(theta=theta, theta_raw=tv.theta,
                           ell2_est=theta * cfg.spec.length,
                           orientation=("inlet-half" if theta < 0.5
                                        else "midpoint" if theta == 0.5
                                        else "outlet-half"))
        emit(t_abs, EventKind.VERDICT, **payload)
        if verdict is Verdict.ACCIDENT and tv is not None:
            if cfg.layout is not None:
                plan = build_isolation_plan(cfg.layout, payload["ell2_est"])
                emit(t_abs, EventKind.PLAN_ISSUED, close=plan.close,
                     open=plan.open, span=plan.isolated_span, partial=plan.partial)
            else:
                emit(t_abs, EventKind.DATA_QUALITY,
                     warning="no valve layout configured; plan skipped")
        return verdict

    for t, p_in, p_out in stream:
        if prev_t is not None and t <= prev_t:
            raise StreamOrderError(
                f"timestamp {t:.6g} not after previous {prev_t:.6g}; episode aborted")
        if prev_t is not None and t - prev_t > 2.0 * cfg.sampling_step:
            emit(t, EventKind.DATA_QUALITY,
                 warning=f"gap {t - prev_t:.6g} s exceeds twice the sampling step")
        prev_t = t

        if baseline is None:
            baseline_buf.append((t, p_in, p_out))
            if len(baseline_buf) == BASELINE_SAMPLES:
                baseline = (statistics.median(s[1] for s in baseline_buf),
                            statistics.median(s[2] for s in baseline_buf))
                emit(t, EventKind.BASELINE, p_inlet=baseline[0], p_outlet=baseline[1],
                     n_samples=BASELINE_SAMPLES)
                prev_quiet_t = t
            continue
        if done:
            continue

        dev_in = baseline[0] - p_in
        dev_out = baseline[1] - p_out
        deviating = max(abs(dev_in), abs(dev_out)) >= cfg.eps_meas

        if episode is None:
            if rearm_pending:
                # stay disarmed until the line has been quiet for one full
                # fixation interval; any deviation restarts the quiet clock
                if deviating:
                    quiet_since = None
                else:
                    if quiet_since is None:
                        quiet_since = t
                    prev_quiet_t = t
                    if t - quiet_since >= t_fix_target:
                        rearm_pending = False
                continue
            if deviating:
                t_onset = prev_quiet_t if prev_quiet_t is not None else t - cfg.sampling_step
                episode = _Episode(t_onset=t_onset)
                emit(t, EventKind.DEVIATION_DETECTED, dev_inlet=dev_in,
                     dev_outlet=dev_out, t_onset=t_onset)
            else:
                prev_quiet_t = t
                continue

        tau = t - episode.t_onset
        rp = ratio_from_deviations(dev_in, dev_out, tau, cfg.eps_meas)
        if rp.defined:
            episode.points.append(rp)

        fixed = None
        if cfg.fixation_rule is FixationRule.GRID:
            if tau >= t_fix_target:
                fixed = rp
        else:
            # earliest defined point whose |p-1| is confirmed by a trailing
            # window of one sampling step
            for i, cand in enumerate(episode.points):
                trailing = [q for q in episode.points[i + 1:]
                            if q.t <= cand.t + cfg.sampling_step]
                if not trailing:
                    continue
                if all(abs(cand.p - 1.0) >= abs(q.p - 1.0) for q in trailing):
                    fixed = cand
                    break

        if fixed is not None:
            emit(t, EventKind.FIXATION, tau=fixed.t, t_onset=episode.t_onset,
                 rule=cfg.fixation_rule)
            verdict = issue_verdict(t, fixed.t, fixed)
            if verdict is Verdict.ACCIDENT:
                done = True
            else:
                rearm_pending = True
                quiet_since = None if deviating else t
                episode = None
    return events


def append_event_log(path: str | Path, events: list[MonitorEvent]) -> int:
    """Append events to a line-delimited log, writing the header when new.

    Returns the number of lines written.  On failure the events are left
    untouched in memory and an EventLogError is raised.
    """
    path = Path(path)
    try:
        new_file = not path.exists() or path.stat().st_size == 0
        with open(path, "a", encoding="ascii") as fh:
            lines = 0
            if new_file:
                fh.write(LOG_HEADER + "\n")
                lines += 1
            for event in events:
                fh.write(format_event(event) + "\n")
                lines += 1
        return lines
    except OSError as exc:
        raise EventLogError(f"cannot write event log at {path}: {exc}") from exc
