"""Analytical transient pressure field of a ruptured gas line.

The damaged line is modelled with the linearised isothermal gas equations:
momentum gives dP/dx = -two_a * G and continuity gives dP/dt = -c^2 * dG/dx,
so pressure obeys a diffusion equation with diffusivity c^2 / two_a.  A leak
withdrawing a constant linearised mass flux g_leak at x = ell2 acts as a point
sink.  With the end mass fluxes held at their steady value, the deviation from
the steady profile solves a zero-flux (Neumann) problem whose eigenfunction
expansion is evaluated here with controlled truncation.

All pressures are plain floats in Pa, lengths in m, times in s.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

PI_SQ = math.pi**2

# Fraction of the fundamental decay time below which the cosine series is not
# trusted and evaluation falls back to the exact t=0 profile.
EARLY_TIME_FRACTION = 1e-3


class SeriesPrecisionWarning(UserWarning):
    """Truncated series tail exceeds the configured tolerance."""


class Variant(str, enum.Enum):
    """Which formulation of the transient field to evaluate.

    RECONCILED is the normative model: it satisfies the steady profile at
    t=0, conserves mass, and matches the finite-difference oracle.
    AS_PRINTED keeps the extra base-flow start-up series and the flipped
    sign of the downstream correction found in the source formulation; it
    exists only so the discrepancy can be audited.
    """

    RECONCILED = "reconciled"
    AS_PRINTED = "as_printed"


@dataclass(frozen=True)
class PipelineSpec:
    """Static description of one pipeline line.

    p_inlet_0 and p_outlet_0 are the steady end pressures (Pa), g0 the steady
    linearised mass flux (Pa*s/m), sound_speed the isothermal sound speed
    (m/s) and two_a the friction linearisation coefficient (1/s).  The end
    pressures must be consistent with the linear steady profile
    p_inlet_0 - two_a*g0*length == p_outlet_0.
    """

    p_inlet_0: float
    p_outlet_0: float
    length: float
    g0: float
    sound_speed: float
    two_a: float

    def __post_init__(self):
        if not self.p_inlet_0 > self.p_outlet_0 > 0:
            raise ValueError("end pressures must satisfy p_inlet_0 > p_outlet_0 > 0")
        if self.length <= 0:
            raise ValueError("length must be > 0")
        if self.g0 < 0:
            raise ValueError("g0 must be >= 0")
        if self.sound_speed <= 0:
            raise ValueError("sound_speed must be > 0")
        if self.two_a <= 0:
            raise ValueError("two_a must be > 0")
        drop = self.two_a * self.g0 * self.length
        if abs((self.p_inlet_0 - drop) - self.p_outlet_0) > 1e-6 * self.p_inlet_0:
            raise ValueError(
                "inconsistent steady profile: p_inlet_0 - two_a*g0*length = "
                f"{self.p_inlet_0 - drop:.6g} Pa but p_outlet_0 = {self.p_outlet_0:.6g} Pa"
            )

    @property
    def diffusivity(self) -> float:
        """Pressure diffusivity c^2 / two_a (m^2/s)."""
        return self.sound_speed**2 / self.two_a


@dataclass(frozen=True)
class LeakScenario:
    """A rupture at ell2 (m from the inlet) withdrawing g_leak (Pa*s/m)."""

    ell2: float
    g_leak: float

    def __post_init__(self):
        if self.ell2 <= 0:
            raise ValueError("ell2 must be > 0")
        if self.g_leak < 0:
            raise ValueError("g_leak must be >= 0")

    def check_against(self, spec: PipelineSpec) -> None:
        if not 0 < self.ell2 < spec.length:
            raise ValueError(
                f"ell2 = {self.ell2:.6g} m must lie strictly inside (0, {spec.length:.6g})"
            )

    @classmethod
    def default_flux(cls, spec: PipelineSpec, ell2: float) -> "LeakScenario":
        """Leak with flux equal to the steady throughput g0."""
        return cls(ell2=ell2, g_leak=spec.g0)


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation control for the cosine series."""

    n_max: int = 64
    tail_tol: float = 1.0
    variant: Variant = Variant.RECONCILED

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.tail_tol <= 0:
            raise ValueError("tail_tol must be > 0")
        # accept the plain string spelling as well
        if not isinstance(self.variant, Variant):
            object.__setattr__(self, "variant", Variant(self.variant))


DEFAULT_SERIES = SeriesConfig()


@dataclass(frozen=True)
class TransientSample:
    """One accepted evaluation of the transient field."""

    x: float
    t: float
    pressure: float

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("t must be >= 0")
        if self.pressure <= 0:
            raise ValueError("pressure must be > 0")


def decay_rate(spec: PipelineSpec) -> float:
    """Base decay rate of the transient modes, pi^2 c^2 / (two_a L^2) in 1/s.

    Mode n relaxes as exp(-n^2 * decay_rate * t).
    """
    return PI_SQ * spec.sound_speed**2 / (spec.two_a * spec.length**2)


def early_time_floor(spec: PipelineSpec) -> float:
    """Time below which series evaluation falls back to the t=0 profile."""
    return EARLY_TIME_FRACTION / decay_rate(spec)


def steady_pressure(spec: PipelineSpec, x: float) -> float:
    """Pre-event linear profile p_inlet_0 - two_a*g0*x."""
    if not 0 <= x <= spec.length:
        raise ValueError(f"x = {x:.6g} outside [0, {spec.length:.6g}]")
    return spec.p_inlet_0 - spec.two_a * spec.g0 * x


def neumann_kernel(x: float, xi: float, length: float) -> float:
    """Zero-mean kernel of the zero-flux diffusion problem on [0, length].

    H(x, xi) = (x^2 + xi^2) / (2 L) + L/3 - max(x, xi).  Symmetric in its
    arguments and integrates to zero over x for any xi; the static part of
    the leak response is -two_a * g_leak * H(x, ell2).
    """
    if not 0 <= x <= length:
        raise ValueError(f"x = {x:.6g} outside [0, {length:.6g}]")
    if not 0 <= xi <= length:
        raise ValueError(f"xi = {xi:.6g} outside [0, {length:.6g}]")
    return (x * x + xi * xi) / (2.0 * length) + length / 3.0 - max(x, xi)


def series_tail(spec: PipelineSpec, scenario: LeakScenario, n_max: int, t: float,
                extra_terms: int = 4096) -> float:
    """Upper bound on the magnitude dropped by truncating the series at n_max.

    Sums the next `extra_terms` coefficients with the cosines replaced by 1;
    for any t at or above the early-time floor the remainder beyond that is
    far below float resolution.
    """
    amp = 2.0 * spec.two_a * spec.length * scenario.g_leak / PI_SQ
    n = np.arange(n_max + 1, n_max + 1 + extra_terms, dtype=float)
    return float(amp * np.sum(np.exp(-n * n * decay_rate(spec) * t) / (n * n)))


def _mode_sum(spec: PipelineSpec, scenario: LeakScenario, n_max: int,
              xs: np.ndarray, t: float) -> np.ndarray:
    """Sum of the decaying cosine modes at positions xs (vectorised)."""
    L = spec.length
    n = np.arange(1, n_max + 1, dtype=float)
    decay = np.exp(-n * n * decay_rate(spec) * t) / (n * n)
    leak_modes = np.cos(np.pi * n * scenario.ell2 / L) * decay
    return np.cos(np.pi * np.outer(xs, n) / L) @ leak_modes


def _startup_sum(spec: PipelineSpec, n_max: int, xs: np.ndarray, t: float) -> np.ndarray:
    """Base-flow start-up series kept by the AS_PRINTED variant.

    (8 a L g0 / pi^2) * sum_n cos(pi n x / L) exp(-(2n-1)^2 rate t) / (2n-1)^2,
    with the index mismatch between the cosine and the decay preserved as in
    the source formulation.  At x=0, t=0 it sums to a*L*g0.
    """
    L = spec.length
    amp = 4.0 * spec.two_a * L * spec.g0 / PI_SQ
    n = np.arange(1, n_max + 1, dtype=float)
    odd = 2.0 * n - 1.0
    decay = np.exp(-odd * odd * decay_rate(spec) * t) / (odd * odd)
    return amp * (np.cos(np.pi * np.outer(xs, n) / L) @ decay)


def pressure_profile(spec: PipelineSpec, scenario: LeakScenario,
                     cfg: SeriesConfig, xs: np.ndarray, t: float) -> np.ndarray:
    """Transient pressure at positions xs (array, m) and time t (s)."""
    xs = np.asarray(xs, dtype=float)
    if xs.size and (xs.min() < 0 or xs.max() > spec.length):
        raise ValueError("positions outside [0, length]")
    if t < 0:
        raise ValueError("t must be >= 0")
    scenario.check_against(spec)

    steady = spec.p_inlet_0 - spec.two_a * spec.g0 * xs
    if t < early_time_floor(spec):
        if t > 0:
            warnings.warn(
                f"t = {t:.6g} s below the series validity floor "
                f"{early_time_floor(spec):.6g} s; returning the t=0 profile",
                SeriesPrecisionWarning,
                stacklevel=2,
            )
        return steady

    tail = series_tail(spec, scenario, cfg.n_max, t)
    if tail > cfg.tail_tol:
        warnings.warn(
            f"series tail {tail:.3g} Pa exceeds tail_tol {cfg.tail_tol:.3g} Pa "
            f"at t = {t:.6g} s with n_max = {cfg.n_max}",
            SeriesPrecisionWarning,
            stacklevel=2,
        )

    L, g = spec.length, scenario.g_leak
    drain = (spec.sound_speed**2 * g / L) * t
    amp = 2.0 * spec.two_a * L * g / PI_SQ
    modes = amp * _mode_sum(spec, scenario, cfg.n_max, xs, t)

    if cfg.variant is Variant.RECONCILED:
        kernel = np.array([neumann_kernel(float(x), scenario.ell2, L) for x in xs])
        return steady - drain - spec.two_a * g * kernel + modes

    # AS_PRINTED: one-sided kernel, start-up series, downstream sign flipped.
    ell2 = scenario.ell2
    kernel_left = (xs * xs + ell2 * ell2) / (2.0 * L) + L / 3.0 - ell2
    downstream = np.where(xs > ell2, xs - ell2, 0.0)
    return (steady - drain + _startup_sum(spec, cfg.n_max, xs, t)
            - spec.two_a * g * kernel_left + modes
            - spec.two_a * g * downstream)


def transient_pressure(spec: PipelineSpec, scenario: LeakScenario,
                       cfg: SeriesConfig, x: float, t: float) -> float:
    """Transient pressure at a single point."""
    return float(pressure_profile(spec, scenario, cfg, np.array([x]), t)[0])


def inlet_pressure(spec: PipelineSpec, scenario: LeakScenario,
                   cfg: SeriesConfig, t: float) -> float:
    return transient_pressure(spec, scenario, cfg, 0.0, t)


def outlet_pressure(spec: PipelineSpec, scenario: LeakScenario,
                    cfg: SeriesConfig, t: float) -> float:
    return transient_pressure(spec, scenario, cfg, spec.length, t)


def inlet_deviation(spec: PipelineSpec, scenario: LeakScenario,
                    cfg: SeriesConfig, t: float) -> float:
    """Drop of the inlet pressure below its steady value (positive = drop)."""
    return spec.p_inlet_0 - inlet_pressure(spec, scenario, cfg, t)


def outlet_deviation(spec: PipelineSpec, scenario: LeakScenario,
                     cfg: SeriesConfig, t: float) -> float:
    """Drop of the outlet pressure below its steady value (positive = drop)."""
    return spec.p_outlet_0 - outlet_pressure(spec, scenario, cfg, t)


def sample(spec: PipelineSpec, scenario: LeakScenario, cfg: SeriesConfig,
           x: float, t: float) -> TransientSample:
    """Evaluate the field and wrap the result as a validated sample."""
    return TransientSample(x=x, t=t, pressure=transient_pressure(spec, scenario, cfg, x, t))


# The two line configurations used throughout the tests and bundled scenarios.
PIPELINE_A = PipelineSpec(p_inlet_0=55e4, p_outlet_0=25e4, length=10e4,
                          g0=30.0, sound_speed=383.3, two_a=0.1)
PIPELINE_B = PipelineSpec(p_inlet_0=14e4, p_outlet_0=11e4, length=3e4,
                          g0=10.0, sound_speed=383.3, two_a=0.1)
