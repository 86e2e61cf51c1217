"""Measurements on states and trajectories: smoothed energy, space-time norms,
conservation drift, inequality ratios, and log-log slope fitting.

The smoothing operator turns rough data into finite-energy data, and every
quantity here is built from it: the smoothed energy replaces u by Iu in the
usual energy functional, the space-time norms measure D^(1-m) Iu in Lebesgue
exponents drawn from the admissible triple region, and the ratio diagnostics
divide measured left-hand sides by the scaling predictions so that a bounded,
cutoff-trend-free ratio is evidence for the corresponding inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

try:
    from numpy import trapezoid as _trapezoid
except ImportError:  # older numpy
    from numpy import trapz as _trapezoid

from .fields import (
    apply_multiplier,
    lebesgue_norm,
    power_multiplier,
    smoothing_multiplier,
    sobolev_norm,
)
from .dynamics import Trajectory, WaveState, pair_sobolev_norm
from .params import PdeParams, TripleMQR, data_size, is_allowed_triple, reference_triples


class DiagnosticsError(ValueError):
    """Measurement requested on unusable input (bad triple, too few samples)."""


def _ratio(num: float, den: float) -> float:
    """num/den with the 0/0 -> 0 convention; nonzero/0 is reported as inf."""
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den


# ---------------------------------------------------------------------------
# Smoothed energy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyBreakdown:
    """Kinetic, gradient, and potential parts of the smoothed energy."""

    kinetic: float
    gradient: float
    potential: float

    @property
    def total(self) -> float:
        return self.kinetic + self.gradient + self.potential


def smoothed_energy(state: WaveState, cutoff: float, s: float, p: float,
                    oversample: int = 2) -> EnergyBreakdown:
    """Energy of the smoothed pair: |Iv|^2/2 + |grad Iu|^2/2 + |Iu|^(p+1)/(p+1).

    The smoothing multiplier is the identity below the cutoff, so band-limited
    states reproduce the plain energy exactly.  The potential is integrated on
    the oversampled grid so drift measurements see the solver's conserved
    quadrature, not base-grid aliasing noise.
    """
    smoother = smoothing_multiplier(cutoff, s)
    iu = apply_multiplier(state.u, smoother)
    iv = apply_multiplier(state.v, smoother)
    kinetic = 0.5 * sobolev_norm(iv, 0.0) ** 2
    gradient = 0.5 * sobolev_norm(iu, 1.0) ** 2
    potential = lebesgue_norm(iu, p + 1.0, oversample) ** (p + 1.0) / (p + 1.0)
    return EnergyBreakdown(kinetic=kinetic, gradient=gradient, potential=potential)


# ---------------------------------------------------------------------------
# Space-time norms over the admissible triples
# ---------------------------------------------------------------------------

def _sampled_states(traj: Trajectory) -> list[WaveState]:
    if traj.states is None or not traj.states:
        raise DiagnosticsError("trajectory was sampled without keeping states")
    return traj.states


def _check_uniform(times: np.ndarray) -> None:
    if len(times) >= 3:
        gaps = np.diff(times)
        if np.max(np.abs(gaps - gaps[0])) > 1e-9 * abs(gaps[0]):
            raise DiagnosticsError("trajectory samples are not uniformly spaced")


def spacetime_norm(traj: Trajectory, triple: TripleMQR, params: PdeParams,
                   cutoff: float) -> float:
    """L^q-in-time L^r-in-space norm of D^(1-m) I u along the trajectory.

    Time integration is the composite trapezoid rule on the q-th power of the
    spatial norm; q = inf takes the max over samples and accepts a single
    sample, while finite q needs at least two.
    """
    if not is_allowed_triple(triple, params):
        raise DiagnosticsError(f"triple {triple} is outside the allowed region")
    states = _sampled_states(traj)
    mults = (power_multiplier(1.0 - triple.m), smoothing_multiplier(cutoff, params.s))
    phi = np.array([lebesgue_norm(apply_multiplier(w.u, mults), triple.r)
                    for w in states])
    if math.isinf(triple.q):
        return float(np.max(phi))
    if len(states) < 2:
        raise DiagnosticsError("finite-q time norm needs at least 2 samples")
    _check_uniform(traj.times)
    return float(_trapezoid(phi ** triple.q, traj.times) ** (1.0 / triple.q))


@dataclass(frozen=True)
class NormReport:
    """One space-time norm per reference triple, plus their maximum."""

    triples: tuple[TripleMQR, ...]
    values: tuple[float, ...]

    @property
    def z_max(self) -> float:
        return max(self.values)


def spacetime_report(traj: Trajectory, params: PdeParams, cutoff: float) -> NormReport:
    """Evaluate the space-time norm on every reference triple."""
    triples = reference_triples(params)
    values = tuple(spacetime_norm(traj, t, params, cutoff) for t in triples)
    return NormReport(triples=triples, values=values)


# ---------------------------------------------------------------------------
# Conservation drift and inequality ratios
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DriftReport:
    """Smoothed-energy drift statistics over a sampled trajectory."""

    drift: float
    e_sup: float
    energies: np.ndarray


def energy_drift(traj: Trajectory, cutoff: float, s: float, p: float) -> DriftReport:
    """sup_t |E(t) - E(0)| and sup_t E(t) of the smoothed energy."""
    states = _sampled_states(traj)
    if len(states) < 2:
        raise DiagnosticsError("drift needs at least 2 samples")
    energies = np.array([smoothed_energy(w, cutoff, s, p).total for w in states])
    drift = float(np.max(np.abs(energies - energies[0])))
    return DriftReport(drift=drift, e_sup=float(np.max(energies)), energies=energies)


@dataclass(frozen=True)
class BoundRatios:
    """Measured/predicted ratios for the four smoothed-data bounds.

    gradient: |grad Iu| vs N^(1-s) |u|_s; velocity: |Iv| vs N^(1-s) |v|_(s-1);
    potential: |Iu|_(p+1)^(p+1) vs N^(2(1-s)) |u|_s^2 |u|_crit^(p-1);
    energy: total smoothed energy vs N^(2(1-s)) times the data-size functional.
    """

    gradient: float
    velocity: float
    potential: float
    energy: float


def initial_bound_ratios(state: WaveState, cutoff: float, params: PdeParams) -> BoundRatios:
    """Ratios of the smoothed-energy components to their data-norm predictions."""
    s, p = params.s, params.p
    breakdown = smoothed_energy(state, cutoff, s, p)
    norm_s = sobolev_norm(state.u, s)
    norm_v = sobolev_norm(state.v, s - 1.0)
    norm_crit = sobolev_norm(state.u, params.s_crit)
    smoother = smoothing_multiplier(cutoff, s)
    grad_num = sobolev_norm(apply_multiplier(state.u, smoother), 1.0)
    vel_num = sobolev_norm(apply_multiplier(state.v, smoother), 0.0)
    pot_num = (p + 1.0) * breakdown.potential
    factor = cutoff ** (1.0 - s)
    return BoundRatios(
        gradient=_ratio(grad_num, factor * norm_s),
        velocity=_ratio(vel_num, factor * norm_v),
        potential=_ratio(pot_num, factor ** 2 * norm_s ** 2 * norm_crit ** (p - 1.0)),
        energy=_ratio(breakdown.total,
                      factor ** 2 * data_size((norm_s, norm_v), norm_crit, p)),
    )


@dataclass(frozen=True)
class GrowthReport:
    """Norm-increment ratio against the drift-plus-spacetime bracket."""

    initial: float
    final: float
    e_sup: float
    z_max: float
    bracket: float
    ratio: float


def norm_growth_ratio(traj: Trajectory, params: PdeParams, cutoff: float) -> GrowthReport:
    """(pair norm at T minus at 0) over the energy/space-time bracket.

    The bracket is sup E^(1/2) + T sup E^(p/(p+1)) + z_max^p / N^((5-p)/2+1-s);
    a bounded ratio across runs supports the norm-increment bound.  Zero
    trajectories return ratio 0 by the 0/0 convention.
    """
    states = _sampled_states(traj)
    if len(states) < 2:
        raise DiagnosticsError("growth ratio needs at least 2 samples")
    s, p = params.s, params.p
    horizon = float(traj.times[-1] - traj.times[0])
    initial = pair_sobolev_norm(states[0], s)
    final = pair_sobolev_norm(states[-1], s)
    e_sup = energy_drift(traj, cutoff, s, p).e_sup
    z_max = spacetime_report(traj, params, cutoff).z_max
    bracket = (math.sqrt(e_sup) + horizon * e_sup ** (p / (p + 1.0))
               + z_max ** p / cutoff ** (0.5 * (5.0 - p) + 1.0 - s))
    return GrowthReport(initial=initial, final=final, e_sup=e_sup, z_max=z_max,
                        bracket=bracket, ratio=_ratio(final - initial, bracket))


# ---------------------------------------------------------------------------
# Slope fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line through (log x, log y) with RMS log-residual."""

    slope: float
    intercept: float
    residual: float


def fit_loglog_slope(xs, ys) -> SlopeFit:
    """Fit log y = slope * log x + intercept; needs >= 3 positive points."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DiagnosticsError("slope fit needs matching 1-d sequences")
    if len(x) < 3:
        raise DiagnosticsError("slope fit needs at least 3 points")
    if not (np.all(x > 0.0) and np.all(y > 0.0)
            and np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DiagnosticsError("slope fit needs positive finite inputs")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return SlopeFit(slope=float(slope), intercept=float(intercept),
                    residual=float(np.sqrt(np.mean(resid ** 2))))
