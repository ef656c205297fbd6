"""Precision figures of merit.

The transition frequency enters the dynamics only through the detuning, so
slopes with respect to the measured frequency and the detuning coincide.
Precision follows from error propagation on the measured population
imbalance: delta_omega0 = std(Jz) / |d<Jz>/d omega0|, to be compared against
the standard quantum limit 1/(sqrt(N) t_s) and the Heisenberg limit 1/(N t_s)
(proportionality constants fixed to 1; a plain Ramsey sequence with a
coherent state saturates this SQL convention exactly).
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateOperatingPointError, DomainError, SlopeCheckError

RICHARDSON_REL_TOL = 5e-3


def reference_limits(n_particles: int, t_signal: float) -> Tuple[float, float]:
    """(SQL, HL) = (1/(sqrt(N) t_s), 1/(N t_s))."""
    if n_particles < 1:
        raise ValueError(f"need N >= 1, got {n_particles}")
    if t_signal <= 0:
        raise ValueError(f"need t_signal > 0, got {t_signal}")
    sql = 1.0 / (math.sqrt(n_particles) * t_signal)
    hl = 1.0 / (n_particles * t_signal)
    return sql, hl


@dataclasses.dataclass(frozen=True)
class PrecisionResult:
    """Moments, signal slope, and the propagated frequency uncertainty."""

    jz_mean: float
    jz_std: float
    slope: float            # d<Jz>/d omega0, units of time
    delta_omega0: float
    sql: float
    hl: float
    metadata: Mapping = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.jz_std < 0:
            raise ValueError("jz_std must be nonnegative")
        if self.hl > self.sql + 1e-12:
            raise ValueError("Heisenberg limit cannot exceed the SQL")
        expected = self.jz_std / abs(self.slope)
        if abs(self.delta_omega0 - expected) > 1e-12 * max(expected, 1e-300):
            raise ValueError("delta_omega0 inconsistent with jz_std/|slope|")

    def beats_sql(self) -> bool:
        return self.delta_omega0 < self.sql

    def to_dict(self) -> dict:
        return {
            "jz_mean": self.jz_mean,
            "jz_std": self.jz_std,
            "slope": self.slope,
            "delta_omega0": self.delta_omega0,
            "sql": self.sql,
            "hl": self.hl,
        }


def estimate_precision(measure: Callable[[float], Tuple[float, float]],
                       delta: float,
                       n_particles: int,
                       t_signal: float,
                       fd_step: Optional[float] = None,
                       metadata: Optional[Mapping] = None) -> PrecisionResult:
    """Error-propagation estimate around the operating detuning.

    ``measure(delta)`` must return (mean, std) of the measured Jz for a run
    at that detuning.  The slope is a central difference with step
    fd_step (default 1e-4/t_signal), guarded by a half-step Richardson check
    that must agree to 0.5 percent.
    """
    if fd_step is None:
        fd_step = 1e-4 / t_signal
    if fd_step <= 0:
        raise ValueError("fd_step must be positive")
    h = fd_step
    slope_h = (measure(delta + h)[0] - measure(delta - h)[0]) / (2.0 * h)
    slope_h2 = (measure(delta + h / 2.0)[0] - measure(delta - h / 2.0)[0]) / h
    mean, std = measure(delta)
    scale = n_particles / t_signal
    if abs(slope_h2) < 1e-12 * scale:
        raise DegenerateOperatingPointError(
            f"signal slope {slope_h2!r} vanishes at delta={delta!r}")
    if abs(slope_h - slope_h2) > RICHARDSON_REL_TOL * abs(slope_h2):
        raise SlopeCheckError(
            f"half-step slope check failed: {slope_h!r} vs {slope_h2!r} "
            f"at fd_step={h!r}")
    sql, hl = reference_limits(n_particles, t_signal)
    meta = dict(metadata or {})
    meta.setdefault("fd_step", h)
    meta.setdefault("delta", delta)
    return PrecisionResult(jz_mean=mean, jz_std=std, slope=slope_h2,
                           delta_omega0=std / abs(slope_h2), sql=sql, hl=hl,
                           metadata=meta)


@dataclasses.dataclass(frozen=True)
class NoiseModel:
    """Gaussian detection noise of width sigma, in units of Jz quanta."""

    sigma: float

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")


def apply_detection_noise(result: PrecisionResult, noise: NoiseModel) -> PrecisionResult:
    """Convolve the outcome distribution with Gaussian readout noise.

    The convolution leaves the mean (and hence the slope) unchanged and adds
    sigma^2 to the variance.
    """
    std = math.sqrt(result.jz_std ** 2 + noise.sigma ** 2)
    meta = dict(result.metadata)
    meta["detection_sigma"] = noise.sigma
    return PrecisionResult(jz_mean=result.jz_mean, jz_std=std, slope=result.slope,
                           delta_omega0=std / abs(result.slope),
                           sql=result.sql, hl=result.hl, metadata=meta)


def gaussian_smeared_moments(probabilities: Sequence[float],
                             outcomes: Sequence[float],
                             sigma: float) -> Tuple[float, float]:
    """(mean, variance) of the outcome histogram smeared by detection noise.

    Implemented at the distribution level: the discrete outcome histogram is
    laid onto a fine grid, convolved with a sampled Gaussian kernel, and the
    moments are taken from the convolved distribution.  Agrees with the
    closed-form variance addition to high precision; used as its cross-check.
    """
    p = np.asarray(probabilities, dtype=float)
    x = np.asarray(outcomes, dtype=float)
    if p.shape != x.shape or p.ndim != 1:
        raise ValueError("probabilities and outcomes must be 1-d and congruent")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    mean0 = float(np.sum(p * x))
    var0 = float(np.sum(p * x ** 2) - mean0 ** 2)
    if sigma == 0.0:
        return mean0, var0
    spacing = np.diff(np.sort(x))
    base = spacing.min() if len(spacing) else 1.0
    # grid fine enough that the sampled Gaussian carries exact moments
    oversample = max(8, int(np.ceil(8.0 * base / sigma)))
    if oversample > 100_000:
        raise DomainError(
            f"sigma={sigma} is too small to resolve on the convolution grid")
    dx = base / oversample
    sorted_idx = np.argsort(x)[::-1]
    xs = x[sorted_idx]
    ps = p[sorted_idx]
    offsets = np.round((xs[0] - xs) / dx).astype(int)
    fine = np.zeros(offsets[-1] + 1)
    np.add.at(fine, offsets, ps)
    half = int(np.ceil(10.0 * sigma / dx))
    grid_k = np.arange(-half, half + 1) * dx
    kernel = np.exp(-0.5 * (grid_k / sigma) ** 2)
    kernel = kernel / (sigma * math.sqrt(2.0 * math.pi)) * dx
    conv = np.convolve(fine, kernel)
    positions = xs[0] + half * dx - np.arange(len(conv)) * dx
    mean = float(np.sum(conv * positions))
    second = float(np.sum(conv * positions ** 2))
    return mean, second - mean ** 2


@dataclasses.dataclass(frozen=True)
class ScalingFit:
    """Power-law fit delta_omega0 = prefactor * N**(-exponent)."""

    prefactor: float
    exponent: float
    r_squared: float
    samples: Tuple[Tuple[float, float], ...]


def fit_scaling(samples: Sequence[Tuple[float, float]]) -> ScalingFit:
    """Least-squares power law through (N, delta_omega0) samples in log space."""
    pts = [(float(n), float(dw)) for n, dw in samples]
    if len(pts) < 3:
        raise DomainError(f"need at least 3 samples for a scaling fit, got {len(pts)}")
    if any(n <= 0 or dw <= 0 for n, dw in pts):
        raise DomainError("scaling fit requires positive N and delta_omega0")
    log_n = np.log([n for n, _ in pts])
    log_dw = np.log([dw for _, dw in pts])
    slope, intercept = np.polyfit(log_n, log_dw, 1)
    pred = slope * log_n + intercept
    ss_res = float(np.sum((log_dw - pred) ** 2))
    ss_tot = float(np.sum((log_dw - log_dw.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(prefactor=float(np.exp(intercept)), exponent=float(-slope),
                      r_squared=r2, samples=tuple(pts))
