"""Rotating-frame Hamiltonian and its time-independent effective models.

A one-axis-twisting ensemble driven by amplitude-modulated in-phase and
quadrature fields obeys, in the frame rotating at the carrier and after the
rotating-wave approximation,

    H_R(t) = chi Jz^2 + delta Jz + 2 Omega cos(omega_m t) (cos(alpha) Jx + sin(alpha) Jy).

For fast modulation the stroboscopic dynamics at multiples of T = 2 pi/omega_m
follows a time-independent Hamiltonian whose couplings are renormalized by
Bessel factors L0 = J0(4 Omega/omega_m) and K0 = J0(2 Omega/omega_m).  Tuning
L0 = -1/3 turns the twisting into a pure two-axis form with strength chi/3,
and alternating the drive phase between 0 and pi/2 cancels it entirely,
leaving only the signal term K0 delta Jz.
"""

from __future__ import annotations

import dataclasses
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import j0

from .errors import ConditionViolatedError, DomainError
from .spin import SpinOperator, SpinSystem

TWIST_CANCEL_L0 = -1.0 / 3.0
CONDITION_TOL = 1e-6


@dataclasses.dataclass(frozen=True)
class DriveParams:
    """Full parameterization of the rotating-frame Hamiltonian.

    alpha is the drive phase: the in-phase and quadrature Rabi amplitudes are
    Omega*cos(alpha) and Omega*sin(alpha).
    """

    chi: float
    delta: float
    omega_m: float
    Omega: float
    alpha: float = 0.0

    def __post_init__(self):
        if self.omega_m <= 0:
            raise ValueError(f"omega_m must be positive, got {self.omega_m}")
        if self.Omega < 0:
            raise ValueError(f"Omega must be nonnegative, got {self.Omega}")

    @property
    def ratio(self) -> float:
        return self.Omega / self.omega_m

    @property
    def l0(self) -> float:
        return float(j0(4.0 * self.ratio))

    @property
    def k0(self) -> float:
        return float(j0(2.0 * self.ratio))

    @property
    def omega_i(self) -> float:
        return self.Omega * np.cos(self.alpha)

    @property
    def omega_q(self) -> float:
        return self.Omega * np.sin(self.alpha)

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega_m

    def with_(self, **changes) -> "DriveParams":
        return dataclasses.replace(self, **changes)

    @classmethod
    def at_twist_cancellation(cls, chi: float, delta: float, omega_m: float,
                              alpha: float = 0.0) -> "DriveParams":
        """Drive amplitude solved so that L0 = J0(4 Omega/omega_m) = -1/3."""
        ratio = solve_drive_ratio(TWIST_CANCEL_L0)
        return cls(chi=chi, delta=delta, omega_m=omega_m,
                   Omega=ratio * omega_m, alpha=alpha)


@lru_cache(maxsize=32)
def solve_drive_ratio(target_l0: float, bracket_max: float = 1.2) -> float:
    """Smallest ratio Omega/omega_m with J0(4 * ratio) == target_l0.

    Scans [0, bracket_max] for the first sign change and refines it by
    bracketed root finding; the residual is driven below 1e-10.
    """
    def f(x):
        return j0(4.0 * x) - target_l0

    if abs(f(0.0)) <= 1e-14:
        return 0.0
    xs = np.linspace(0.0, bracket_max, 1 + int(400 * bracket_max))
    fs = f(xs)
    crossings = np.nonzero(np.sign(fs[:-1]) * np.sign(fs[1:]) <= 0)[0]
    if len(crossings) == 0:
        raise DomainError(
            f"J0(4x) never reaches {target_l0} on [0, {bracket_max}] "
            f"(range [{fs.min() + target_l0:.4f}, {fs.max() + target_l0:.4f}])")
    i = crossings[0]
    if abs(fs[i]) < 1e-13:
        return float(xs[i])
    root = brentq(f, xs[i], xs[i + 1], xtol=1e-14, rtol=8.9e-16)
    if abs(f(root)) > 1e-10:
        raise DomainError(f"root refinement stalled at residual {f(root):.3e}")
    return float(root)


def h_rotating(p: DriveParams, t: float, system: SpinSystem) -> SpinOperator:
    """The rotating-frame Hamiltonian evaluated at time t."""
    jx, jy, jz = (system.axis_matrix(a) for a in "xyz")
    drive = 2.0 * p.Omega * np.cos(p.omega_m * t)
    mat = (p.chi * (jz @ jz) + p.delta * jz
           + drive * (np.cos(p.alpha) * jx + np.sin(p.alpha) * jy))
    return SpinOperator(mat, kind="observable")


def rotating_hamiltonian_fn(p: DriveParams, system: SpinSystem):
    """Time-dependent Hamiltonian wrapper suitable for the propagators."""
    from .dynamics import TimeDependentHamiltonian
    return TimeDependentHamiltonian(func=lambda t: h_rotating(p, t, system),
                                    omega_max=p.omega_m)


@dataclasses.dataclass(frozen=True)
class EffectiveModel:
    """A time-independent model with its renormalized couplings."""

    tag: str
    hamiltonian: SpinOperator
    params: DriveParams
    chi_eff: float
    delta_eff: float


def _quadrature_ops(system: SpinSystem, angle: float) -> np.ndarray:
    return np.cos(angle) * system.axis_matrix("x") + np.sin(angle) * system.axis_matrix("y")


def _require_twist_cancellation(p: DriveParams, what: str):
    if abs(p.l0 - TWIST_CANCEL_L0) > CONDITION_TOL:
        raise ConditionViolatedError(
            f"{what} requires L0 = -1/3 within {CONDITION_TOL}, got L0 = {p.l0!r} "
            f"(ratio {p.ratio!r})", actual=p.l0)


def h_floquet_general(p: DriveParams, system: SpinSystem) -> EffectiveModel:
    """Stroboscopic effective Hamiltonian for a single drive phase alpha.

    H = -(chi/2) [(1 + L0) J_alpha^2 + 2 L0 J_beta^2] + K0 delta Jz,
    with J_alpha, J_beta the in-plane quadratures at alpha and alpha + pi/2.
    """
    l0, k0 = p.l0, p.k0
    ja = _quadrature_ops(system, p.alpha)
    jb = _quadrature_ops(system, p.alpha + np.pi / 2.0)
    jz = system.axis_matrix("z")
    mat = (-p.chi / 2.0 * ((1.0 + l0) * (ja @ ja) + 2.0 * l0 * (jb @ jb))
           + k0 * p.delta * jz)
    return EffectiveModel(tag="floquet-general",
                          hamiltonian=SpinOperator(mat, kind="observable"),
                          params=p, chi_eff=p.chi / 3.0, delta_eff=k0 * p.delta)


def h_inphase_eff(p: DriveParams, system: SpinSystem) -> EffectiveModel:
    """Twist-cancellation-point model for the in-phase drive (alpha = 0)."""
    _require_twist_cancellation(p, "in-phase effective model")
    model = h_floquet_general(p.with_(alpha=0.0), system)
    return dataclasses.replace(model, tag="s1")


def h_quadrature_eff(p: DriveParams, system: SpinSystem) -> EffectiveModel:
    """Twist-cancellation-point model for the quadrature drive (alpha = pi/2)."""
    _require_twist_cancellation(p, "quadrature effective model")
    model = h_floquet_general(p.with_(alpha=np.pi / 2.0), system)
    return dataclasses.replace(model, tag="s2")


def h_signal_eff(p: DriveParams, system: SpinSystem) -> EffectiveModel:
    """Signal-accumulation model delta_eff Jz left after phase alternation."""
    _require_twist_cancellation(p, "signal effective model")
    delta_eff = p.k0 * p.delta
    mat = delta_eff * system.axis_matrix("z")
    return EffectiveModel(tag="signal", hamiltonian=SpinOperator(mat, kind="observable"),
                          params=p, chi_eff=p.chi / 3.0, delta_eff=float(delta_eff))


def h_eff_ratio(p: DriveParams, system: SpinSystem) -> EffectiveModel:
    """Alternation-averaged model at arbitrary drive ratio.

    H = -(chi/4) (1 + 3 L0) (Jx^2 + Jy^2) + K0 delta Jz, which equals the
    arithmetic mean of the general model at alpha = 0 and alpha = pi/2 and
    commutes with Jz up to its signal term.
    """
    l0, k0 = p.l0, p.k0
    jx, jy, jz = (system.axis_matrix(a) for a in "xyz")
    mat = (-p.chi / 4.0 * (1.0 + 3.0 * l0) * (jx @ jx + jy @ jy)
           + k0 * p.delta * jz)
    return EffectiveModel(tag="ratio-robust",
                          hamiltonian=SpinOperator(mat, kind="observable"),
                          params=p, chi_eff=p.chi / 3.0, delta_eff=float(k0 * p.delta))


def h_eff_phase(p: DriveParams, system: SpinSystem, alpha2: float) -> EffectiveModel:
    """Alternation-averaged model when the second drive phase is alpha2.

    The first phase stays 0; at the twist-cancellation point

    H = chi_eff [cos(alpha2)^2 (Jy^2 - Jx^2)
                 - sin(2 alpha2)/2 (Jx Jy + Jy Jx)] + delta_eff Jz.
    """
    _require_twist_cancellation(p, "phase-robust effective model")
    if abs(p.alpha) > 1e-12:
        raise ConditionViolatedError(
            f"first-period phase must be 0, got alpha = {p.alpha!r}", actual=p.alpha)
    chi_eff = p.chi / 3.0
    delta_eff = p.k0 * p.delta
    jx, jy, jz = (system.axis_matrix(a) for a in "xyz")
    twist = jy @ jy - jx @ jx
    cross = jx @ jy + jy @ jx
    mat = (chi_eff * (np.cos(alpha2) ** 2 * twist - 0.5 * np.sin(2.0 * alpha2) * cross)
           + delta_eff * jz)
    return EffectiveModel(tag="phase-robust",
                          hamiltonian=SpinOperator(mat, kind="observable"),
                          params=p, chi_eff=chi_eff, delta_eff=float(delta_eff))


def _tat_model(p: DriveParams, system: SpinSystem, tag: str, sign: float,
               what: str) -> EffectiveModel:
    _require_twist_cancellation(p, what)
    if p.delta != 0.0:
        raise ConditionViolatedError(
            f"{what} requires delta = 0, got delta = {p.delta!r}", actual=p.delta)
    chi_eff = p.chi / 3.0
    jx, jy = system.axis_matrix("x"), system.axis_matrix("y")
    mat = sign * chi_eff * (jy @ jy - jx @ jx)
    return EffectiveModel(tag=tag, hamiltonian=SpinOperator(mat, kind="observable"),
                          params=p, chi_eff=chi_eff, delta_eff=0.0)


def h_entangle_eff(p: DriveParams, system: SpinSystem) -> EffectiveModel:
    """Two-axis-twisting generator chi_eff (Jy^2 - Jx^2) for state preparation."""
    return _tat_model(p, system, "entangle", +1.0, "entangling model")


def h_readout_eff(p: DriveParams, system: SpinSystem) -> EffectiveModel:
    """Time-reversed twisting -chi_eff (Jy^2 - Jx^2) for echo readout."""
    return _tat_model(p, system, "readout", -1.0, "readout model")
