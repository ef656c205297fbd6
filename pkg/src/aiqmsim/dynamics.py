"""Time-evolution engines.

Two propagation paths are provided: exact exponentiation through a Hermitian
eigendecomposition for time-independent Hamiltonians, and a fixed-step
integrator for explicitly time-dependent ones.  The default time-dependent
scheme applies the exact exponential of the Hamiltonian sampled at each step
midpoint, which is unconditionally unitary per step and second-order accurate
in the step size; a fixed-step RK4 integrator serves as an independent
cross-check.
"""

from __future__ import annotations

import dataclasses
from typing import Callable

import numpy as np

from .errors import PropagationDivergedError, PropagationError
from .spin import SpinOperator, StateVector

MIDPOINT = "piecewise-exponential-midpoint"
RK4 = "fixed-step-RK4"


@dataclasses.dataclass(frozen=True)
class PropagationConfig:
    """Fixed-step settings; the step is tied to the fastest drive period."""

    steps_per_drive_period: int = 64
    method: str = MIDPOINT
    unitarity_tolerance: float = 1e-8
    renormalize_every: int = 0   # 0 = never; only meaningful for RK4

    def __post_init__(self):
        if self.steps_per_drive_period < 16:
            raise ValueError("steps_per_drive_period must be at least 16")
        if self.method not in (MIDPOINT, RK4):
            raise ValueError(f"unknown propagation method {self.method!r}")
        if self.unitarity_tolerance <= 0:
            raise ValueError("unitarity_tolerance must be positive")
        if self.renormalize_every < 0:
            raise ValueError("renormalize_every must be >= 0")


@dataclasses.dataclass(frozen=True)
class TimeDependentHamiltonian:
    """t -> Hermitian SpinOperator, with a declared fastest angular frequency.

    ``omega_max`` controls the integration step: one period 2*pi/omega_max is
    resolved with ``steps_per_drive_period`` steps.
    """

    func: Callable[[float], SpinOperator]
    omega_max: float

    def __post_init__(self):
        if self.omega_max <= 0:
            raise ValueError("omega_max must be positive")

    def __call__(self, t: float) -> SpinOperator:
        return self.func(t)

    def matrix(self, t: float) -> np.ndarray:
        op = self.func(t)
        return op.matrix if isinstance(op, SpinOperator) else np.asarray(op, dtype=complex)


def _expi(H: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) for Hermitian H via eigendecomposition."""
    try:
        w, v = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise PropagationError(
            f"eigendecomposition failed for dim={H.shape[0]}, "
            f"max|H|={np.abs(H).max():.3e}: {exc}") from exc
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def propagator_static(H, t: float) -> SpinOperator:
    """Unitary exp(-i H t) for a Hermitian H."""
    mat = H.matrix if isinstance(H, SpinOperator) else np.asarray(H, dtype=complex)
    return SpinOperator(_expi(mat, t), kind="unitary")


def evolve_static(H, t: float, state: StateVector) -> StateVector:
    """exp(-i H t)|psi> by exact exponentiation."""
    mat = H.matrix if isinstance(H, SpinOperator) else np.asarray(H, dtype=complex)
    return StateVector(state.system, _expi(mat, t) @ state.amplitudes)


def _step_grid(H: TimeDependentHamiltonian, t0: float, t1: float,
               cfg: PropagationConfig):
    if not t1 > t0:
        raise ValueError(f"need t1 > t0, got t0={t0}, t1={t1}")
    dt_target = (2.0 * np.pi / H.omega_max) / cfg.steps_per_drive_period
    n_steps = max(1, int(np.ceil((t1 - t0) / dt_target - 1e-12)))
    return n_steps, (t1 - t0) / n_steps


def propagator_timedep(H: TimeDependentHamiltonian, t0: float, t1: float,
                       cfg: PropagationConfig) -> SpinOperator:
    """Midpoint-exponential propagator over [t0, t1] as a single unitary."""
    n_steps, dt = _step_grid(H, t0, t1, cfg)
    U = None
    for k in range(n_steps):
        tm = t0 + (k + 0.5) * dt
        step = _expi(H.matrix(tm), dt)
        U = step if U is None else step @ U
    return SpinOperator(U, kind="unitary")


def evolve_timedep(H: TimeDependentHamiltonian, t0: float, t1: float,
                   cfg: PropagationConfig, state: StateVector) -> StateVector:
    """Propagate |psi> under H(t) from t0 to t1 with fixed steps."""
    n_steps, dt = _step_grid(H, t0, t1, cfg)
    amp = state.amplitudes.copy()
    if cfg.method == MIDPOINT:
        for k in range(n_steps):
            tm = t0 + (k + 0.5) * dt
            amp = _expi(H.matrix(tm), dt) @ amp
    else:
        t = t0
        for k in range(n_steps):
            amp = _rk4_step(H, t, dt, amp)
            t += dt
            if cfg.renormalize_every and (k + 1) % cfg.renormalize_every == 0:
                amp = amp / np.linalg.norm(amp)
    norm = np.linalg.norm(amp)
    if abs(norm - 1.0) > cfg.unitarity_tolerance:
        raise PropagationDivergedError(
            f"norm drifted to {norm!r} (tolerance {cfg.unitarity_tolerance}); "
            "increase steps_per_drive_period")
    return StateVector(state.system, amp / norm)


def _rk4_step(H: TimeDependentHamiltonian, t: float, dt: float,
              amp: np.ndarray) -> np.ndarray:
    h0 = H.matrix(t)
    h_mid = H.matrix(t + dt / 2.0)
    h1 = H.matrix(t + dt)
    k1 = -1j * (h0 @ amp)
    k2 = -1j * (h_mid @ (amp + dt / 2.0 * k1))
    k3 = -1j * (h_mid @ (amp + dt / 2.0 * k2))
    k4 = -1j * (h1 @ (amp + dt * k3))
    return amp + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
