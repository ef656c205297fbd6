"""Metrology sequences built from the driven twisting system.

Three simulation fidelities are supported throughout:

* ``FULL_DRIVE`` propagates the rotating-frame Hamiltonian period by period
  with the midpoint-exponential integrator (the numerical ground truth);
* ``EFFECTIVE`` exponentiates the time-independent effective models;
* ``BARE`` switches the drive off entirely (chi Jz^2 + delta Jz), the
  no-modulation baseline.

Signal accumulation alternates the drive phase between 0 and pi/2 every n
drive periods; at the twist-cancellation point the two half-cycles carry
opposite twisting and the net stroboscopic evolution reduces to a pure
phase accumulation exp(-i delta_eff Jz t_s).

The full sequence prepares a squeezed state with the effective two-axis
twist from a pole-pointing coherent state, rotates it onto the equator,
accumulates signal, rotates back, and inverts the twist for an
amplification echo before measuring Jz.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import dynamics, floquet, metrology
from .errors import ConditionViolatedError, ScheduleError
from .spin import (SpinOperator, SpinSystem, StateVector, coherent_state,
                   dicke_state, expectation, oat_squeezed_input, rotate, variance)


class SimulationMode(enum.Enum):
    FULL_DRIVE = "full"
    EFFECTIVE = "effective"
    BARE = "bare"

    @classmethod
    def parse(cls, value) -> "SimulationMode":
        if isinstance(value, cls):
            return value
        for mode in cls:
            if mode.value == value:
                return mode
        raise ValueError(f"unknown simulation mode {value!r}; "
                         f"choose from {[m.value for m in cls]}")


@dataclasses.dataclass(frozen=True)
class AiqmSchedule:
    """Alternation timing: k cycles of (n periods in-phase, n periods quadrature)."""

    n: int
    k: int
    period: float

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ScheduleError(f"need n >= 1 and k >= 1, got n={self.n}, k={self.k}")
        if self.period <= 0:
            raise ScheduleError(f"drive period must be positive, got {self.period}")

    @property
    def block(self) -> float:
        return self.n * self.period

    @property
    def t_signal(self) -> float:
        return 2.0 * self.k * self.n * self.period

    @classmethod
    def for_signal_time(cls, t_signal: float, omega_m: float, n: int = 1) -> "AiqmSchedule":
        """Snap t_signal to the nearest even number of n-period blocks."""
        period = 2.0 * math.pi / omega_m
        if t_signal <= 0:
            raise ScheduleError(f"t_signal must be positive, got {t_signal}")
        k = int(round(t_signal / (2.0 * n * period)))
        if k < 1:
            raise ScheduleError(
                f"t_signal={t_signal} is shorter than one alternation cycle "
                f"2*n*T={2 * n * period}")
        return cls(n=n, k=k, period=period)


# ---------------------------------------------------------------------------
# full-drive period propagators (cached: every stage reuses whole periods)

_PERIOD_CACHE: Dict[tuple, np.ndarray] = {}
_PERIOD_CACHE_MAX = 64


def _period_propagator(system: SpinSystem, p: floquet.DriveParams,
                       steps_per_period: int) -> np.ndarray:
    """One-period unitary of the rotating-frame Hamiltonian, cached."""
    key = (system.n_particles, p.chi, p.delta, p.omega_m, p.Omega, p.alpha,
           steps_per_period)
    hit = _PERIOD_CACHE.get(key)
    if hit is not None:
        return hit
    cfg = dynamics.PropagationConfig(steps_per_drive_period=steps_per_period)
    ham = floquet.rotating_hamiltonian_fn(p, system)
    unitary = dynamics.propagator_timedep(ham, 0.0, p.period, cfg).matrix
    if len(_PERIOD_CACHE) >= _PERIOD_CACHE_MAX:
        _PERIOD_CACHE.pop(next(iter(_PERIOD_CACHE)))
    _PERIOD_CACHE[key] = unitary
    return unitary


def clear_period_cache():
    _PERIOD_CACHE.clear()


# ---------------------------------------------------------------------------
# signal accumulation

def accumulate_aiqm(state: StateVector, p: floquet.DriveParams,
                    schedule: AiqmSchedule, mode,
                    steps_per_period: int = 64) -> StateVector:
    """Alternate in-phase and quadrature drive for k cycles of 2n periods.

    FULL_DRIVE propagates the rotating-frame Hamiltonian; EFFECTIVE applies
    the exponentials of the two twist-cancellation-point models.  Both
    approach exp(-i delta_eff Jz t_signal) as the block length shrinks.
    """
    mode = SimulationMode.parse(mode)
    if abs(p.l0 - floquet.TWIST_CANCEL_L0) > floquet.CONDITION_TOL:
        raise ConditionViolatedError(
            f"alternation requires L0 = -1/3 within {floquet.CONDITION_TOL}, "
            f"got {p.l0!r}", actual=p.l0)
    system = state.system
    if mode is SimulationMode.FULL_DRIVE:
        if abs(schedule.period - p.period) > 1e-12 * p.period:
            raise ScheduleError(
                f"schedule period {schedule.period!r} does not match the drive "
                f"period {p.period!r}")
        u1 = _period_propagator(system, p.with_(alpha=0.0), steps_per_period)
        u2 = _period_propagator(system, p.with_(alpha=np.pi / 2.0), steps_per_period)
        block1 = np.linalg.matrix_power(u1, schedule.n)
        block2 = np.linalg.matrix_power(u2, schedule.n)
    elif mode is SimulationMode.EFFECTIVE:
        h1 = floquet.h_inphase_eff(p, system).hamiltonian
        h2 = floquet.h_quadrature_eff(p, system).hamiltonian
        block1 = dynamics.propagator_static(h1, schedule.block).matrix
        block2 = dynamics.propagator_static(h2, schedule.block).matrix
    else:
        raise ScheduleError("alternation is defined for full or effective mode only")
    cycle = np.linalg.matrix_power(block2 @ block1, schedule.k)
    return StateVector(system, cycle @ state.amplitudes)


def accumulate_bare(state: StateVector, chi: float, delta: float,
                    t_signal: float) -> StateVector:
    """Undriven evolution exp(-i (chi Jz^2 + delta Jz) t_signal); exact phases."""
    m = state.system.m_values
    phases = np.exp(-1j * (chi * m ** 2 + delta * m) * t_signal)
    return StateVector(state.system, phases * state.amplitudes)


# ---------------------------------------------------------------------------
# Ramsey-style pipeline (squeezed input, signal, pi/2 readout)

@dataclasses.dataclass(frozen=True)
class RamseyConfig:
    """Configuration of the squeezed-input signal-accumulation sequence."""

    n_particles: int = 100
    chi: float = 1.0
    delta: float = 1.0
    t_signal: float = 0.01
    mode: SimulationMode = SimulationMode.EFFECTIVE
    omega_m_factor: float = 20.0       # omega_m = 2 pi * factor * N * chi
    omega_m: Optional[float] = None    # explicit override
    blocks_n: int = 1
    chi_t_prepare: float = 0.03
    steps_per_period: int = 64
    drive_ratio: Optional[float] = None
    fd_step: Optional[float] = None

    def resolved_omega_m(self) -> float:
        if self.omega_m is not None:
            return self.omega_m
        return 2.0 * math.pi * self.omega_m_factor * self.n_particles * self.chi

    def resolved_ratio(self) -> float:
        if self.drive_ratio is not None:
            return self.drive_ratio
        return floquet.solve_drive_ratio(floquet.TWIST_CANCEL_L0)

    def drive_params(self, delta: Optional[float] = None) -> floquet.DriveParams:
        omega_m = self.resolved_omega_m()
        return floquet.DriveParams(
            chi=self.chi, delta=self.delta if delta is None else delta,
            omega_m=omega_m, Omega=self.resolved_ratio() * omega_m)


def _ramsey_schedule(cfg: RamseyConfig) -> AiqmSchedule:
    return AiqmSchedule.for_signal_time(cfg.t_signal, cfg.resolved_omega_m(),
                                        n=cfg.blocks_n)


def ramsey_signal_time(cfg: RamseyConfig) -> float:
    """Signal time actually realized (full-drive mode snaps to whole cycles)."""
    if SimulationMode.parse(cfg.mode) is SimulationMode.FULL_DRIVE:
        return _ramsey_schedule(cfg).t_signal
    return cfg.t_signal


def ramsey_measure_fn(cfg: RamseyConfig) -> Callable[[float], Tuple[float, float]]:
    """detuning -> (mean, std) of the measured Jz for the Ramsey sequence."""
    system = SpinSystem(cfg.n_particles)
    input_state = oat_squeezed_input(system, cfg.chi_t_prepare)
    jz = system.jz
    mode = SimulationMode.parse(cfg.mode)

    def measure(delta: float) -> Tuple[float, float]:
        if mode is SimulationMode.BARE:
            state = accumulate_bare(input_state, cfg.chi, delta, cfg.t_signal)
        elif mode is SimulationMode.EFFECTIVE:
            # alternation collapses to the pure signal model at the cancellation point
            model = floquet.h_signal_eff(cfg.drive_params(delta), system)
            phases = np.exp(-1j * model.delta_eff * system.m_values * cfg.t_signal)
            state = StateVector(system, phases * input_state.amplitudes)
        else:
            schedule = _ramsey_schedule(cfg)
            state = accumulate_aiqm(input_state, cfg.drive_params(delta), schedule,
                                    mode, cfg.steps_per_period)
        state = rotate(state, "x", np.pi / 2.0)
        return expectation(state, jz), math.sqrt(variance(state, jz))

    return measure


def run_fig2_protocol(cfg: RamseyConfig) -> metrology.PrecisionResult:
    """Squeezed input -> signal accumulation -> R_x^{pi/2} -> Jz moments."""
    t_signal = ramsey_signal_time(cfg)
    meta = {"pipeline": "ramsey", "mode": SimulationMode.parse(cfg.mode).value,
            "n_particles": cfg.n_particles, "chi": cfg.chi,
            "t_signal": t_signal, "t_signal_requested": cfg.t_signal}
    return metrology.estimate_precision(
        ramsey_measure_fn(cfg), cfg.delta, cfg.n_particles,
        t_signal, fd_step=cfg.fd_step, metadata=meta)


def run_signal_model(cfg: RamseyConfig,
                     hamiltonian_for_delta: Callable[[float], SpinOperator]
                     ) -> metrology.PrecisionResult:
    """Ramsey pipeline with an arbitrary effective signal Hamiltonian.

    Used for robustness sweeps where the signal stage follows a model like
    the alternation-averaged Hamiltonians at detuned drive parameters.
    """
    system = SpinSystem(cfg.n_particles)
    input_state = oat_squeezed_input(system, cfg.chi_t_prepare)
    jz = system.jz

    def measure(d: float) -> Tuple[float, float]:
        h = hamiltonian_for_delta(d)
        state = dynamics.evolve_static(h, cfg.t_signal, input_state)
        state = rotate(state, "x", np.pi / 2.0)
        return expectation(state, jz), math.sqrt(variance(state, jz))

    meta = {"pipeline": "signal-model", "n_particles": cfg.n_particles,
            "chi": cfg.chi, "t_signal": cfg.t_signal}
    return metrology.estimate_precision(measure, cfg.delta, cfg.n_particles,
                                        cfg.t_signal, fd_step=cfg.fd_step,
                                        metadata=meta)


# ---------------------------------------------------------------------------
# full-stage sequence: entangle -> rotate -> signal -> rotate back -> echo

@dataclasses.dataclass(frozen=True)
class FullStageConfig:
    """Configuration of the prepare/accumulate/echo-readout sequence."""

    n_particles: int = 100
    chi: float = 1.0
    delta: float = 1.0
    t_signal: float = 0.01
    mode: SimulationMode = SimulationMode.EFFECTIVE
    omega_m_factor: float = 100.0
    omega_m: Optional[float] = None
    t_entangle: Optional[float] = None   # default 3 ln(2N)/(2N) / chi
    blocks_n: int = 1
    steps_per_period: int = 64
    drive_ratio: Optional[float] = None
    swap_drive_roles: bool = False       # quadrature drive prepares, in-phase reads out
    fd_step: Optional[float] = None

    def resolved_omega_m(self) -> float:
        if self.omega_m is not None:
            return self.omega_m
        return 2.0 * math.pi * self.omega_m_factor * self.n_particles * self.chi

    def resolved_ratio(self) -> float:
        if self.drive_ratio is not None:
            return self.drive_ratio
        return floquet.solve_drive_ratio(floquet.TWIST_CANCEL_L0)

    def resolved_t_entangle(self) -> float:
        if self.t_entangle is not None:
            return self.t_entangle
        n = self.n_particles
        return 3.0 * math.log(2.0 * n) / (2.0 * n) / self.chi


@dataclasses.dataclass(frozen=True)
class StagePlan:
    """Realized stage timing; drive-mode durations snap to whole periods."""

    mode: SimulationMode
    t_entangle: float
    t_readout: float
    t_signal: float
    periods_entangle: Optional[int] = None
    periods_signal_cycles: Optional[int] = None
    requested_t_entangle: Optional[float] = None
    requested_t_signal: Optional[float] = None


def plan_full_stage(cfg: FullStageConfig) -> StagePlan:
    mode = SimulationMode.parse(cfg.mode)
    t_en = cfg.resolved_t_entangle()
    if mode is not SimulationMode.FULL_DRIVE:
        return StagePlan(mode=mode, t_entangle=t_en, t_readout=t_en,
                         t_signal=cfg.t_signal, requested_t_entangle=t_en,
                         requested_t_signal=cfg.t_signal)
    period = 2.0 * math.pi / cfg.resolved_omega_m()
    m_en = max(1, int(round(t_en / period)))
    schedule = AiqmSchedule.for_signal_time(cfg.t_signal, cfg.resolved_omega_m(),
                                            n=cfg.blocks_n)
    return StagePlan(mode=mode, t_entangle=m_en * period, t_readout=m_en * period,
                     t_signal=schedule.t_signal, periods_entangle=m_en,
                     periods_signal_cycles=schedule.k,
                     requested_t_entangle=t_en, requested_t_signal=cfg.t_signal)


_ROTATIONS = {
    # U_R = exp(-i Jx pi/4) exp(+i Jy pi/2): pole-squeezed state onto the x axis
    "to_equator": (("y", -np.pi / 2.0), ("x", np.pi / 4.0)),
    # U_R^dag
    "from_equator": (("x", -np.pi / 4.0), ("y", np.pi / 2.0)),
    # U_R' = exp(+i Jx 3 pi/4) exp(-i Jy pi/2): align the echo output for Jz readout
    "readout": (("y", np.pi / 2.0), ("x", -3.0 * np.pi / 4.0)),
}


def _apply_named_rotation(state: StateVector, name: str) -> StateVector:
    for axis, angle in _ROTATIONS[name]:
        state = rotate(state, axis, angle)
    return state


def full_stage_states(cfg: FullStageConfig, delta: Optional[float] = None
                      ) -> List[Tuple[str, StateVector]]:
    """Run the staged sequence, returning the named checkpoint states.

    Checkpoints: ``initial`` (pole coherent state), ``entangled``,
    ``encoded`` (back on the preparation frame after signal accumulation),
    ``readout`` (after the inverted twist), ``final`` (measurement frame).
    """
    mode = SimulationMode.parse(cfg.mode)
    if delta is None:
        delta = cfg.delta
    system = SpinSystem(cfg.n_particles)
    plan = plan_full_stage(cfg)
    prep_alpha, readout_alpha = (np.pi / 2.0, 0.0) if cfg.swap_drive_roles \
        else (0.0, np.pi / 2.0)
    prep_sign = -1.0 if cfg.swap_drive_roles else 1.0

    out = []
    state = dicke_state(system, system.total_spin)   # coherent state at the pole
    out.append(("initial", state))

    omega_m = cfg.resolved_omega_m()
    ratio = cfg.resolved_ratio()
    base = floquet.DriveParams(chi=cfg.chi, delta=0.0, omega_m=omega_m,
                               Omega=ratio * omega_m)

    if mode is SimulationMode.FULL_DRIVE:
        u_prep = _period_propagator(system, base.with_(alpha=prep_alpha),
                                    cfg.steps_per_period)
        u_prep = np.linalg.matrix_power(u_prep, plan.periods_entangle)
        state = StateVector(system, u_prep @ state.amplitudes)
    elif mode is SimulationMode.EFFECTIVE:
        twist = floquet.h_entangle_eff(base, system).hamiltonian.matrix * prep_sign
        state = dynamics.evolve_static(SpinOperator(twist, kind="observable"),
                                       plan.t_entangle, state)
    else:
        state = accumulate_bare(state, cfg.chi, 0.0, plan.t_entangle)
    out.append(("entangled", state))

    state = _apply_named_rotation(state, "to_equator")
    if mode is SimulationMode.FULL_DRIVE:
        schedule = AiqmSchedule(n=cfg.blocks_n, k=plan.periods_signal_cycles,
                                period=base.period)
        state = accumulate_aiqm(state, base.with_(delta=delta), schedule, mode,
                                cfg.steps_per_period)
    elif mode is SimulationMode.EFFECTIVE:
        model = floquet.h_signal_eff(base.with_(delta=delta), system)
        phases = np.exp(-1j * model.delta_eff * system.m_values * plan.t_signal)
        state = StateVector(system, phases * state.amplitudes)
    else:
        state = accumulate_bare(state, cfg.chi, delta, plan.t_signal)
    state = _apply_named_rotation(state, "from_equator")
    out.append(("encoded", state))

    if mode is SimulationMode.FULL_DRIVE:
        u_read = _period_propagator(system, base.with_(alpha=readout_alpha),
                                    cfg.steps_per_period)
        u_read = np.linalg.matrix_power(u_read, plan.periods_entangle)
        state = StateVector(system, u_read @ state.amplitudes)
    elif mode is SimulationMode.EFFECTIVE:
        untwist = floquet.h_readout_eff(base, system).hamiltonian.matrix * prep_sign
        state = dynamics.evolve_static(SpinOperator(untwist, kind="observable"),
                                       plan.t_readout, state)
    else:
        state = accumulate_bare(state, cfg.chi, 0.0, plan.t_readout)
    out.append(("readout", state))

    state = _apply_named_rotation(state, "readout")
    out.append(("final", state))
    return out


def _full_stage_moments(cfg: FullStageConfig, delta: float) -> Tuple[float, float]:
    final = full_stage_states(cfg, delta=delta)[-1][1]
    jz = final.system.jz
    return expectation(final, jz), math.sqrt(variance(final, jz))


def run_full_stage_protocol(cfg: FullStageConfig) -> metrology.PrecisionResult:
    """Precision of the complete prepare/accumulate/echo sequence."""
    plan = plan_full_stage(cfg)
    meta = {"pipeline": "full-stage", "mode": plan.mode.value,
            "n_particles": cfg.n_particles, "chi": cfg.chi,
            "t_signal": plan.t_signal, "t_signal_requested": cfg.t_signal,
            "t_entangle": plan.t_entangle,
            "t_entangle_requested": plan.requested_t_entangle}
    return metrology.estimate_precision(
        lambda d: _full_stage_moments(cfg, d), cfg.delta, cfg.n_particles,
        plan.t_signal, fd_step=cfg.fd_step, metadata=meta)


def full_stage_jz_distribution(cfg: FullStageConfig) -> Tuple[np.ndarray, np.ndarray]:
    """(outcomes m, probabilities) of the final Jz measurement."""
    final = full_stage_states(cfg)[-1][1]
    return final.system.m_values.copy(), final.probabilities


# ---------------------------------------------------------------------------
# operator identity: signal encoding between the frame rotations

def encode_axis_check(t_signal: float, p: floquet.DriveParams,
                      system: SpinSystem) -> Tuple[SpinOperator, SpinOperator]:
    """Both sides of U_R^dag exp(-i H_signal t) U_R = exp(-i delta_eff J_diag t).

    J_diag = (Jx + Jy)/sqrt(2); the identity certifies that the equatorial
    rotations turn the Jz signal phase into encoding along the diagonal
    in-plane axis.  Raises if the two unitaries differ beyond 1e-10.
    """
    model = floquet.h_signal_eff(p, system)
    u_r = np.eye(system.dim, dtype=complex)
    for axis, angle in _ROTATIONS["to_equator"]:
        u_r = system.rotation_matrix(axis, angle) @ u_r
    phases = np.diag(np.exp(-1j * model.delta_eff * system.m_values * t_signal))
    lhs = u_r.conj().T @ phases @ u_r
    j_diag = (system.axis_matrix("x") + system.axis_matrix("y")) / math.sqrt(2.0)
    rhs = dynamics.propagator_static(model.delta_eff * j_diag, t_signal).matrix
    diff = np.abs(lhs - rhs).max()
    if diff > 1e-10:
        raise ConditionViolatedError(
            f"encoding-axis identity violated: max deviation {diff:.3e}", actual=diff)
    return SpinOperator(lhs, kind="unitary"), SpinOperator(rhs, kind="unitary")


# ---------------------------------------------------------------------------
# plain Ramsey reference (coherent input, no twisting anywhere)

def run_plain_ramsey(n_particles: int, delta: float, t_signal: float,
                     fd_step: Optional[float] = None) -> metrology.PrecisionResult:
    """Coherent-state Ramsey: free phase accumulation and a pi/2 readout.

    Saturates the SQL convention delta_omega0 = 1/(sqrt(N) t_signal) exactly.
    """
    system = SpinSystem(n_particles)
    input_state = coherent_state(system, np.pi / 2.0, 0.0)
    jz = system.jz

    def measure(d: float) -> Tuple[float, float]:
        phases = np.exp(-1j * d * system.m_values * t_signal)
        state = StateVector(system, phases * input_state.amplitudes)
        state = rotate(state, "x", np.pi / 2.0)
        return expectation(state, jz), math.sqrt(variance(state, jz))

    return metrology.estimate_precision(measure, delta, n_particles, t_signal,
                                        fd_step=fd_step,
                                        metadata={"pipeline": "plain-ramsey"})
