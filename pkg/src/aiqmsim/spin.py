"""Exact collective-spin algebra on the Dicke basis.

An ensemble of N two-level particles in the symmetric subspace is described
by a total spin J = N/2 acting on the (N+1)-dimensional Dicke basis
|J, m>, ordered here with m = +J down to -J.  This module provides the
collective operators Jx, Jy, Jz, spin coherent states, rotations, the
twisted-then-rotated squeezed input state used by the metrology protocols,
moment evaluation, and Husimi-Q maps for visualization.
"""

from __future__ import annotations

import dataclasses
from functools import cached_property
from typing import Iterable

import numpy as np
from scipy.special import gammaln

from .errors import ContractViolationError, InvalidSystemError

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
NORM_TOL = 1e-12

_AXES = ("x", "y", "z")


@dataclasses.dataclass(frozen=True)
class SpinOperator:
    """Dense operator on the Dicke basis.

    ``kind`` declares the contract: observables must be Hermitian within
    1e-12 max-norm, unitaries must satisfy U^dag U = 1 within 1e-10.
    """

    matrix: np.ndarray
    kind: str = "general"

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ContractViolationError(f"operator matrix must be square, got {mat.shape}")
        if self.kind not in ("observable", "unitary", "general"):
            raise ContractViolationError(f"unknown operator kind {self.kind!r}")
        if self.kind == "observable":
            dev = np.abs(mat - mat.conj().T).max()
            if dev > HERMITIAN_TOL:
                raise ContractViolationError(
                    f"observable is not Hermitian (max deviation {dev:.3e})")
        elif self.kind == "unitary":
            dev = np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])).max()
            if dev > UNITARY_TOL:
                raise ContractViolationError(
                    f"operator is not unitary (max deviation {dev:.3e})")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "SpinOperator":
        return SpinOperator(self.matrix.conj().T, kind=self.kind)


class SpinSystem:
    """N symmetric two-level particles: J = N/2, Hilbert dimension N+1."""

    def __init__(self, n_particles: int):
        if int(n_particles) != n_particles or n_particles < 1:
            raise InvalidSystemError(
                f"need a positive integer particle number, got {n_particles!r}")
        self.n_particles = int(n_particles)
        self.total_spin = self.n_particles / 2.0
        self.dim = self.n_particles + 1
        # m runs from +J down to -J so the stretched "up" state is index 0
        self.m_values = self.total_spin - np.arange(self.dim, dtype=float)
        self.m_values.flags.writeable = False

    def __repr__(self):
        return f"SpinSystem(n_particles={self.n_particles})"

    @cached_property
    def _raw(self) -> dict:
        j = self.total_spin
        m = self.m_values
        jplus = np.zeros((self.dim, self.dim), dtype=complex)
        # <J, m+1| J+ |J, m> = sqrt(J(J+1) - m(m+1)); m+1 sits one row above m
        for i in range(1, self.dim):
            jplus[i - 1, i] = np.sqrt(j * (j + 1) - m[i] * (m[i] + 1))
        jx = (jplus + jplus.conj().T) / 2.0
        jy = (jplus - jplus.conj().T) / 2.0j
        jz = np.diag(m).astype(complex)
        for mat in (jx, jy, jz):
            mat.flags.writeable = False
        return {"x": jx, "y": jy, "z": jz}

    @property
    def jx(self) -> SpinOperator:
        return SpinOperator(self._raw["x"], kind="observable")

    @property
    def jy(self) -> SpinOperator:
        return SpinOperator(self._raw["y"], kind="observable")

    @property
    def jz(self) -> SpinOperator:
        return SpinOperator(self._raw["z"], kind="observable")

    def axis_matrix(self, axis: str) -> np.ndarray:
        if axis not in _AXES:
            raise ValueError(f"axis must be one of {_AXES}, got {axis!r}")
        return self._raw[axis]

    @cached_property
    def _axis_eigh(self) -> dict:
        out = {}
        for axis in ("x", "y"):
            w, v = np.linalg.eigh(self._raw[axis])
            out[axis] = (w, v)
        return out

    def rotation_matrix(self, axis: str, angle: float) -> np.ndarray:
        """exp(-i * J_axis * angle) as a raw ndarray."""
        if axis == "z":
            return np.diag(np.exp(-1j * angle * self.m_values))
        if axis not in _AXES:
            raise ValueError(f"axis must be one of {_AXES}, got {axis!r}")
        w, v = self._axis_eigh[axis]
        return (v * np.exp(-1j * w * angle)) @ v.conj().T


def build_spin_operators(system: SpinSystem):
    """Return the cached (Jx, Jy, Jz) trio for ``system``."""
    return system.jx, system.jy, system.jz


@dataclasses.dataclass(frozen=True)
class StateVector:
    """Normalized amplitude vector over |J, m>, m = +J .. -J."""

    system: SpinSystem
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).copy()
        if amp.shape != (self.system.dim,):
            raise ContractViolationError(
                f"amplitude vector has shape {amp.shape}, expected ({self.system.dim},)")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > 1e-9:
            raise ContractViolationError(f"state norm {norm!r} is not 1")
        if abs(norm - 1.0) > NORM_TOL:
            amp = amp / norm
        amp.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def dicke_state(system: SpinSystem, m: float) -> StateVector:
    """The basis state |J, m>."""
    idx = int(round(system.total_spin - m))
    if not 0 <= idx < system.dim or abs((system.total_spin - m) - idx) > 1e-12:
        raise ValueError(f"m={m} is not a Dicke label for J={system.total_spin}")
    amp = np.zeros(system.dim, dtype=complex)
    amp[idx] = 1.0
    return StateVector(system, amp)


def _coherent_amplitude_table(system: SpinSystem, thetas: np.ndarray) -> np.ndarray:
    """Rows of |<J,m|exp(-i theta Jy)|J,J>| amplitudes for each theta.

    Closed form: binom(2J, J-m)^(1/2) cos(theta/2)^(J+m) sin(theta/2)^(J-m),
    evaluated in log space so N of a few hundred stays finite.
    """
    j = system.total_spin
    m = system.m_values
    kplus = j + m   # exponent of cos(theta/2); integers >= 0
    kminus = j - m  # exponent of sin(theta/2)
    ln_binom = 0.5 * (gammaln(2 * j + 1) - gammaln(kplus + 1) - gammaln(kminus + 1))
    c = np.cos(np.asarray(thetas, dtype=float) / 2.0)[:, None]
    s = np.sin(np.asarray(thetas, dtype=float) / 2.0)[:, None]
    sign = np.where(c < 0, -1.0, 1.0) ** kplus * np.where(s < 0, -1.0, 1.0) ** kminus
    with np.errstate(divide="ignore", invalid="ignore"):
        # 0 * log(0) terms are legitimate zeros in the exponent, not NaNs
        term_c = np.where(kplus[None, :] == 0, 0.0, kplus[None, :] * np.log(np.abs(c)))
        term_s = np.where(kminus[None, :] == 0, 0.0, kminus[None, :] * np.log(np.abs(s)))
    amp = sign * np.exp(ln_binom[None, :] + term_c + term_s)
    return np.where(np.isfinite(amp), amp, 0.0)


def coherent_state(system: SpinSystem, theta: float, phi: float) -> StateVector:
    """Spin coherent state exp(-i phi Jz) exp(-i theta Jy) |J, +J>."""
    amp = _coherent_amplitude_table(system, np.array([theta]))[0].astype(complex)
    amp = amp * np.exp(-1j * system.m_values * phi)
    return StateVector(system, amp)


def rotate(state: StateVector, axis: str, angle: float) -> StateVector:
    """Apply exp(-i J_axis angle) to the state."""
    system = state.system
    if axis == "z":
        amp = np.exp(-1j * angle * system.m_values) * state.amplitudes
    else:
        amp = system.rotation_matrix(axis, angle) @ state.amplitudes
    return StateVector(system, amp)


def _observable_matrix(op) -> np.ndarray:
    if isinstance(op, SpinOperator):
        mat = op.matrix
        if op.kind != "observable":
            dev = np.abs(mat - mat.conj().T).max()
            if dev > HERMITIAN_TOL:
                raise ContractViolationError(
                    f"expectation requires a Hermitian operator (deviation {dev:.3e})")
        return mat
    mat = np.asarray(op, dtype=complex)
    dev = np.abs(mat - mat.conj().T).max()
    if dev > HERMITIAN_TOL:
        raise ContractViolationError(
            f"expectation requires a Hermitian operator (deviation {dev:.3e})")
    return mat


def expectation(state: StateVector, op) -> float:
    """<psi|O|psi> for Hermitian O; the imaginary residue must be negligible."""
    mat = _observable_matrix(op)
    val = np.vdot(state.amplitudes, mat @ state.amplitudes)
    if abs(val.imag) > 1e-10 * (1.0 + abs(val.real)):
        raise ContractViolationError(
            f"expectation value has imaginary residue {val.imag:.3e}")
    return float(val.real)


def variance(state: StateVector, op) -> float:
    """<O^2> - <O>^2, clamped against harmless negative rounding residue."""
    mat = _observable_matrix(op)
    vec = mat @ state.amplitudes
    mean = np.vdot(state.amplitudes, vec).real
    second = np.vdot(vec, vec).real
    var = second - mean ** 2
    if var < -1e-10:
        raise ContractViolationError(f"variance {var!r} is negative beyond tolerance")
    return float(max(var, 0.0))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2; global phases never enter comparisons."""
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


@dataclasses.dataclass(frozen=True)
class SqueezedInputParams:
    """Closed-form quantities for the twisted-then-rotated input state.

    For twisting phase chi*t_en the optimal quadrature of the one-axis
    twisted state sits at angle gamma from the z axis, with
    a = 1 - cos^(N-2)(2 chi t_en), b = 4 cos^(N-2)(chi t_en) sin(chi t_en)
    and gamma = arctan(b/a)/2.  Rotating by pi/2 - gamma about x puts the
    squeezed quadrature onto Jy.
    """

    n_particles: int
    chi_t_en: float
    a: float
    b: float
    gamma: float

    @classmethod
    def for_system(cls, system: SpinSystem, chi_t_en: float) -> "SqueezedInputParams":
        if system.n_particles < 3:
            raise InvalidSystemError(
                f"squeezed input needs N >= 3, got N={system.n_particles}")
        if chi_t_en <= 0:
            raise ValueError(f"chi_t_en must be positive, got {chi_t_en}")
        n = system.n_particles
        a = 1.0 - np.cos(2.0 * chi_t_en) ** (n - 2)
        b = 4.0 * np.cos(chi_t_en) ** (n - 2) * np.sin(chi_t_en)
        gamma = 0.5 * np.arctan2(b, a)
        return cls(n_particles=n, chi_t_en=chi_t_en, a=float(a), b=float(b),
                   gamma=float(gamma))

    @property
    def rotation_angle(self) -> float:
        """Angle of the x rotation that aligns the squeezed quadrature with Jy."""
        return np.pi / 2.0 - self.gamma


def oat_squeezed_input(system: SpinSystem, chi_t_en: float) -> StateVector:
    """Spin-squeezed input: twist |psi_x> by exp(-i chi Jz^2 t_en), then rotate.

    The x rotation angle pi/2 - gamma orients the minimal-variance quadrature
    of the twisted state along Jy (cross-checked against a brute-force scan
    in the test suite), so the returned state has Var(Jy) < N/4.
    """
    params = SqueezedInputParams.for_system(system, chi_t_en)
    psi = coherent_state(system, np.pi / 2.0, 0.0)
    amp = np.exp(-1j * system.m_values ** 2 * chi_t_en) * psi.amplitudes
    twisted = StateVector(system, amp)
    return rotate(twisted, "x", params.rotation_angle)


@dataclasses.dataclass(frozen=True)
class HusimiMap:
    """Q(theta, phi) = |<theta, phi|psi>|^2 sampled on a spherical grid."""

    theta: np.ndarray   # polar samples, [0, pi], inclusive
    phi: np.ndarray     # azimuthal samples, [0, 2 pi), periodic
    values: np.ndarray  # shape (len(theta), len(phi))

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.min() < -1e-14 or vals.max() > 1.0 + 1e-10:
            raise ContractViolationError(
                f"Husimi values outside [0, 1]: min={vals.min()}, max={vals.max()}")

    def normalization_integral(self, total_spin: float) -> float:
        """(2J+1)/(4 pi) * Int Q dOmega; equals 1 for a normalized state."""
        dphi = 2.0 * np.pi / len(self.phi)
        ring = self.values.sum(axis=1) * dphi * np.sin(self.theta)
        return float(np.trapezoid(ring, self.theta) * (2 * total_spin + 1) / (4 * np.pi))

    def rows(self) -> Iterable[tuple]:
        for i, th in enumerate(self.theta):
            for k, ph in enumerate(self.phi):
                yield (float(th), float(ph), float(self.values[i, k]))


def husimi_q(state: StateVector, n_theta: int = 121, n_phi: int = 241) -> HusimiMap:
    """Sample the Husimi-Q function of ``state`` on an n_theta x n_phi grid."""
    if n_theta < 2 or n_phi < 2:
        raise ValueError("need at least 2 samples per angle")
    system = state.system
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    table = _coherent_amplitude_table(system, theta)          # (n_theta, dim)
    phases = np.exp(1j * system.m_values[None, :] * phi[:, None])  # conj of e^{-im phi}
    weighted = phases * state.amplitudes[None, :]              # (n_phi, dim)
    overlaps = table @ weighted.T                              # (n_theta, n_phi)
    return HusimiMap(theta=theta, phi=phi, values=np.abs(overlaps) ** 2)
