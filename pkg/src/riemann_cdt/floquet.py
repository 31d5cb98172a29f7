"""Stroboscopic dynamics of the driven qubit.

The lab Hamiltonian is H(t) = -J sx + (J f(t) / 2) sz with hbar = 1 and
dimensionless time. In the interaction frame exp(-i F(t) sz / 2) the sz term
drops out and only the bounded phase F appears:

    H_rot(t) = -J (cos F(t) sx - sin F(t) sy).

F vanishes at every multiple of the period, so at stroboscopic times the
two frames coincide and probabilities need no back-transformation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .driving import PERIOD

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
# measurement bases |0>, |+> = (|0>+|1>)/sqrt2, |i> = (|0>+i|1>)/sqrt2
BASES = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "+": np.array([_INV_SQRT2, _INV_SQRT2], dtype=complex),
    "i": np.array([_INV_SQRT2, 1j * _INV_SQRT2], dtype=complex),
}


@dataclass(frozen=True)
class QubitState:
    amp0: complex
    amp1: complex

    def __post_init__(self):
        norm = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state is not normalized (norm^2 = {norm})")

    @classmethod
    def ground(cls) -> "QubitState":
        return cls(1.0 + 0j, 0j)

    @classmethod
    def from_vector(cls, vec) -> "QubitState":
        v = np.asarray(vec, dtype=complex)
        return cls(complex(v[0]), complex(v[1]))

    def vector(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=complex)


@dataclass(frozen=True)
class SimConfig:
    """J in units of the dimensionless time; the lab value is reporting-only."""

    J: float = 1.0
    steps_per_subperiod: int = 1024
    periods: int = 20

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError("J must be positive")
        if self.steps_per_subperiod < 64:
            raise ValueError("steps_per_subperiod must be >= 64")
        if self.periods < 1:
            raise ValueError("periods must be >= 1")


@dataclass(frozen=True)
class Monodromy:
    """One-period propagator u = [[alpha, beta], [-conj(beta), conj(alpha)]]."""

    alpha: complex
    beta: complex
    period: float = PERIOD

    @property
    def u(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        return np.array([[a, b], [-b.conjugate(), a.conjugate()]], dtype=complex)

    @property
    def rotation_angle(self) -> float:
        """theta in [0, pi] with eigenvalues exp(-+ i theta).

        sin(theta) is taken from the traceless part rather than from
        sqrt(1 - cos^2) to keep relative precision near a crossing.
        """
        a, b = self.alpha, self.beta
        return math.atan2(math.hypot(a.imag, abs(b)), a.real)

    @property
    def quasi_pair(self) -> tuple[float, float]:
        """(eps_plus, eps_minus) reduced to (-omega/2, omega/2]."""
        omega = 2.0 * math.pi / self.period
        eps = self.rotation_angle / self.period
        minus = -eps if eps < 0.5 * omega else eps
        return eps, minus

    @property
    def quasi_energy(self) -> float:
        return self.quasi_pair[0]


def hamiltonian_rotated(profile, omega: float | None, t: float, J: float = 1.0) -> np.ndarray:
    F = profile.rescaled_phase(t, omega)
    return -J * (math.cos(F) * SX - math.sin(F) * SY)


def step_count(omega: float, cfg: SimConfig) -> int:
    """Steps per period: steps_per_subperiod for every unit of omega."""
    return int(cfg.steps_per_subperiod * math.ceil(omega))


def midpoint_phases(profile, omega: float | None, cfg: SimConfig) -> tuple[np.ndarray, float]:
    omega = profile.omega if omega is None else float(omega)
    n = step_count(omega, cfg)
    dt = PERIOD / n
    tm = (np.arange(n) + 0.5) * dt
    return np.ascontiguousarray(profile.rescaled_phase(tm, omega), dtype=float), dt


def propagate_period(profile, omega: float | None = None, cfg: SimConfig = SimConfig()) -> Monodromy:
    """Ordered product of midpoint exponentials over one period."""
    phases, dt = midpoint_phases(profile, omega, cfg)
    alpha, beta = kernels.step_product(phases, cfg.J, dt)
    return Monodromy(alpha, beta)


def convergence_gap(profile, omega: float | None = None, cfg: SimConfig = SimConfig()) -> float:
    """|eps_plus(steps) - eps_plus(2 steps)|, the step-doubling guard."""
    fine = SimConfig(cfg.J, 2 * cfg.steps_per_subperiod, cfg.periods)
    return abs(propagate_period(profile, omega, cfg).quasi_energy - propagate_period(profile, omega, fine).quasi_energy)


def evolve_steps(profile, omega: float | None, cfg: SimConfig, initial: QubitState, periods: int) -> np.ndarray:
    """State after ``periods`` periods, stepping through every time step.

    Independent of the monodromy path; used to cross-check it.
    """
    phases, dt = midpoint_phases(profile, omega, cfg)
    psi = initial.vector()
    for _ in range(periods):
        psi = kernels.apply_steps(phases, cfg.J, dt, psi)
    return psi


def state_trajectory(mono: Monodromy, initial: QubitState, periods: int) -> np.ndarray:
    """Rows psi(m T) for m = 1..periods."""
    u = mono.u
    out = np.empty((periods, 2), dtype=complex)
    psi = initial.vector()
    for m in range(periods):
        psi = u @ psi
        out[m] = psi
    return out


def basis_probabilities(states: np.ndarray) -> np.ndarray:
    """Columns P0, P+, Pi for each row of ``states``."""
    states = np.atleast_2d(states)
    return np.stack([np.abs(states @ BASES[k].conj()) ** 2 for k in ("0", "+", "i")], axis=-1)


def stroboscopic_probabilities(
    profile,
    omega: float | None = None,
    cfg: SimConfig = SimConfig(),
    initial: QubitState | None = None,
    mono: Monodromy | None = None,
) -> np.ndarray:
    """Array of rows (m, P0, P+, Pi) for m = 1..cfg.periods."""
    initial = QubitState.ground() if initial is None else initial
    mono = propagate_period(profile, omega, cfg) if mono is None else mono
    probs = basis_probabilities(state_trajectory(mono, initial, cfg.periods))
    m = np.arange(1, cfg.periods + 1, dtype=float)
    return np.column_stack([m, probs])


@dataclass(frozen=True)
class QuasiEnergyFit:
    epsilon: float
    residual: float
    reliable: bool
    reason: str = ""


def quasi_energy_fit(series, period: float = PERIOD, max_residual: float = 0.02) -> QuasiEnergyFit:
    """Least-squares fit of P+(m) = 1/2 - sin(2 eps m T) / 2.

    The model is single-valued in eps only while |2 eps m T| < pi/2 over the
    window; fits outside that window, or whose rms residual exceeds
    ``max_residual``, are flagged unreliable.
    """
    from scipy.optimize import least_squares

    data = np.asarray(series, dtype=float)
    if data.ndim != 2 or data.shape[1] < 2 or len(data) < 5:
        raise ValueError("need at least 5 (m, P+) points")
    m, p = data[:, 0], data[:, 1]
    tm = m * period
    y = 0.5 - p

    def resid(x):
        return 0.5 * np.sin(2.0 * x[0] * tm) - y

    # small-angle start: 1/2 - P ~ eps m T
    guess = float(np.dot(tm, y) / np.dot(tm, tm))
    sol = least_squares(resid, [guess], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    eps = float(sol.x[0])
    residual = float(np.sqrt(np.mean(sol.fun**2)))
    reasons = []
    if not sol.success:
        reasons.append(f"optimizer: {sol.message}")
    if abs(2.0 * eps * tm.max()) >= 0.5 * math.pi:
        reasons.append("oscillation leaves the monotone window")
    if residual > max_residual:
        reasons.append(f"rms residual {residual:.3g} exceeds {max_residual:g}")
    return QuasiEnergyFit(eps, residual, not reasons, "; ".join(reasons))
