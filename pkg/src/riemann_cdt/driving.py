"""Driving field and accumulated phase over one period.

The drive is built from the kernel phase G(u) = arccos(k(u) cos(E u / 2)),
u in [0, pi/2], where k is the kernel normalized to k(0) = 1. Its derivative
R(u) = G'(u) is the driving pulse. One period of length 2 pi joins four copies:

    segment 1  [0, pi/2]       f(t) = R(pi/2 - t)
    segment 2  [pi/2, pi]      f(t) = f(pi - t)
    segment 3,4 [pi, 2 pi]     f(t) = -f(2 pi - t)

so that, with F(t) = int_0^t f,

    F(t) = G(pi/2) - G(pi/2 - t)   on segment 1
    F(t) = G(pi/2) + G(t - pi/2)   on segment 2
    F(t) = F(2 pi - t)             on segments 3 and 4.

Scale factor Omega compresses each pulse around its centre (pi/2 and 3 pi/2)
by Omega and multiplies its height by Omega while the period stays 2 pi;
outside the compressed pulses the field is zero and F is flat.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import (
    DEFAULT_CONFIG,
    KernelConfig,
    phi,
    phi0,
    phi_prime,
    polya_kernel,
    polya_kernel_log_derivative,
)

PERIOD = 2.0 * math.pi
HALF_PI = 0.5 * math.pi
CLAMP_TOL = 1e-12
SINGULAR_WINDOW = 1e-6


class Target(str, enum.Enum):
    RIEMANN = "riemann"
    POLYA = "polya"

    @classmethod
    def parse(cls, value) -> "Target":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown target {value!r}; expected 'riemann' or 'polya'") from None


class DrivingError(ArithmeticError):
    """The arccos argument left [-1, 1] by more than roundoff."""


@dataclass(frozen=True)
class DrivingSpec:
    target: Target
    E: float
    omega_scale: float = 8.0
    kernel_cfg: KernelConfig = DEFAULT_CONFIG

    def __post_init__(self):
        object.__setattr__(self, "target", Target.parse(self.target))
        if not math.isfinite(self.E) or self.E < 0:
            raise ValueError(f"E must be finite and >= 0, got {self.E}")
        if not (self.omega_scale >= 1 and math.isfinite(self.omega_scale)):
            raise ValueError(f"omega_scale must be >= 1, got {self.omega_scale}")


def normalized_kernel(target, t, cfg: KernelConfig = DEFAULT_CONFIG):
    target = Target.parse(target)
    if target is Target.RIEMANN:
        return np.asarray(phi(t, cfg)) / phi0(cfg.series_terms)
    return np.asarray(polya_kernel(t)) / polya_kernel(0.0)


def arccos_argument(target, E: float, t, cfg: KernelConfig = DEFAULT_CONFIG) -> np.ndarray:
    """k(t) cos(E t / 2), the quantity whose arccos is the phase."""
    t = np.asarray(t, dtype=float)
    return normalized_kernel(target, t, cfg) * np.cos(0.5 * E * t)


def base_arccos_phase(target, E: float, t, cfg: KernelConfig = DEFAULT_CONFIG):
    """G(t) = arccos(k(t) cos(E t / 2)) for t in [0, pi/2]."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(arr > HALF_PI + 1e-12):
        raise ValueError("base phase is defined on [0, pi/2]")
    g = arccos_argument(target, E, np.clip(arr, 0.0, HALF_PI), cfg)
    excess = np.abs(g) - 1.0
    if np.any(excess > CLAMP_TOL):
        raise DrivingError(f"|arccos argument| exceeds 1 by {excess.max():.3e}")
    val = np.arccos(np.clip(g, -1.0, 1.0))
    return float(val) if np.ndim(t) == 0 else val


def base_pulse(target, E: float, u, cfg: KernelConfig = DEFAULT_CONFIG) -> np.ndarray:
    """R(u) = G'(u) = -g'(u) / sqrt(1 - g(u)^2).

    Riemann: g' = (Phi' cos - (E/2) Phi sin) / Phi(0).
    Polya:   g' = k cos (a tanh(a u) - 2 pi sinh u) - (E/2) k sin, which is the
    closed form with the tan(E u / 2) factor multiplied through.
    u = 0 is a 0/0 point; callers keep u away from it.
    """
    target = Target.parse(target)
    u = np.asarray(u, dtype=float)
    half = 0.5 * E
    cos_e, sin_e = np.cos(half * u), np.sin(half * u)
    if target is Target.RIEMANN:
        p0 = phi0(cfg.series_terms)
        k = np.asarray(phi(u, cfg)) / p0
        dk = np.asarray(phi_prime(u, cfg)) / p0
    else:
        k = np.asarray(polya_kernel(u)) / polya_kernel(0.0)
        dk = k * np.asarray(polya_kernel_log_derivative(u))
    g = k * cos_e
    dg = dk * cos_e - half * k * sin_e
    return -dg / np.sqrt(np.clip(1.0 - g * g, 0.0, None))


def compress(t, omega: float) -> np.ndarray:
    """Map time in the rescaled period onto the base period.

    Reflects [pi, 2 pi] onto [0, pi] (F is symmetric about pi), then
    stretches the distance to the pulse centre pi/2 by omega, saturating at
    the segment ends.
    """
    t = np.asarray(t, dtype=float)
    s = np.where(t > math.pi, PERIOD - t, t)
    return HALF_PI + np.clip(omega * (s - HALF_PI), -HALF_PI, HALF_PI)


@dataclass(frozen=True)
class FieldSamples:
    t: np.ndarray
    f: np.ndarray
    singular: np.ndarray


@dataclass(frozen=True)
class PhaseProfile:
    """Closed-form accumulated phase for one driving specification."""

    spec: DrivingSpec
    period: float = PERIOD
    _g_half: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g_half = base_arccos_phase(self.spec.target, self.spec.E, HALF_PI, self.spec.kernel_cfg)
        object.__setattr__(self, "_g_half", g_half)

    @classmethod
    def build(cls, target, E: float, omega_scale: float = 8.0, kernel_cfg: KernelConfig = DEFAULT_CONFIG):
        return cls(DrivingSpec(Target.parse(target), float(E), float(omega_scale), kernel_cfg))

    @property
    def omega(self) -> float:
        return self.spec.omega_scale

    @property
    def g_half(self) -> float:
        """G(pi/2); F equals this at the first pulse centre."""
        return self._g_half

    def _G(self, u):
        return base_arccos_phase(self.spec.target, self.spec.E, u, self.spec.kernel_cfg)

    def full_period_phase(self, t):
        """F(t) on [0, 2 pi] for the uncompressed (Omega = 1) drive."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0) or np.any(arr > PERIOD):
            raise ValueError("full_period_phase expects t in [0, 2 pi]; reduce mod 2 pi first")
        s = np.where(arr > math.pi, PERIOD - arr, arr)
        first = s <= HALF_PI
        u = np.where(first, HALF_PI - s, s - HALF_PI)
        g = self._G(np.clip(u, 0.0, HALF_PI))
        val = np.where(first, self._g_half - g, self._g_half + g)
        return float(val) if np.ndim(t) == 0 else val

    def rescaled_phase(self, t, omega: float | None = None):
        """F_Omega(t) for any real t (reduced mod 2 pi)."""
        omega = self.omega if omega is None else float(omega)
        if omega < 1:
            raise ValueError(f"omega must be >= 1, got {omega}")
        arr = np.mod(np.asarray(t, dtype=float), PERIOD)
        val = self.full_period_phase(compress(arr, omega))
        return float(val) if np.ndim(t) == 0 else val

    def field(self, t, omega: float | None = None) -> FieldSamples:
        """Driving field f_Omega(t) = dF_Omega/dt from the closed-form pulse.

        At a pulse centre the closed form is 0/0 (g -> 1). The limit is
        finite but cancellation ruins it, so points closer than
        SINGULAR_WINDOW are evaluated at the window edge and flagged.
        """
        omega = self.omega if omega is None else float(omega)
        if omega < 1:
            raise ValueError(f"omega must be >= 1, got {omega}")
        t = np.atleast_1d(np.asarray(t, dtype=float))
        tm = np.mod(t, PERIOD)
        s = np.where(tm > math.pi, PERIOD - tm, tm)
        sign = np.where(tm > math.pi, -1.0, 1.0)
        u = omega * np.abs(s - HALF_PI)
        inside = u <= HALF_PI
        singular = inside & (u < SINGULAR_WINDOW)
        u_eval = np.clip(u, SINGULAR_WINDOW, HALF_PI)
        pulse = base_pulse(self.spec.target, self.spec.E, u_eval, self.spec.kernel_cfg)
        f = np.where(inside, sign * omega * pulse, 0.0)
        return FieldSamples(t=t, f=f, singular=singular)


def full_period_phase(profile: PhaseProfile, t):
    return profile.full_period_phase(t)


def rescaled_phase(profile: PhaseProfile, t, omega: float | None = None):
    return profile.rescaled_phase(t, omega)


def sample_field(profile: PhaseProfile, omega: float | None = None, n_samples: int = 1001) -> FieldSamples:
    """Field on a uniform grid over [0, 2 pi], for plotting and inspection only."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    t = np.linspace(0.0, PERIOD, int(n_samples))
    return profile.field(t, omega)


class NullProfile:
    """f = 0: the undriven qubit, used as a reference."""

    omega = 1.0
    g_half = 0.0

    def rescaled_phase(self, t, omega: float | None = None):
        arr = np.zeros_like(np.asarray(t, dtype=float))
        return float(arr) if np.ndim(t) == 0 else arr
