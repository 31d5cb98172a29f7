"""Kernels of the Riemann and Polya integral transforms, and quadrature oracles.

The Riemann kernel is the theta-series

    Phi(t) = 2 pi e^{5t/4} sum_n (2 pi e^t n^2 - 3) n^2 exp(-pi n^2 e^t),

and Xi(E) = int_0^inf Phi(t) cos(E t / 2) dt vanishes exactly at the ordinates
of the non-trivial zeta zeros. Polya's approximation replaces Phi by
alpha cosh(9t/4) exp(-2 pi cosh t). Both transforms are evaluated here by
composite Gauss-Legendre quadrature; they serve as the ground truth that the
Floquet simulation is checked against.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import brentq

POLYA_A = 9.0 / 4.0
POLYA_X = 2.0 * math.pi
POLYA_ALPHA = math.exp(2.0 * math.pi)  # 1 / polya_kernel(0)

# exp(-y) is exactly 0.0 in double precision beyond this
_UNDERFLOW = 746.0
_GL_ORDER = 20
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)
_MAX_PANELS = 1 << 14


class QuadratureError(ArithmeticError):
    """Quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, best_estimate: float, est_error: float):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.est_error = est_error


@dataclass(frozen=True)
class KernelConfig:
    """Series truncation and quadrature settings.

    ``upper_cutoff`` is where the oracle transforms are cut. The driving
    construction always truncates its kernel at pi/2 regardless of this value.
    """

    series_terms: int = 100
    quad_abs_tol: float = 1e-12
    quad_rel_tol: float = 1e-10
    upper_cutoff: float = 6.0

    def __post_init__(self):
        if int(self.series_terms) != self.series_terms or self.series_terms < 1:
            raise ValueError(f"series_terms must be a positive integer, got {self.series_terms}")
        if self.quad_abs_tol < 0 or self.quad_rel_tol < 0:
            raise ValueError("quadrature tolerances must be non-negative")
        if not (self.upper_cutoff > 0 and math.isfinite(self.upper_cutoff)):
            raise ValueError(f"upper_cutoff must be positive and finite, got {self.upper_cutoff}")


DEFAULT_CONFIG = KernelConfig()


@dataclass(frozen=True)
class OracleValue:
    value: float
    est_error: float

    def __float__(self) -> float:
        return self.value


def _as_time(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("time must be finite")
    if np.any(arr < 0):
        raise ValueError("time must be non-negative")
    return arr


def _scalar_or_array(arr: np.ndarray, like):
    return float(arr) if np.ndim(like) == 0 else arr


def _active_terms(t_min: float, series_terms: int) -> int:
    # terms with pi n^2 e^t beyond the underflow limit are exactly zero
    n_max = math.isqrt(int(_UNDERFLOW / (math.pi * math.exp(t_min)))) + 2
    return max(1, min(series_terms, n_max))


def _phi_parts(t: np.ndarray, series_terms: int):
    n_terms = _active_terms(float(t.min()) if t.size else 0.0, series_terms)
    n2 = np.arange(1, n_terms + 1, dtype=float) ** 2
    y = math.pi * n2 * np.exp(t)[..., None]
    decay = n2 * np.exp(-y)
    return y, decay, 2.0 * math.pi * np.exp(1.25 * t)


def phi(t, cfg: KernelConfig = DEFAULT_CONFIG):
    """Truncated Riemann kernel Phi(t) (``cfg.series_terms`` terms)."""
    arr = _as_time(t)
    y, decay, prefactor = _phi_parts(np.atleast_1d(arr), cfg.series_terms)
    val = prefactor * np.sum((2.0 * y - 3.0) * decay, axis=-1)
    return _scalar_or_array(val.reshape(arr.shape), t)


def phi_prime(t, cfg: KernelConfig = DEFAULT_CONFIG):
    """Term-by-term derivative of the truncated kernel.

    With y = pi n^2 e^t each summand differentiates to
    n^2 e^{-y} (-2 y^2 + 7.5 y - 3.75) under the common prefactor.
    """
    arr = _as_time(t)
    y, decay, prefactor = _phi_parts(np.atleast_1d(arr), cfg.series_terms)
    val = prefactor * np.sum((-2.0 * y * y + 7.5 * y - 3.75) * decay, axis=-1)
    return _scalar_or_array(val.reshape(arr.shape), t)


def phi_tail_bound(t: float, cfg: KernelConfig = DEFAULT_CONFIG) -> float:
    """Upper bound on the omitted terms n > series_terms at time t.

    The summands are positive and the ratio of consecutive ones is below
    1/2 for n >= 1, so twice the first omitted term bounds the tail.
    """
    n = cfg.series_terms + 1
    y = math.pi * n * n * math.exp(t)
    if y > _UNDERFLOW:
        return 0.0
    return 2.0 * 2.0 * math.pi * math.exp(1.25 * t) * n * n * (2.0 * y - 3.0) * math.exp(-y)


@lru_cache(maxsize=32)
def phi0(series_terms: int = 100) -> float:
    return phi(0.0, KernelConfig(series_terms=series_terms))


def _log_cosh(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


def polya_kernel(t):
    """cosh(9t/4) exp(-2 pi cosh t), unnormalized."""
    arr = _as_time(t)
    with np.errstate(over="ignore"):
        val = np.exp(_log_cosh(POLYA_A * arr) - POLYA_X * np.cosh(arr))
    return _scalar_or_array(val, t)


def polya_kernel_log_derivative(t):
    """d/dt log polya_kernel = a tanh(a t) - 2 pi sinh t."""
    arr = _as_time(t)
    val = POLYA_A * np.tanh(POLYA_A * arr) - POLYA_X * np.sinh(arr)
    return _scalar_or_array(val, t)


def gauss_legendre(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    abs_tol: float = 1e-12,
    rel_tol: float = 1e-10,
    panels: int = 8,
) -> tuple[float, float]:
    """Composite Gauss-Legendre with panel doubling.

    Returns (value, error estimate); the estimate is the change from the last
    doubling. ``func`` must accept an array of nodes.
    """
    if b <= a:
        return 0.0, 0.0

    def composite(m: int) -> float:
        edges = np.linspace(a, b, m + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = mid[:, None] + half[:, None] * _GL_NODES
        vals = func(nodes.ravel()).reshape(nodes.shape)
        return float(np.sum(half * (vals @ _GL_WEIGHTS)))

    prev = composite(panels)
    while True:
        panels *= 2
        cur = composite(panels)
        err = abs(cur - prev)
        if err <= max(abs_tol, rel_tol * abs(cur)):
            return cur, err
        if panels >= _MAX_PANELS:
            raise QuadratureError(
                f"no convergence on [{a}, {b}] with {panels} panels", cur, err
            )
        prev = cur


def _check_energy(E: float) -> float:
    E = float(E)
    if not math.isfinite(E):
        raise ValueError("E must be finite")
    if abs(E) > 100:
        warnings.warn(
            f"|E| = {abs(E):g} is outside the validated range |E| <= 100",
            RuntimeWarning,
            stacklevel=3,
        )
    return E


def _positive_tail(kernel: Callable[[np.ndarray], np.ndarray], start: float) -> float:
    # kernels underflow to exactly zero well within 10 time units of the cutoff
    val, err = gauss_legendre(kernel, start, start + 10.0, abs_tol=1e-300, rel_tol=1e-6)
    return val + err


def riemann_xi(E: float, cfg: KernelConfig = DEFAULT_CONFIG) -> OracleValue:
    """Xi(E) = int_0^cutoff Phi(t) cos(E t / 2) dt."""
    E = _check_energy(E)
    c = cfg.upper_cutoff
    value, qerr = gauss_legendre(
        lambda t: phi(t, cfg) * np.cos(0.5 * E * t), 0.0, c, cfg.quad_abs_tol, cfg.quad_rel_tol
    )
    tail = _positive_tail(lambda t: phi(t, cfg), c)
    series = phi_tail_bound(0.0, cfg) * c
    return OracleValue(value, qerr + tail + series)


def polya_xi_star(E: float, cfg: KernelConfig = DEFAULT_CONFIG) -> OracleValue:
    """Xi*(E) = int_0^cutoff alpha cosh(9t/4) exp(-2 pi cosh t) cos(E t / 2) dt.

    alpha = exp(2 pi), so the normalized kernel is 1 at t = 0.
    """
    E = _check_energy(E)
    c = cfg.upper_cutoff
    value, qerr = gauss_legendre(
        lambda t: POLYA_ALPHA * polya_kernel(t) * np.cos(0.5 * E * t),
        0.0,
        c,
        cfg.quad_abs_tol,
        cfg.quad_rel_tol,
    )
    tail = _positive_tail(lambda t: POLYA_ALPHA * polya_kernel(t), c)
    return OracleValue(value, qerr + tail)


def bessel_k(beta: complex, x: float, cutoff: float = 10.0, abs_tol: float = 1e-16) -> complex:
    """K_beta(x) = int_0^inf cosh(beta t) exp(-x cosh t) dt for complex order.

    cosh((a + ib) t) = cosh(a t) cos(b t) + i sinh(a t) sin(b t). The integrand
    is evaluated in log space and clamps to zero on underflow.
    """
    a, b = complex(beta).real, complex(beta).imag

    def envelope(t: np.ndarray, hyper) -> np.ndarray:
        with np.errstate(over="ignore", under="ignore"):
            log_env = a * t - x * np.cosh(t)
            return np.where(log_env > -_UNDERFLOW, hyper(a * t) * np.exp(-x * np.cosh(t)), 0.0)

    def cosh_part(t):
        return envelope(t, np.cosh) * np.cos(b * t)

    def sinh_part(t):
        return envelope(t, np.sinh) * np.sin(b * t)

    re, _ = gauss_legendre(cosh_part, 0.0, cutoff, abs_tol, 1e-13)
    im, _ = gauss_legendre(sinh_part, 0.0, cutoff, abs_tol, 1e-13)
    return complex(re, im)


def bessel_k_crosscheck(E: float) -> float:
    """4 pi^2 [K_{a+iE/2}(2 pi) + K_{a-iE/2}(2 pi)] with a = 9/4.

    The conjugate-order pair has cancelling imaginary parts, so the sum is real.
    """
    E = _check_energy(E)
    plus = bessel_k(complex(POLYA_A, 0.5 * E), POLYA_X)
    minus = bessel_k(complex(POLYA_A, -0.5 * E), POLYA_X)
    total = 4.0 * math.pi**2 * (plus + minus)
    if abs(total.imag) > 1e-12 * max(1.0, abs(total.real)):
        raise QuadratureError("conjugate Bessel orders did not cancel", total.real, abs(total.imag))
    return total.real


def find_root(func: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-10) -> float:
    """Root of a sign-changing function on [lo, hi] (Brent's bracketing method)."""

    def f(x: float) -> float:
        return float(func(x))

    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    return float(brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps))


def sign_changes(xs, ys) -> list[tuple[float, float]]:
    """Adjacent grid pairs (x_i, x_{i+1}) across which ys changes sign."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    out = []
    for i in range(len(xs) - 1):
        if ys[i] == 0.0:
            out.append((xs[i], xs[i]))
        elif ys[i] * ys[i + 1] < 0:
            out.append((xs[i], xs[i + 1]))
    if len(ys) and ys[-1] == 0.0:
        out.append((xs[-1], xs[-1]))
    return out
