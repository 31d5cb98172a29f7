"""Scan the driving parameter, detect frozen dynamics, and locate zeros.

The indicator is the sum of residuals S(E) = sum_m (P+(m T) - 1/2): it is
zero when the stroboscopic dynamics freeze and changes sign across a
quasi-energy crossing.
"""
from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .driving import DrivingError, PhaseProfile, Target
from .floquet import (
    Monodromy,
    QubitState,
    SimConfig,
    propagate_period,
    stroboscopic_probabilities,
)
from .measurement import ShotModel, observe
from .specfun import (
    DEFAULT_CONFIG,
    KernelConfig,
    QuadratureError,
    find_root,
    polya_xi_star,
    riemann_xi,
    sign_changes,
)

log = logging.getLogger(__name__)

P_CDT = 0.5
CONFIRM_THRESHOLD = 0.02
_BASIS_STREAM = {"0": 0, "+": 1, "i": 2}


class Method(str, enum.Enum):
    SOR = "sor_sign_change"
    QUASI_ENERGY = "quasi_energy_minimum"


@dataclass
class ScanRecord:
    E: float
    sor: float
    sor_err: float
    p_plus_series: np.ndarray  # rows (m, P+, std_err)
    quasi_energy: float
    error: str | None = None

    def recomputed_sor(self) -> float:
        return sor(self.p_plus_series[:, :2])


@dataclass
class ZeroReport:
    target: Target
    bracket: tuple[float, float]
    refined_estimate: float
    oracle_zero: float
    omega: float
    method: Method = Method.SOR
    status: str = "ok"
    message: str = ""
    periods: int = 0
    grid_step: float = float("nan")

    @property
    def deviation(self) -> float:
        return self.refined_estimate - self.oracle_zero

    def as_dict(self) -> dict:
        return {
            "target": self.target.value,
            "method": self.method.value,
            "status": self.status,
            "bracket_low": float(self.bracket[0]),
            "bracket_high": float(self.bracket[1]),
            "refined_estimate": float(self.refined_estimate),
            "oracle_zero": float(self.oracle_zero),
            "deviation": float(self.deviation),
            "omega": float(self.omega),
            "periods": self.periods,
            "grid_step": self.grid_step,
            "message": self.message,
        }


def sor(series) -> float:
    """sum_m (P+(m) - 1/2) over rows (m, P+)."""
    data = np.asarray(series, dtype=float)
    if data.size == 0:
        raise ValueError("series is empty")
    p = data[:, 1] if data.ndim == 2 else data
    return float(np.sum(p - P_CDT))


def energy_grid(start: float, end: float, step: float) -> np.ndarray:
    if not step > 0:
        raise ValueError("energy step must be positive")
    if end < start:
        raise ValueError("energy range must satisfy start <= end")
    n = int(math.floor((end - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 10)


def _stream_key(E: float) -> int:
    return int(round(E * 1_000_000))


@dataclass(frozen=True)
class _PointJob:
    target: Target
    E: float
    omega: float
    sim: SimConfig
    shots: ShotModel | None
    kernel_cfg: KernelConfig


def _evaluate(job: _PointJob) -> ScanRecord:
    try:
        profile = PhaseProfile.build(job.target, job.E, job.omega, job.kernel_cfg)
        mono = propagate_period(profile, job.omega, job.sim)
        probs = stroboscopic_probabilities(profile, job.omega, job.sim, mono=mono)
    except (DrivingError, QuadratureError, ArithmeticError, ValueError) as exc:
        log.warning("E=%g failed: %s", job.E, exc)
        empty = np.empty((0, 3))
        return ScanRecord(job.E, float("nan"), float("nan"), empty, float("nan"), f"{type(exc).__name__}: {exc}")
    m, p_plus = probs[:, 0], probs[:, 2]
    if job.shots is None:
        err = np.zeros_like(p_plus)
    else:
        p_plus, err = observe(p_plus, job.shots, stream=(_stream_key(job.E), _BASIS_STREAM["+"]))
    series = np.column_stack([m, p_plus, err])
    return ScanRecord(job.E, sor(series[:, :2]), float(np.sum(err)), series, mono.quasi_energy)


def _run(jobs: list[_PointJob], workers: int) -> list[ScanRecord]:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_evaluate, jobs))
    else:
        records = [_evaluate(j) for j in jobs]
    return sorted(records, key=lambda r: r.E)


def scan(
    target,
    E_start: float,
    E_end: float,
    dE: float,
    omega: float = 8.0,
    periods: int = 20,
    shots: ShotModel | None = None,
    sim: SimConfig | None = None,
    kernel_cfg: KernelConfig = DEFAULT_CONFIG,
    workers: int = 1,
) -> list[ScanRecord]:
    """One ScanRecord per grid energy, ordered by E.

    ``shots=None`` records exact probabilities. Failures are stored on the
    record and the scan carries on.
    """
    target = Target.parse(target)
    base = sim or SimConfig()
    sim = SimConfig(base.J, base.steps_per_subperiod, periods)
    jobs = [_PointJob(target, float(E), float(omega), sim, shots, kernel_cfg) for E in energy_grid(E_start, E_end, dE)]
    return _run(jobs, workers)


def oracle_function(target):
    target = Target.parse(target)
    return riemann_xi if target is Target.RIEMANN else polya_xi_star


def oracle_zero(target, lo: float, hi: float, near: float | None = None, kernel_cfg: KernelConfig = DEFAULT_CONFIG,
                margin: float = 0.5, step: float = 0.05) -> float:
    """Oracle root closest to ``near`` inside [lo - margin, hi + margin]."""
    fn = oracle_function(target)
    grid = energy_grid(max(0.0, lo - margin), hi + margin, step)
    vals = [fn(E, kernel_cfg).value for E in grid]
    roots = []
    for a, b in sign_changes(grid, vals):
        roots.append(a if a == b else find_root(lambda x: fn(x, kernel_cfg).value, a, b))
    if not roots:
        return float("nan")
    near = 0.5 * (lo + hi) if near is None or not math.isfinite(near) else near
    return min(roots, key=lambda r: abs(r - near))


def interpolate_zero(records: list[ScanRecord]):
    """First SOR sign change and its linear interpolation.

    Returns (low, high, estimate, n_changes); (nan, nan, nan, 0) when no
    adjacent pair changes sign.
    """
    good = [r for r in records if r.error is None and math.isfinite(r.sor)]
    Es = [r.E for r in good]
    Ss = [r.sor for r in good]
    changes = sign_changes(Es, Ss)
    if not changes:
        return float("nan"), float("nan"), float("nan"), 0
    lo, hi = (float(x) for x in changes[0])
    if lo == hi:
        return lo, hi, lo, len(changes)
    s_lo = Ss[Es.index(lo)]
    s_hi = Ss[Es.index(hi)]
    est = float(lo + (hi - lo) * s_lo / (s_lo - s_hi))
    return lo, hi, est, len(changes)


def refine(
    target,
    bracket: tuple[float, float],
    dE_fine: float = 0.1,
    omega: float = 8.0,
    periods: int = 30,
    shots: ShotModel | None = None,
    sim: SimConfig | None = None,
    kernel_cfg: KernelConfig = DEFAULT_CONFIG,
    workers: int = 1,
) -> tuple[ZeroReport, list[ScanRecord]]:
    """Fine scan of ``bracket``; the zero is interpolated from the SOR sign change."""
    target = Target.parse(target)
    lo_in, hi_in = float(bracket[0]), float(bracket[1])
    if not lo_in < hi_in:
        raise ValueError("bracket must satisfy low < high")
    records = scan(target, lo_in, hi_in, dE_fine, omega, periods, shots, sim, kernel_cfg, workers)
    lo, hi, est, n_changes = interpolate_zero(records)
    if n_changes == 0:
        report = ZeroReport(
            target, (lo_in, hi_in), float("nan"), oracle_zero(target, lo_in, hi_in, kernel_cfg=kernel_cfg), omega,
            status="no_sign_change",
            message="SOR does not change sign in the bracket; increase shots or periods, or widen the bracket",
            periods=periods, grid_step=dE_fine,
        )
        return report, records
    message = "" if n_changes == 1 else f"{n_changes} sign changes; reporting the first"
    report = ZeroReport(
        target, (lo, hi), est, oracle_zero(target, lo, hi, near=est, kernel_cfg=kernel_cfg), omega,
        message=message, periods=periods, grid_step=dE_fine,
    )
    return report, records


def locate_by_quasi_energy(
    target,
    E_start: float,
    E_end: float,
    dE: float,
    omega: float = 8.0,
    sim: SimConfig | None = None,
    kernel_cfg: KernelConfig = DEFAULT_CONFIG,
) -> ZeroReport:
    """Grid argmin of the monodromy |eps+|, polished by bounded minimization."""
    target = Target.parse(target)
    sim = sim or SimConfig()
    grid = energy_grid(E_start, E_end, dE)

    def qe(E: float) -> float:
        return propagate_period(PhaseProfile.build(target, E, omega, kernel_cfg), omega, sim).quasi_energy

    vals = np.array([qe(E) for E in grid])
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    est = float(grid[i])
    if hi > lo:
        res = minimize_scalar(qe, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
        if res.fun <= vals[i]:
            est = float(res.x)
    return ZeroReport(
        target, (float(lo), float(hi)), est, oracle_zero(target, lo, hi, near=est, kernel_cfg=kernel_cfg), omega,
        method=Method.QUASI_ENERGY, grid_step=dE,
    )


@dataclass
class CdtConfirmation:
    frozen: bool
    series: np.ndarray  # rows (m, P0, P+, Pi), m = 0..periods
    max_deviation: dict[str, float] = field(default_factory=dict)
    threshold: float = CONFIRM_THRESHOLD


def confirm_profile(profile, omega: float | None = None, periods: int = 30, sim: SimConfig | None = None,
                    threshold: float = CONFIRM_THRESHOLD, shots: ShotModel | None = None,
                    E_key: float = 0.0) -> CdtConfirmation:
    """Frozen iff every basis stays within ``threshold`` of its m = 0 value."""
    base = sim or SimConfig()
    sim = SimConfig(base.J, base.steps_per_subperiod, periods)
    initial = QubitState.ground()
    probs = stroboscopic_probabilities(profile, omega, sim, initial)
    if shots is not None:
        for col, basis in ((1, "0"), (2, "+"), (3, "i")):
            probs[:, col], _ = observe(probs[:, col], shots, stream=(_stream_key(E_key), _BASIS_STREAM[basis]))
    start = np.array([[0.0, 1.0, 0.5, 0.5]])
    series = np.vstack([start, probs])
    dev = np.max(np.abs(series[1:, 1:] - series[0, 1:]), axis=0)
    max_dev = dict(zip(("0", "+", "i"), map(float, dev)))
    return CdtConfirmation(bool(np.all(dev <= threshold)), series, max_dev, threshold)


def confirm_cdt(target, E: float, omega: float = 8.0, periods: int = 30, sim: SimConfig | None = None,
                threshold: float = CONFIRM_THRESHOLD, shots: ShotModel | None = None,
                kernel_cfg: KernelConfig = DEFAULT_CONFIG) -> CdtConfirmation:
    profile = PhaseProfile.build(target, E, omega, kernel_cfg)
    return confirm_profile(profile, omega, periods, sim, threshold, shots, E_key=E)


def monodromy_at(target, E: float, omega: float = 8.0, sim: SimConfig | None = None,
                 kernel_cfg: KernelConfig = DEFAULT_CONFIG) -> Monodromy:
    return propagate_period(PhaseProfile.build(target, E, omega, kernel_cfg), omega, sim or SimConfig())
