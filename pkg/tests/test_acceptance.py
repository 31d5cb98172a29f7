"""Acceptance criteria, one test per clause.

Each clause records its outcome; the terminal summary (and ``python
tests/test_acceptance.py``) prints one PASS/FAIL line per criterion.
"""
from __future__ import annotations

import math
import tempfile
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.integrate import quad
from scipy.optimize import bisect

from riemann_cdt import cdt, floquet, records
from riemann_cdt import specfun as sf
from riemann_cdt.cli import main as cli_main
from riemann_cdt.driving import PERIOD, PhaseProfile
from riemann_cdt.effective import j_eff
from riemann_cdt.floquet import QubitState, SimConfig
from riemann_cdt.measurement import ShotModel, distinguishability, observe

from conftest import ACCEPTANCE

TITLES = {
    1: "oracle Riemann zero",
    2: "oracle Polya zeros and Bessel cross-check",
    3: "Re J_eff proportional to the transform",
    4: "Floquet Riemann fine bracket",
    5: "Floquet Polya brackets",
    6: "omega-sweep trend",
    7: "shot-noise realism",
    8: "property suites",
}


def check(n: int, clause: str, ok, detail: str) -> None:
    ACCEPTANCE.setdefault(n, (TITLES[n], []))[1].append((clause, bool(ok), detail))
    assert ok, f"criterion {n}, {clause}: {detail}"


@lru_cache(maxsize=None)
def polya_refine(omega: float):
    report, _ = cdt.refine("polya", (8.5, 9.5), 0.1, omega, 30)
    return report


# ---- 1 ------------------------------------------------------------------------

def test_c1_riemann_oracle_zero():
    root = bisect(lambda E: sf.riemann_xi(E).value, 14.0, 15.0, xtol=1e-10)
    check(1, "root in [14, 15]", abs(root - 14.1347) <= 1e-3, f"{root:.6f} vs 14.1347 +- 1e-3")


# ---- 2 ------------------------------------------------------------------------

def _polya_root(lo, hi):
    return bisect(lambda E: sf.polya_xi_star(E).value, lo, hi, xtol=1e-10)


def test_c2_first_polya_zero():
    root = _polya_root(8.0, 10.0)
    check(2, "first root", abs(root - 8.993) <= 5e-3, f"{root:.6f} vs 8.993 +- 5e-3")


def test_c2_second_polya_zero():
    root = _polya_root(18.0, 20.0)
    check(2, "second root", abs(root - 18.996) <= 5e-3, f"{root:.6f} vs 18.996 +- 5e-3")


def test_c2_bessel_roots_agree():
    gaps = []
    for lo, hi in ((8.0, 10.0), (18.0, 20.0)):
        gaps.append(abs(bisect(sf.bessel_k_crosscheck, lo, hi, xtol=1e-10) - _polya_root(lo, hi)))
    check(2, "Bessel roots", max(gaps) <= 1e-4, f"max gap {max(gaps):.2e} <= 1e-4")


# ---- 3 ------------------------------------------------------------------------

def _ratio_spread(target, energies, oracle):
    ratios = [j_eff(PhaseProfile.build(target, E, 1.0), 1.0).re / oracle(E).value for E in energies]
    return (max(ratios) - min(ratios)) / abs(np.mean(ratios))


def test_c3_riemann_proportionality():
    spread = _ratio_spread("riemann", (2, 6, 10, 13), sf.riemann_xi)
    check(3, "Riemann ratio", spread <= 5e-3, f"spread {spread:.2e} <= 5e-3")


def test_c3_polya_proportionality():
    spread = _ratio_spread("polya", (2, 5, 7), sf.polya_xi_star)
    check(3, "Polya ratio", spread <= 5e-3, f"spread {spread:.2e} <= 5e-3")


# ---- 4 ------------------------------------------------------------------------

def test_c4_riemann_fine_bracket():
    recs = cdt.scan("riemann", 13.5, 14.5, 0.1, 8.0, 30)
    changes = sf.sign_changes([r.E for r in recs], [r.sor for r in recs])
    ok = len(changes) == 1 and 14.2 <= changes[0][0] and changes[0][1] <= 14.4
    check(4, "sign change in [14.2, 14.4]", ok, f"changes {[(float(a), float(b)) for a, b in changes]}")


# ---- 5 ------------------------------------------------------------------------

def test_c5_polya_fine_bracket():
    rep = polya_refine(8.0)
    check(5, "fine bracket", rep.bracket == (9.0, 9.1), f"bracket {rep.bracket}")


def test_c5_polya_second_coarse():
    recs = cdt.scan("polya", 15, 22, 1, 8.0, 20)
    changes = sf.sign_changes([r.E for r in recs], [r.sor for r in recs])
    ok = any(a >= 18 and b <= 19 for a, b in changes)
    check(5, "coarse change in [18, 19]", ok, f"changes {[(float(a), float(b)) for a, b in changes]}")


# ---- 6 ------------------------------------------------------------------------

def test_c6_omega_6_above():
    est = polya_refine(6.0).refined_estimate
    check(6, "est(6) > 9.1", est > 9.1, f"est(6) = {est:.4f}")


def test_c6_omega_8_inside():
    est = polya_refine(8.0).refined_estimate
    check(6, "est(8) in (9.0, 9.1)", 9.0 < est < 9.1, f"est(8) = {est:.4f}")


def test_c6_omega_12_closer():
    e8, e12 = polya_refine(8.0).refined_estimate, polya_refine(12.0).refined_estimate
    ok = abs(e12 - 8.993) < abs(e8 - 8.993)
    check(6, "est(12) closer than est(8)", ok, f"|{e12:.4f} - 8.993| < |{e8:.4f} - 8.993|")


# ---- 7 ------------------------------------------------------------------------

def test_c7_std_err():
    _, err = observe(0.5, ShotModel(40_000, 0.995, seed=0))
    check(7, "std_err at p = 0.5", abs(err / 0.0025 - 1) <= 0.02, f"{err:.6f} vs 0.0025 +- 2%")


def test_c7_distinguishability():
    d = distinguishability(40_000, 0.995)
    check(7, "distinguishability", math.isclose(d, 0.005, rel_tol=1e-12), f"{d:.6f} vs 0.005")


# ---- 8 ------------------------------------------------------------------------

PROFILES = [("riemann", 14.0), ("polya", 9.0), ("polya", 18.5)]


def test_c8_unitarity_and_det():
    worst_u = worst_det = 0.0
    for target, E in PROFILES:
        u = floquet.propagate_period(PhaseProfile.build(target, E, 8.0), 8.0).u
        worst_u = max(worst_u, float(np.max(np.abs(u.conj().T @ u - np.eye(2)))))
        worst_det = max(worst_det, abs(np.linalg.det(u) - 1))
    check(8, "unitarity", worst_u <= 1e-8, f"{worst_u:.1e}")
    check(8, "det = 1", worst_det <= 1e-8, f"{worst_det:.1e}")


def test_c8_quasi_energy_pairing():
    worst = 0.0
    for target, E in PROFILES:
        plus, minus = floquet.propagate_period(PhaseProfile.build(target, E, 8.0), 8.0).quasi_pair
        worst = max(worst, abs(plus + minus))
    check(8, "eps- = -eps+", worst <= 1e-12, f"{worst:.1e}")


def test_c8_norm_preservation():
    p = PhaseProfile.build("riemann", 14.0, 8.0)
    cfg = SimConfig(periods=5)
    stepped = floquet.evolve_steps(p, 8.0, cfg, QubitState.ground(), 50)
    mono = floquet.propagate_period(p, 8.0, cfg)
    traj = floquet.state_trajectory(mono, QubitState.ground(), 500)
    worst = max(abs(np.vdot(stepped, stepped).real - 1), float(np.max(np.abs(np.sum(np.abs(traj) ** 2, 1) - 1))))
    check(8, "norm", worst <= 1e-9, f"{worst:.1e}")


def test_c8_phase_boundaries():
    worst = 0.0
    for target, E in PROFILES:
        p = PhaseProfile.build(target, E, 8.0)
        worst = max(worst, abs(p.full_period_phase(0.0)), abs(p.full_period_phase(PERIOD)))
    check(8, "F(0) = F(2 pi) = 0", worst == 0.0, f"{worst:.1e}")


def test_c8_field_parity_and_average():
    worst_parity = worst_mean = 0.0
    for target, E in PROFILES:
        p = PhaseProfile.build(target, E, 1.0)
        t = np.linspace(0.01, math.pi - 0.01, 500)
        a, b = p.field(t, 1.0), p.field(t + math.pi, 1.0)
        ok = ~(a.singular | b.singular)
        worst_parity = max(worst_parity, float(np.max(np.abs(a.f[ok] + b.f[ok]) / (1 + np.abs(a.f[ok])))))
        # quarters are integrated separately; the pulses are smooth inside each
        total = sum(quad(lambda x: float(p.field(x, 1.0).f[0]), k * math.pi / 2, (k + 1) * math.pi / 2,
                         limit=200, epsabs=1e-12)[0] for k in range(4))
        worst_mean = max(worst_mean, abs(total))
    check(8, "f(t + pi) = -f(t)", worst_parity <= 1e-9, f"{worst_parity:.1e}")
    check(8, "zero field average", worst_mean <= 1e-9, f"{worst_mean:.1e}")


def test_c8_phi_positive_decreasing():
    t = np.linspace(0, math.pi / 2, 1001)
    ok = bool(np.all(sf.phi(t) > 0) and np.all(sf.phi_prime(t[1:]) < 0))
    check(8, "Phi > 0, Phi' < 0", ok, "1001-point grid on [0, pi/2]")


def test_c8_oracle_evenness():
    worst = 0.0
    for fn in (sf.riemann_xi, sf.polya_xi_star):
        for E in (1.0, 5.0, 9.0, 14.0):
            a, b = fn(E), fn(-E)
            worst = max(worst, abs(a.value - b.value) / max(a.est_error, 1e-300))
    check(8, "oracle even in E", worst <= 1.0, f"max |diff| / est_error = {worst:.2f}")


def test_c8_step_doubling():
    gap = floquet.convergence_gap(PhaseProfile.build("riemann", 14.0, 8.0), 8.0, SimConfig(steps_per_subperiod=1024))
    check(8, "step doubling", gap < 1e-6, f"{gap:.1e}")


def test_c8_seeded_rng():
    m = ShotModel(40_000, 0.995, seed=17)
    a = cdt.scan("polya", 9, 9, 1, 8.0, 10, shots=m)[0].p_plus_series
    b = cdt.scan("polya", 9, 9, 1, 8.0, 10, shots=m)[0].p_plus_series
    check(8, "seeded RNG", np.array_equal(a, b), "identical shot series for one seed")


def test_c8_byte_identical_rerun():
    argv = ["scan", "--target", "polya", "--e-start", "8", "--e-end", "10", "--periods", "8",
            "--shots", "40000", "--seed", "5"]
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp)
        cli_main([*argv, "--out", str(out / "a")])
        cli_main([*argv, "--out", str(out / "a2")])
        names = sorted(p.name for p in (out / "a").iterdir())
        same = all(records.read_body(out / "a" / n) == records.read_body(out / "a2" / n) for n in names)
        first = {n: (out / "a" / n).read_bytes() for n in names}
        cli_main([*argv, "--out", str(out / "a")])
        same_bytes = all((out / "a" / n).read_bytes() == first[n] for n in names)
    check(8, "byte-identical rerun", same and same_bytes and len(names) == 3, f"{len(names)} CSV files")


if __name__ == "__main__":
    import sys

    from conftest import acceptance_lines

    for name, fn in sorted(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except AssertionError:
                pass
    lines = acceptance_lines()
    print("\n".join(lines))
    sys.exit(0 if all(" PASS " in line for line in lines) else 1)
