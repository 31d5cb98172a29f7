"""Time the compiled and NumPy propagation kernels side by side.

    python3 benchmarks/bench_kernels.py [--steps 8192] [--repeat 5]

Also times one monodromy and one 30-period stepped evolution through each
backend, and checks the two backends agree.
"""
import argparse
import timeit

import numpy as np

from riemann_cdt import _pykernels, floquet, kernels
from riemann_cdt.driving import PhaseProfile
from riemann_cdt.floquet import QubitState, SimConfig

try:
    from riemann_cdt import _kernels
except ImportError:
    _kernels = None


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def with_backend(impl, fn):
    saved = kernels.step_product, kernels.apply_steps
    kernels.step_product, kernels.apply_steps = impl.step_product, impl.apply_steps
    try:
        return fn()
    finally:
        kernels.step_product, kernels.apply_steps = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=8192)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = {"python": _pykernels}
    if _kernels is None:
        print("compiled extension not built; timing the NumPy backend only")
    else:
        backends["cython"] = _kernels

    phases = np.random.default_rng(0).uniform(-np.pi, np.pi, args.steps)
    psi = np.array([1.0, 0.0], dtype=complex)
    profile = PhaseProfile.build("riemann", 14.0, 8.0)
    cfg = SimConfig(periods=30)

    cases = {
        f"step_product ({args.steps} steps)": lambda k: k.step_product(phases, 1.0, 1e-3),
        f"apply_steps ({args.steps} steps)": lambda k: k.apply_steps(phases, 1.0, 1e-3, psi),
        "monodromy, omega = 8": lambda k: with_backend(k, lambda: floquet.propagate_period(profile, 8.0)),
        "30 stepped periods, omega = 8": lambda k: with_backend(
            k, lambda: floquet.evolve_steps(profile, 8.0, cfg, QubitState.ground(), 30)),
    }

    names = list(backends)
    print(f"{'case':36s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, call in cases.items():
        times = [best(lambda k=backends[n]: call(k), args.repeat) for n in names]
        row = f"{label:36s}" + "".join(f"{t * 1e3:10.3f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)

    if _kernels is not None:
        a = np.array(_kernels.step_product(phases, 1.0, 1e-3))
        b = np.array(_pykernels.step_product(phases, 1.0, 1e-3))
        print(f"max backend difference (step_product): {np.max(np.abs(a - b)):.1e}")


if __name__ == "__main__":
    main()
