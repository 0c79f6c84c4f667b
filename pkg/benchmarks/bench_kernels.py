#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure numpy fallback.

Times the two hot per-realization kernels (selection ordering and
row-restricted combining with cross-gain products) and one end-to-end
coarse sweep per backend.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from xlmimo.config import SystemConfig, with_overrides
from xlmimo.engine import SweepSpec, coarse_grid, run_sweep
from xlmimo.kernels import HAVE_NATIVE, use_backend
from xlmimo.kernels import _ref
from xlmimo.selection import ZF_PIVOT_RTOL, hrnp_scores, selection_tiebreak

if HAVE_NATIVE:
    from xlmimo.kernels import _core

CASES = [(100, 4, 12), (100, 24, 48), (100, 40, 50), (256, 16, 64)]


def _materials(m, k, seed=0):
    rng = np.random.default_rng(seed)
    H = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
    H[rng.uniform(size=(m, k)) < 0.4] = 0.0
    Hhat = H + 1e-3 * (rng.standard_normal((m, k)) +
                       1j * rng.standard_normal((m, k)))
    theta = hrnp_scores(Hhat)
    strength = selection_tiebreak(theta, Hhat)
    order = _ref.selection_order(theta, strength)
    return np.ascontiguousarray(H), np.ascontiguousarray(Hhat), \
        np.ascontiguousarray(theta), np.ascontiguousarray(strength), order


def _time(fn, repeats=50):
    fn()   # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_kernels():
    impls = [("python", _ref)] + ([("native", _core)] if HAVE_NATIVE else [])
    header = f"{'kernel':<28} {'M':>4} {'K':>3} {'N':>3} " + \
        "".join(f"{name + ' [us]':>14}" for name, _ in impls) + \
        (f"{'speedup':>9}" if HAVE_NATIVE else "")
    print(header)
    print("-" * len(header))
    for m, k, n in CASES:
        H, Hhat, theta, strength, order = _materials(m, k)
        for label, fname, args in [
            ("order (lexsort vs greedy)", None, (theta, strength)),
            ("evaluate_selection[mr]", "evaluate_selection",
             (H, Hhat, order, n, False, ZF_PIVOT_RTOL)),
            ("evaluate_selection[zf]", "evaluate_selection",
             (H, Hhat, order, max(n, k), True, ZF_PIVOT_RTOL)),
        ]:
            times = []
            for name, impl in impls:
                if fname is None:
                    fn = impl.selection_order if name == "python" \
                        else impl.selection_order_greedy
                else:
                    fn = getattr(impl, fname)
                times.append(_time(lambda f=fn, a=args: f(*a)))
            cells = "".join(f"{t * 1e6:>14.1f}" for t in times)
            speed = f"{times[0] / times[-1]:>9.1f}" if HAVE_NATIVE else ""
            print(f"{label:<28} {m:>4} {k:>3} {n:>3} {cells}{speed}")
    print()


def bench_sweep():
    cfg = with_overrides(SystemConfig(), K=8, realizations=200)
    spec = SweepSpec(variable="N", values=coarse_grid(cfg.M), scheme="zf",
                     realizations=200)
    print("end-to-end: ZF coarse N sweep, K=8, 200 realizations, 1 worker")
    for name in (["python", "native"] if HAVE_NATIVE else ["python"]):
        use_backend(name)
        t0 = time.perf_counter()
        run_sweep(cfg, spec, workers=1)
        print(f"  {name:<7} {time.perf_counter() - t0:6.2f} s")


if __name__ == "__main__":
    if not HAVE_NATIVE:
        print("compiled kernels unavailable; timing the python backend only")
    import logging
    logging.disable(logging.INFO)
    bench_kernels()
    bench_sweep()
