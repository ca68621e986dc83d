#!/usr/bin/env python3
"""Time the grid kernels on the compiled and numpy backends.

    python benchmarks/bench_kernels.py [--n 48 96] [--repeat 5]

Prints one line per (kernel, n, backend) with the best wall time and the
speedup of the compiled backend, plus a check that both backends agree.
"""

import argparse
import time

import numpy as np

from nldw import kernels


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def bench(n, repeat, rng):
    h = 12.0 / n
    u = rng.random((n, n, n))
    w = rng.random((n, n, n))
    target = 0.3 * u.sum()
    cases = {
        "face_sumsq": lambda m: m.face_sumsq(u, h),
        "face_gradient": lambda m: m.face_gradient(u, h),
        "local_sums": lambda m: m.local_sums(u, w),
        "find_shift": lambda m: m.find_shift(u, target),
    }
    found = kernels.backends()
    rows = []
    for name, call in cases.items():
        times = {b: _best(lambda: call(m), repeat) for b, m in found.items()}
        ref = call(found["python"])
        agree = []
        for b, m in found.items():
            got = call(m)
            a = np.atleast_1d(np.asarray(got[0] if name == "face_gradient" else got, dtype=float))
            r = np.atleast_1d(np.asarray(ref[0] if name == "face_gradient" else ref, dtype=float))
            agree.append(float(np.max(np.abs(a - r) / (1.0 + np.abs(r)))))
        rows.append((name, n, times, max(agree)))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[48, 96])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    found = kernels.backends()
    print(f"backends: {', '.join(found)} (active: {kernels.BACKEND})")
    if "cython" not in found:
        print("compiled extension not built; timing the numpy backend only")
    print(f"{'kernel':<14} {'n':>4} " + " ".join(f"{b + ' [ms]':>14}" for b in found) + f" {'speedup':>8} {'max rel diff':>13}")
    for n in args.n:
        for name, nn, times, diff in bench(n, args.repeat, rng):
            cols = " ".join(f"{1e3 * times[b]:>14.2f}" for b in found)
            sp = times["python"] / times["cython"] if "cython" in times else float("nan")
            print(f"{name:<14} {nn:>4} {cols} {sp:>8.2f} {diff:>13.2e}")


if __name__ == "__main__":
    main()
