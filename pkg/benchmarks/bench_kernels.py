#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-NumPy fallback.

Run:  python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from riot_energy_lab._kernels import numpy_ref

try:
    from riot_energy_lab._kernels import _hotloops
except ImportError:
    _hotloops = None


def bench(label, fn_by_backend, repeat):
    row = f"{label:<34}"
    base = None
    for name, fn in fn_by_backend:
        if fn is None:
            row += f"  {'n/a':>10}"
            continue
        t = min(timeit.repeat(fn, number=1, repeat=repeat))
        if base is None:
            base = t
        row += f"  {t * 1e3:8.2f}ms"
    if base is not None and fn_by_backend[-1][1] is not None and len(fn_by_backend) > 1:
        t_last = min(timeit.repeat(fn_by_backend[-1][1], number=1, repeat=repeat))
        row += f"  (x{base / t_last:5.1f})"
    print(row)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'kernel':<34}  {'numpy':>10}  {'cython':>10}  speedup")

    # split search over one sorted feature (the tree-building hot loop)
    n = 200_000
    x = np.sort(rng.normal(size=n))
    y = rng.normal(size=n)
    bench(
        f"best_split (n={n})",
        [("numpy", lambda: numpy_ref.best_split(x, y)),
         ("cython", (lambda: _hotloops.best_split(x, y)) if _hotloops else None)],
        args.repeat,
    )

    # Hampel filter over a long trace
    m = 100_000
    trace = rng.normal(1000.0, 5.0, m)
    bench(
        f"hampel (n={m}, window=5)",
        [("numpy", lambda: numpy_ref.hampel(trace, 5, 3.0)),
         ("cython", (lambda: _hotloops.hampel(trace, 5, 3.0)) if _hotloops else None)],
        args.repeat,
    )

    # supercap Euler stepping, 1 hour at 10 ms substeps
    bench(
        "supercap_advance (360k steps)",
        [("numpy", lambda: numpy_ref.supercap_advance(2.5, -0.001, 10.0, 3600.0, 0.01, 1.0, 2.7)),
         ("cython", (lambda: _hotloops.supercap_advance(2.5, -0.001, 10.0, 3600.0, 0.01, 1.0, 2.7)) if _hotloops else None)],
        args.repeat,
    )

    # end-to-end: one random-forest training through the selected backend
    from riot_energy_lab.ml.trees import fit_forest

    Xd = rng.normal(size=(4000, 3))
    yd = rng.normal(size=4000)
    t = min(timeit.repeat(lambda: fit_forest(Xd, yd, 20, 5, True, 0), number=1, repeat=3))
    from riot_energy_lab._kernels import backend_name

    print(f"\nfit_forest(20 trees, 4000 rows) via {backend_name()} backend: {t * 1e3:.0f} ms")


if __name__ == "__main__":
    main()
