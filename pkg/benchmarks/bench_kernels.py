"""Compare the compiled and pure-Python kernel backends.

Run with ``python benchmarks/bench_kernels.py``.  Each kernel is timed on
the same inputs through both backends; the table reports the median of
several repeats and the largest coordinate difference between the outputs.
"""
import argparse
import statistics
import time

import numpy as np

from polarcs import _pykernels

try:
    from polarcs import _ckernels
except ImportError:
    _ckernels = None


def _time(fn, repeats):
    out, times = None, []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def cases(J, M, iters, seed):
    rng = np.random.default_rng(seed)
    r, theta = 1.0, 0.36386
    ct, st = np.cos(theta), np.sin(theta)
    n = 3 * J
    X = rng.standard_normal((J, 3))
    G = rng.standard_normal((2 * M, n)) / np.sqrt(2 * M)
    y = rng.standard_normal(2 * M)
    L = np.linalg.norm(G, 2) ** 2
    U, s, Vh = np.linalg.svd(G, full_matrices=False)
    b = U.T @ y
    x0 = np.zeros(n)
    return {
        "project_polar_cone": lambda k: k.project_polar_cone(X, r, ct, st),
        "mfista_cone": lambda k: k.mfista_cone(G, y, 1e-3, x0, L, r, ct, st, iters, 1e-14)[0],
        "admm_cone_ball": lambda k: k.admm_cone_ball(
            np.ascontiguousarray(Vh), s, b, 1e-2, x0, np.zeros_like(x0), 1.0, r, ct, st, iters, 1e-12, 1e-12)[0],
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--arcs", type=int, default=500)
    p.add_argument("--measurements", type=int, default=90)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the pure-Python backend is available")
    print(f"{'kernel':<20} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8} {'max diff':>10}")
    for name, fn in cases(args.arcs, args.measurements, args.iterations, args.seed).items():
        t_py, out_py = _time(lambda: fn(_pykernels), args.repeats)
        if _ckernels is None:
            print(f"{name:<20} {t_py:11.4f} {'-':>11} {'-':>8} {'-':>10}")
            continue
        t_c, out_c = _time(lambda: fn(_ckernels), args.repeats)
        diff = float(np.max(np.abs(np.asarray(out_py) - np.asarray(out_c))))
        print(f"{name:<20} {t_py:11.4f} {t_c:11.4f} {t_py / t_c:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
