"""Compare the compiled kernels with the NumPy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints one line per (kernel, size) with the best-of-``repeat`` wall time of
each backend, their ratio, and the largest discrepancy between the two.
"""
import argparse
import time

import numpy as np

from lrthermal import kernels
from lrthermal.lattice import Lattice, half_bipartition


def best_time(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_pfaffian(sizes, repeat, rng):
    for n in sizes:
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        a = a - a.T
        tc, (pc, lc) = best_time(lambda: kernels.slogpfaffian(a, backend="cython"), repeat)
        tp, (pp, lp) = best_time(lambda: kernels.slogpfaffian(a, backend="python"), repeat)
        diff = abs(pc * np.exp(lc - lp) - pp)
        yield "slogpfaffian", n, tc, tp, diff


def bench_pair_sum(sides, repeat):
    for side in sides:
        lat = Lattice(2, side)
        part = half_bipartition(lat)
        xa, xb = lat.coords[part.a], lat.coords[part.b]
        tc, (sc, _) = best_time(lambda: kernels.pair_power_sum(xa, xb, 3.0, 0, "cython"), repeat)
        tp, (sp, _) = best_time(lambda: kernels.pair_power_sum(xa, xb, 3.0, 0, "python"), repeat)
        yield "pair_power_sum", lat.n_sites, tc, tp, abs(sc - sp) / abs(sp)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if kernels.BACKEND != "cython":
        raise SystemExit("compiled kernels are not built; reinstall with Cython available")
    rng = np.random.default_rng(1)
    print(f"{'kernel':<16}{'size':>7}{'cython s':>12}{'numpy s':>12}{'speedup':>9}{'max diff':>11}")
    rows = list(bench_pfaffian((16, 64, 256, 512), args.repeat, rng))
    rows += list(bench_pair_sum((10, 20, 40), args.repeat))
    for name, n, tc, tp, diff in rows:
        print(f"{name:<16}{n:>7}{tc:>12.5f}{tp:>12.5f}{tp / tc:>9.1f}{diff:>11.2e}")


if __name__ == "__main__":
    main()
