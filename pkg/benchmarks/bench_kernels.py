"""Benchmark the compiled kernels against the pure-python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat 5]

Reports wall time per call for both backends on the wavelet filter loops and
the graph-energy pair sum, plus the numerical deviation between them (the
transforms must agree bit for bit, the energy to rounding).
"""

import argparse
import time

import numpy as np

from fracfield import _slowkern
from fracfield.wavelet import daubechies_filter, quadrature_mirror

try:
    from fracfield import _fastkern
except ImportError:
    _fastkern = None


def timeit(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_dwt(repeat):
    h = daubechies_filter(6)
    g = quadrature_mirror(h)
    print("\nperiodized wavelet level (analysis + synthesis)")
    print(f"{'shape':>14} {'python':>12} {'compiled':>12} {'speedup':>9}  match")
    for rows, n in ((1, 1 << 16), (256, 256), (64, 4096)):
        rng = np.random.default_rng(1)
        mat = rng.standard_normal((rows, n))

        def run(kern):
            lo, hi = kern.dwt_analyze_level(mat, h, g)
            return kern.dwt_synthesize_level(np.asarray(lo), np.asarray(hi), h, g)

        t_py, out_py = timeit(lambda: run(_slowkern), repeat)
        if _fastkern is None:
            print(f"{rows}x{n:>8} {t_py * 1e3:>10.2f}ms {'n/a':>12}")
            continue
        t_c, out_c = timeit(lambda: run(_fastkern), repeat)
        match = "bit-identical" if np.array_equal(out_py, np.asarray(out_c)) \
            else f"max|diff|={np.abs(out_py - np.asarray(out_c)).max():.2e}"
        print(f"{rows}x{n:>8} {t_py * 1e3:>10.2f}ms {t_c * 1e3:>10.2f}ms "
              f"{t_py / t_c:>8.1f}x  {match}")


def bench_energy(repeat):
    print("\ngraph pair energy (rho = 1.8)")
    print(f"{'points':>14} {'python':>12} {'compiled':>12} {'speedup':>9}  rel diff")
    for n in (2048, 8192):
        rng = np.random.default_rng(2)
        v = rng.standard_normal(n)
        t_py, e_py = timeit(lambda: _slowkern.graph_energy_1d(v, 1.0 / n, 1.8),
                            repeat)
        if _fastkern is None:
            print(f"{n:>14} {t_py * 1e3:>10.1f}ms {'n/a':>12}")
            continue
        t_c, e_c = timeit(lambda: _fastkern.graph_energy_1d(v, 1.0 / n, 1.8),
                          repeat)
        print(f"{n:>14} {t_py * 1e3:>10.1f}ms {t_c * 1e3:>10.1f}ms "
              f"{t_py / t_c:>8.1f}x  {abs(e_py - e_c) / e_py:.2e}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _fastkern is None:
        print("compiled extension not available; timing the fallback only")
    bench_dwt(args.repeat)
    bench_energy(args.repeat)


if __name__ == "__main__":
    main()
