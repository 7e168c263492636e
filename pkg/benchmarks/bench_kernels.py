"""Compare the numba-compiled kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 200]

Both variants are imported from ruelle_torsion.kernels under their *_loop and
*_numpy names, so this works whatever RT_DISABLE_NUMBA says.  Compilation is
triggered once before timing.
"""

import argparse
import time

import numpy as np

from ruelle_torsion import kernels
from ruelle_torsion._accel import HAVE_NUMBA, njit
from ruelle_torsion.specfun import _abel_plana_rule, _em_coefficients


def cases():
    bern = _em_coefficients(8)
    nodes, weights = _abel_plana_rule()
    x = 0.9 * np.exp(0.7j)
    return {
        "power_sum": ((0.25 - 3.1j, 2.0 + 0.5j, 64),),
        "em_correction": ((0.25 - 3.1j, 2.0 + 0.5j, 64, bern),),
        "abel_plana": ((1.25 - 0.4j, -2.5 + 1.0j, nodes, weights),),
        "dirichlet_sum": ((complex(x), 2.0 + 0j, 1e-14, 10_000_000, 40, 20.0),),
        "gaussian_comb_sum": ((-1j, 3.0, 3.0, 0.2, 1, 10),),
        "gaussian_line_sum": ((0.25, 3.0, 3.0, 0.2, -40, 40),),
    }


def timeit(fn, args, repeat):
    fn(*args)
    t = time.perf_counter()
    for _ in range(repeat):
        out = fn(*args)
    return (time.perf_counter() - t) / repeat, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    repeat = ap.parse_args().repeat

    if not HAVE_NUMBA:
        print("numba inactive (missing or RT_DISABLE_NUMBA set): timing plain-Python loops instead")
    print(f"{'kernel':<20}{'compiled us':>14}{'numpy us':>12}{'speedup':>10}{'|diff|':>12}")
    for name, arglist in cases().items():
        loop = getattr(kernels, f"_{name}_loop")
        compiled = njit(loop) if HAVE_NUMBA else loop
        fallback = getattr(kernels, f"_{name}_numpy")
        for args in arglist:
            t1, a = timeit(compiled, args, repeat)
            t2, b = timeit(fallback, args, repeat)
            a = a[0] if isinstance(a, tuple) else a
            b = b[0] if isinstance(b, tuple) else b
            print(f"{name:<20}{t1 * 1e6:>14.2f}{t2 * 1e6:>12.2f}{t2 / t1:>10.1f}{abs(a - b):>12.2e}")


if __name__ == "__main__":
    main()
