"""Time the compiled and NumPy Godunov loops on the same problem.

    python3 benchmarks/bench_fv.py [--cells 400 1600 6400] [--repeat 3]
"""

import argparse
import time

import numpy as np

from threshflux import _fvpython, fv
from threshflux.flux import FluxParams
from threshflux.profiles import Profile

try:
    from threshflux import _fvkernel
except ImportError:
    _fvkernel = None


def run(advance, n, repeat):
    fp = FluxParams(2.0, 0.5)
    p = Profile.arctan_window(0.0, 2.0, 3.0)
    g = fv.project(p, -5.0, 3.5, n)
    lam = 0.9
    nsteps = int(1.0 / (lam * g.dx))
    best = np.inf
    for _ in range(repeat):
        u = g.values.copy()
        t0 = time.perf_counter()
        advance(u, g.right_tail, fp.c, fp.rho, lam, nsteps, 0.0, *g.bounds)
        best = min(best, time.perf_counter() - t0)
    return best, u, nsteps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, nargs="+", default=[400, 1600, 6400])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'cells':>7} {'steps':>7} {'numpy [s]':>11} {'cython [s]':>11} {'speedup':>8} {'max diff':>9}")
    for n in args.cells:
        tp, up, steps = run(_fvpython.advance, n, args.repeat)
        if _fvkernel is None:
            print(f"{n:>7d} {steps:>7d} {tp:>11.4f} {'n/a':>11} {'':>8} {'':>9}")
            continue
        tc, uc, _ = run(_fvkernel.advance, n, args.repeat)
        diff = float(np.max(np.abs(up - uc)))
        print(f"{n:>7d} {steps:>7d} {tp:>11.4f} {tc:>11.4f} {tp / tc:>8.1f} {diff:>9.1e}")


if __name__ == "__main__":
    main()
