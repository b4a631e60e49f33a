"""NumPy implementation of the Godunov time loop; same contract as ``_fvkernel``."""

import numpy as np


def _flux(y, c, rho):
    return np.where(y > c, (1.0 - rho) * c - y, -rho * y)


def advance(u, right_tail, c, rho, lam, nsteps, lam_last, lo_bound, hi_bound):
    fr = float(_flux(np.float64(right_tail), c, rho))
    total = nsteps + (1 if lam_last > 0.0 else 0)
    flux_right = np.empty_like(u)
    acc = 0.0
    exc = 0.0
    for k in range(total):
        lam_k = lam if k < nsteps else lam_last
        f = _flux(u, c, rho)
        flux_right[:-1] = f[1:]
        flux_right[-1] = fr
        u -= lam_k * (flux_right - f)
        acc += lam_k * (fr - f[0])
        exc = max(exc, float(u.max()) - hi_bound, lo_bound - float(u.min()))
    return acc, exc
