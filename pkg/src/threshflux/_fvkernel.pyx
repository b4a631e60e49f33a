# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Godunov time loop for the threshold flux (in-place update)."""

import numpy as np

from libc.math cimport fmax, fmin


cdef inline double _flux(double y, double c, double rho) noexcept nogil:
    # -rho*y below c, (1-rho)*c - y above; branch-free so the loops vectorise
    return -rho * y - (1.0 - rho) * fmax(y - c, 0.0)


def advance(double[::1] u, double right_tail, double c, double rho,
            double lam, long nsteps, double lam_last,
            double lo_bound, double hi_bound):
    """Run ``nsteps`` steps at ``lam = dt/dx`` then one at ``lam_last`` (if > 0).

    Returns ``(sum_k lam_k * (F_right - F_left), max excursion outside
    [lo_bound, hi_bound])``.
    """
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i
    cdef long k, total = nsteps + (1 if lam_last > 0.0 else 0)
    cdef double[::1] fbuf = np.empty(n + 1)
    cdef double* f = &fbuf[0]
    cdef double* p = &u[0]
    cdef double l, v
    cdef double acc = 0.0
    cdef double lo = lo_bound, hi = hi_bound
    f[n] = _flux(right_tail, c, rho)
    with nogil:
        for k in range(total):
            l = lam if k < nsteps else lam_last
            for i in range(n):
                f[i] = _flux(p[i], c, rho)
            for i in range(n):
                v = p[i] - l * (f[i + 1] - f[i])
                p[i] = v
                lo = fmin(lo, v)
                hi = fmax(hi, v)
            acc += l * (f[n] - f[0])
    return acc, fmax(0.0, fmax(hi - hi_bound, lo_bound - lo))
