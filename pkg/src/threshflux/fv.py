"""First-order Godunov finite-volume solver, used as an independent oracle.

The flux is non-increasing, so the exact Riemann flux at every interface is
the flux of the right state and the scheme is plain upwinding from the
right.  The time loop itself lives in ``_backend`` (compiled when the
extension is built, NumPy otherwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import _backend
from .errors import CflViolation, TailNotConstant
from .flux import FluxParams
from .profiles import Profile

# 5-point Gauss-Legendre on [-1, 1]
_GL5_NODES, _GL5_WEIGHTS = np.polynomial.legendre.leggauss(5)


@dataclass
class GridField:
    """Cell averages on a uniform grid plus constant ghost values.

    ``t`` is the time the field represents, ``boundary_flux`` the integral
    of ``F_right - F_left`` over ``[0, t]`` and ``max_excursion`` how far any
    value ever left the initial range (zero for a monotone scheme).
    """

    x_min: float
    x_max: float
    values: np.ndarray
    left_tail: float
    right_tail: float
    t: float = 0.0
    boundary_flux: float = 0.0
    max_excursion: float = 0.0
    bounds: tuple[float, float] | None = None

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=float)
        if not self.x_max > self.x_min:
            raise ValueError("need x_min < x_max")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("cell values must be finite")
        if self.bounds is None:
            vals = np.concatenate([self.values, [self.left_tail, self.right_tail]])
            self.bounds = (float(vals.min()), float(vals.max()))

    @property
    def n_cells(self) -> int:
        return len(self.values)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_cells + 1)

    @property
    def centers(self) -> np.ndarray:
        e = self.edges
        return 0.5 * (e[:-1] + e[1:])

    @property
    def mass(self) -> float:
        return float(self.values.sum() * self.dx)

    def copy(self) -> "GridField":
        return replace(self, values=self.values.copy())


@dataclass
class FvRun:
    flux: FluxParams
    grid: GridField
    cfl: float = 0.9
    t_end: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise CflViolation(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")

    @property
    def dt(self) -> float:
        return self.cfl * self.grid.dx / FluxParams.max_speed


def project(p: Profile, x_min: float, x_max: float, n: int) -> GridField:
    """Exact cell averages of ``p`` on ``n`` uniform cells."""
    if not x_min < x_max:
        raise ValueError("need x_min < x_max")
    if n < 2:
        raise ValueError("need at least two cells")
    if p.segments[0].hi < x_min or p.segments[-1].lo > x_max:
        raise TailNotConstant(
            f"profile is not constant outside [{x_min}, {x_max}]; widen the domain"
        )
    edges = np.linspace(x_min, x_max, n + 1)
    return GridField(x_min, x_max, p.cell_averages(edges), p.left_tail, p.right_tail)


def _advance(run: FvRun, g: GridField, nsteps: int, last_dt: float) -> GridField:
    out = g.copy()
    dx = g.dx
    lo, hi = g.bounds
    acc, exc = _backend.advance(
        out.values,
        float(g.right_tail),
        run.flux.c,
        run.flux.rho,
        run.dt / dx,
        int(nsteps),
        last_dt / dx,
        lo,
        hi,
    )
    out.t = g.t + nsteps * run.dt + last_dt
    out.boundary_flux = g.boundary_flux + acc * dx
    out.max_excursion = max(g.max_excursion, exc)
    return out


def step(run: FvRun, dt: float | None = None) -> GridField:
    """One explicit conservative update of ``run.grid``."""
    dt = run.dt if dt is None else dt
    if dt > run.grid.dx / FluxParams.max_speed * (1 + 1e-14) or dt < 0:
        raise CflViolation(f"dt={dt} exceeds the CFL bound dx={run.grid.dx}")
    if dt == 0:
        return run.grid.copy()
    return _advance(run, run.grid, 0, dt)


def solve(run: FvRun) -> GridField:
    """March to ``run.t_end``; the final step is shortened to land on it."""
    dt = run.dt
    remaining = run.t_end - run.grid.t
    if remaining <= 0:
        return run.grid.copy()
    nsteps = int(math.floor(remaining / dt))
    last = remaining - nsteps * dt
    if last <= 1e-12 * dt:
        last = 0.0
    return _advance(run, run.grid, nsteps, last)


def l1_distance(g: GridField, reference: Callable, t: float) -> float:
    """``sum_i dx |u_i - mean of reference over cell i|``, 5-point Gauss per cell."""
    centers = g.centers
    half = 0.5 * g.dx
    xq = (centers[:, None] + half * _GL5_NODES[None, :]).ravel()
    vals = np.asarray(reference(xq, t), dtype=float).reshape(len(centers), 5)
    means = 0.5 * vals @ _GL5_WEIGHTS
    return float(g.dx * np.abs(g.values - means).sum())


def transition_midpoint(g: GridField, lo_value: float, hi_value: float) -> float:
    """Where the field crosses the mean of two states, interpolated between centres.

    Takes the first crossing scanning from the right boundary.
    """
    m = 0.5 * (lo_value + hi_value)
    u = g.values - m
    x = g.centers
    idx = np.nonzero(u[:-1] * u[1:] <= 0.0)[0]
    if len(idx) == 0:
        raise ValueError("field never crosses the mid value")
    i = idx[-1]
    if u[i + 1] == u[i]:
        return float(0.5 * (x[i] + x[i + 1]))
    return float(x[i] - u[i] * (x[i + 1] - x[i]) / (u[i + 1] - u[i]))
