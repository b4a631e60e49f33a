"""Closed-form solutions: constant-speed advection and the down-crossing fan.

Both solution classes are vectorised in ``x`` at a fixed time and expose the
curves along which they are non-smooth, which the entropy certifier uses to
align its quadrature panels.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import NegativeTime
from .flux import FluxParams
from .profiles import Direction, Profile, validate_crossing


def _check_time(t: float) -> None:
    if t < 0:
        raise NegativeTime(f"time must be non-negative, got {t}")


@dataclass(frozen=True)
class Line:
    """The curve ``t -> start - speed * t``."""

    start: float
    speed: float

    def __call__(self, t):
        return self.start - self.speed * np.asarray(t, dtype=float)


def profile_features(p: Profile, levels: Iterable[float]) -> list[float]:
    """Breakpoints of ``p`` plus interior points where it crosses any level."""
    pts = set(float(b) for b in p.breakpoints)
    for k in levels:
        pts.update(p.level_crossings(float(k)))
    return sorted(pts)


def advect(p: Profile, rho: float, x, t: float):
    """Solution ``u0(x + rho t)`` of ``u_t - rho u_x = 0``."""
    _check_time(t)
    if rho < 0:
        raise ValueError(f"advection speed must be non-negative, got {rho}")
    return p.evaluate(np.asarray(x, dtype=float) + rho * t)


@dataclass(frozen=True)
class AdvectionSolution:
    """Data entirely on one side of the threshold moves rigidly.

    ``speed`` is ``rho`` for data at or below ``c`` and ``1`` above it.
    """

    flux: FluxParams
    profile: Profile

    @cached_property
    def speed(self) -> float:
        lo, hi = self.profile.value_range()
        if lo > self.flux.c:
            return 1.0
        if hi <= self.flux.c:
            return self.flux.rho
        raise ValueError("pure advection needs data entirely on one side of the threshold")

    def __call__(self, x, t: float):
        return advect(self.profile, self.speed, x, t)

    def initial(self, x):
        return self.profile.evaluate(x)

    def curves(self, levels: Sequence[float]) -> list:
        s = self.speed
        return [Line(z, s) for z in profile_features(self.profile, levels)]


@dataclass(frozen=True)
class DownCrossSolution:
    """Data above ``c`` left of ``x0`` and at or below ``c`` right of it.

    The two parts separate and leave a plateau at ``c`` between the lines
    ``x0 - t`` and ``x0 - rho t``.
    """

    flux: FluxParams
    w0: Profile
    v0: Profile
    x0: float

    def __post_init__(self):
        validate_crossing(self.initial_profile, self.flux, self.x0, Direction.DOWN)

    @classmethod
    def from_problem(cls, problem) -> "DownCrossSolution":
        if problem.direction is not Direction.DOWN:
            raise ValueError("expected a down-crossing problem")
        w0, v0 = problem.parts
        return cls(problem.flux, w0, v0, problem.x0)

    @cached_property
    def initial_profile(self) -> Profile:
        return Profile.join(self.w0, self.v0, self.x0)

    def initial(self, x):
        return self.initial_profile.evaluate(x)

    def plateau_interval(self, t: float) -> tuple[float, float]:
        _check_time(t)
        return (self.x0 - t, self.x0 - self.flux.rho * t)

    def __call__(self, x, t: float):
        _check_time(t)
        rho, c = self.flux.rho, self.flux.c
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        lo, hi = self.x0 - t, self.x0 - rho * t
        out = np.full_like(x, c)
        left = x < lo
        right = x > hi
        if np.any(left):
            out[left] = self.w0.evaluate(x[left] + t)
        if np.any(right):
            out[right] = self.v0.evaluate(x[right] + rho * t)
        return float(out[0]) if scalar else out

    def curves(self, levels: Sequence[float]) -> list:
        rho = self.flux.rho
        out = [Line(self.x0, 1.0), Line(self.x0, rho)]
        out += [Line(z, 1.0) for z in profile_features(self.w0, levels) if z < self.x0]
        out += [Line(z, rho) for z in profile_features(self.v0, levels) if z > self.x0]
        return out


def downcross_eval(s: DownCrossSolution, x, t: float):
    return s(x, t)


def plateau_interval(s: DownCrossSolution, t: float) -> tuple[float, float]:
    return s.plateau_interval(t)
