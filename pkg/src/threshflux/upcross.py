"""Semi-analytic solution for up-crossing data.

Left of ``x0`` the datum ``v0`` sits below the threshold and drifts left at
speed ``rho``; right of ``x0`` the datum ``w0`` sits above it and moves at
speed 1, so the right part runs into the left part and a shock forms.  The
shock position follows from an area balance: the surplus ``I_R(x)`` of
``w0`` above ``c`` on ``[x0, x]`` is matched with the deficit ``I_L(y)`` of
``v0`` below ``c`` on ``[y, x0]``.

Conventions used throughout:

* ``y(x) = I_L^{-1}(I_R(x))`` maps the consumption front to the saturation front,
* ``t(x) = (x - y(x)) / (1 - rho)`` is the time at which front ``x`` is reached,
* ``x_t`` inverts ``t``, and the shock sits at ``x_t - t``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .advection import Line, profile_features
from .errors import BeyondExhaustion, DomainError, NegativeTime
from .flux import FluxParams
from .profiles import CrossingProblem, Direction, Profile, validate_crossing

_EPS = np.finfo(float).eps
_MAX_ITER = 200
_MAX_DOUBLINGS = 1100


def _monotone_root(
    f: Callable[[float], float],
    df: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    atol: float,
) -> float:
    """Root of the increasing ``f(x) = target`` inside ``[lo, hi]``.

    Newton steps are taken while they stay inside the shrinking bracket,
    bisection otherwise.  Converges on the function value.
    """
    flo = f(lo) - target
    fhi = f(hi) - target
    if abs(flo) <= atol:
        return lo
    if abs(fhi) <= atol:
        return hi
    if flo > 0 or fhi < 0:
        raise DomainError(f"root not bracketed in [{lo}, {hi}] (residuals {flo}, {fhi})")
    x = lo - flo * (hi - lo) / (fhi - flo)
    if not lo < x < hi:
        x = 0.5 * (lo + hi)
    for _ in range(_MAX_ITER):
        fx = f(x) - target
        if abs(fx) <= atol:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        if hi - lo <= 4.0 * _EPS * max(1.0, abs(lo), abs(hi)):
            return x
        d = df(x)
        xn = x - fx / d if d > 0 else math.nan
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        x = xn
    return x


class FrontMaps:
    """The maps ``I_L``, ``I_R``, ``y``, ``t`` and ``x_t`` of an up-crossing datum.

    ``inversion_tol`` bounds the area mismatch relative to the matched area:
    ``|I_L(y) - I_R(x)| <= inversion_tol * (1 + I_R(x))``.
    """

    def __init__(
        self,
        v0: Profile,
        w0: Profile,
        x0: float,
        flux: FluxParams,
        inversion_tol: float = 1e-12,
        problem: CrossingProblem | None = None,
    ):
        self.v0 = v0
        self.w0 = w0
        self.x0 = float(x0)
        self.flux = flux
        self.inversion_tol = float(inversion_tol)
        self.problem = problem
        self._local = threading.local()

        c = flux.c
        tail = v0.left_tail
        if tail < c:
            self.IL_total = math.inf
        elif tail == c:
            self.IL_total = self.I_L(min(v0.segments[0].hi, self.x0))
        else:
            raise DomainError("left tail of v0 lies above the threshold")
        tail = w0.right_tail
        if tail > c:
            self.IR_total = math.inf
        elif tail == c:
            self.IR_total = self.I_R(max(w0.segments[-1].lo, self.x0))
        else:
            raise DomainError("right tail of w0 lies below the threshold")

        # at most one reservoir is exhausted: the smaller total caps the other side
        self.y_inf = -math.inf
        self.x_inf = math.inf
        if self.IR_total < self.IL_total:
            self.y_inf = self._invert_IL(self.IR_total)
        elif self.IL_total < self.IR_total:
            self.x_inf = self._invert_IR(self.IL_total)

    @classmethod
    def from_problem(cls, problem: CrossingProblem, inversion_tol: float = 1e-12) -> "FrontMaps":
        if problem.direction is not Direction.UP:
            raise ValueError("front maps are defined for up-crossing problems only")
        v0, w0 = problem.parts
        return cls(v0, w0, problem.x0, problem.flux, inversion_tol, problem)

    # cumulative imbalances ------------------------------------------------

    def I_L(self, y: float) -> float:
        """Deficit ``int_y^x0 (c - v0)``; non-negative, zero at ``x0``."""
        if y > self.x0:
            raise DomainError(f"I_L is defined for y <= x0={self.x0}, got {y}")
        return -self.v0.antiderivative_diff(self.flux.c, y, self.x0)

    def I_R(self, x: float) -> float:
        """Surplus ``int_x0^x (w0 - c)``; non-negative, zero at ``x0``."""
        if x < self.x0:
            raise DomainError(f"I_R is defined for x >= x0={self.x0}, got {x}")
        return self.w0.antiderivative_diff(self.flux.c, self.x0, x)

    def _atol(self, target: float) -> float:
        return self.inversion_tol * (1.0 + abs(target))

    def _invert_IL(self, target: float) -> float:
        """The ``y <= x0`` with ``I_L(y) = target``, bracket grown by doubling."""
        if target <= 0.0:
            return self.x0
        x0, c = self.x0, self.flux.c

        def g(s):
            return self.I_L(x0 - s)

        def dg(s):
            return c - self.v0.evaluate(x0 - s, side="left")

        s_hi = 1.0
        for _ in range(_MAX_DOUBLINGS):
            if g(s_hi) >= target:
                break
            s_hi *= 2.0
        else:
            raise BeyondExhaustion(f"deficit never reaches {target}")
        s = _monotone_root(g, dg, target, 0.0, s_hi, self._atol(target))
        return x0 - s

    def _invert_IR(self, target: float) -> float:
        if target <= 0.0:
            return self.x0
        x0, c = self.x0, self.flux.c
        s_hi = 1.0
        for _ in range(_MAX_DOUBLINGS):
            if self.I_R(x0 + s_hi) >= target:
                break
            s_hi *= 2.0
        else:
            raise BeyondExhaustion(f"surplus never reaches {target}")
        s = _monotone_root(
            lambda s: self.I_R(x0 + s),
            lambda s: self.w0.evaluate(x0 + s) - c,
            target,
            0.0,
            s_hi,
            self._atol(target),
        )
        return x0 + s

    # front maps -------------------------------------------------------------

    def _check_front(self, x: float) -> None:
        if x < self.x0:
            raise DomainError(f"front maps are defined for x >= x0={self.x0}, got {x}")
        if x >= self.x_inf:
            raise BeyondExhaustion(
                f"x={x} lies beyond x_inf={self.x_inf}: surplus exceeds the total deficit"
            )

    def y_of_x(self, x: float) -> float:
        self._check_front(x)
        return self._invert_IL(self.I_R(x))

    def t_of_x(self, x: float) -> float:
        return (x - self.y_of_x(x)) / (1.0 - self.flux.rho)

    def dy_dx(self, x: float) -> float:
        y = self.y_of_x(x)
        c = self.flux.c
        return -(self.w0.evaluate(x) - c) / (c - self.v0.evaluate(y, side="left"))

    def dt_dx(self, x: float) -> float:
        y = self.y_of_x(x)
        c, rho = self.flux.c, self.flux.rho
        vy = self.v0.evaluate(y, side="left")
        return (self.w0.evaluate(x) - vy) / ((1.0 - rho) * (c - vy))

    def x_of_t(self, t: float) -> float:
        """Consumption front at time ``t``.

        Solved as ``I_R(x) = I_L(x - (1 - rho) t)``, which is increasing in
        ``x`` and bracketed by ``[x0, x0 + (1 - rho) t]``.  The last result is
        memoised per thread, so repeated calls at one time are free.
        """
        if t < 0:
            raise NegativeTime(f"time must be non-negative, got {t}")
        t = float(t)
        last = getattr(self._local, "last", None)
        if last is not None and last[0] == t:
            return last[1]
        if t == 0.0:
            x = self.x0
        else:
            x = self._solve_front(t)
        self._local.last = (t, x)
        return x

    def _solve_front(self, t: float) -> float:
        x0 = self.x0
        lag = (1.0 - self.flux.rho) * t

        def h(x):
            return self.I_R(x) - self.I_L(min(x - lag, x0))

        def dh(x):
            return self.w0.evaluate(x) - self.v0.evaluate(min(x - lag, x0), side="left")

        hi = x0 + lag
        if self.x_inf < hi:
            hi = self.x_inf
        # value scale: the area swept is at most of order I_R(hi)
        atol = self._atol(self.I_R(hi) if math.isfinite(hi) else 0.0)
        return _monotone_root(h, dh, 0.0, x0, hi, atol)

    def shock_position(self, t: float) -> float:
        return self.x_of_t(t) - t


def I_L(fm: FrontMaps, y: float) -> float:
    return fm.I_L(y)


def I_R(fm: FrontMaps, x: float) -> float:
    return fm.I_R(x)


def y_of_x(fm: FrontMaps, x: float) -> float:
    return fm.y_of_x(x)


def t_of_x(fm: FrontMaps, x: float) -> float:
    return fm.t_of_x(x)


def x_of_t(fm: FrontMaps, t: float) -> float:
    return fm.x_of_t(t)


class _ShockCurve:
    def __init__(self, fronts: FrontMaps):
        self.fronts = fronts

    def __call__(self, t):
        if np.ndim(t) == 0:
            return self.fronts.shock_position(float(t))
        return np.array([self.fronts.shock_position(float(s)) for s in np.ravel(t)]).reshape(
            np.shape(t)
        )


@dataclass
class UpCrossSolution:
    """Entropy solution for data below ``c`` left of ``x0`` and above it right of ``x0``.

    On the shock itself the left branch is returned.
    """

    fronts: FrontMaps
    validate: bool = True

    def __post_init__(self):
        if self.validate:
            validate_crossing(self.initial_profile, self.flux, self.x0, Direction.UP)
        self._shock = _ShockCurve(self.fronts)

    @classmethod
    def from_profiles(
        cls, flux: FluxParams, v0: Profile, w0: Profile, x0: float, inversion_tol: float = 1e-12
    ) -> "UpCrossSolution":
        return cls(FrontMaps(v0, w0, x0, flux, inversion_tol))

    @classmethod
    def from_problem(cls, problem: CrossingProblem, inversion_tol: float = 1e-12):
        return cls(FrontMaps.from_problem(problem, inversion_tol))

    @property
    def flux(self) -> FluxParams:
        return self.fronts.flux

    @property
    def v0(self) -> Profile:
        return self.fronts.v0

    @property
    def w0(self) -> Profile:
        return self.fronts.w0

    @property
    def x0(self) -> float:
        return self.fronts.x0

    @property
    def initial_profile(self) -> Profile:
        return Profile.join(self.v0, self.w0, self.x0)

    def initial(self, x):
        return self.initial_profile.evaluate(x)

    def shock_curve(self, t: float) -> float:
        return self.fronts.shock_position(t)

    def __call__(self, x, t: float):
        rho = self.flux.rho
        xt = self.fronts.x_of_t(t)
        y_xt = xt - (1.0 - rho) * t
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        left = x + rho * t <= y_xt
        if np.any(left):
            out[left] = self.v0.evaluate(x[left] + rho * t, side="left")
        if not np.all(left):
            out[~left] = self.w0.evaluate(x[~left] + t)
        return float(out[0]) if scalar else out

    def curves(self, levels: Sequence[float]) -> list:
        rho = self.flux.rho
        out: list = [self._shock]
        out += [Line(z, rho) for z in profile_features(self.v0, levels) if z < self.x0]
        out += [Line(z, 1.0) for z in profile_features(self.w0, levels) if z > self.x0]
        return out


def upcross_eval(s: UpCrossSolution, x, t: float):
    return s(x, t)


def shock_curve(s: UpCrossSolution, t: float) -> float:
    return s.shock_curve(t)


@dataclass(frozen=True)
class UncoupledUpCross:
    """Deliberately wrong candidate for up-crossing data.

    Each side is advected at its own speed as if the other did not exist,
    and the right part simply overwrites the left one where they overlap.
    The resulting jump travels at speed -1 instead of the Rankine-Hugoniot
    speed, so it is not a weak solution.
    """

    flux: FluxParams
    v0: Profile
    w0: Profile
    x0: float

    def initial(self, x):
        return Profile.join(self.v0, self.w0, self.x0).evaluate(x)

    def __call__(self, x, t: float):
        rho = self.flux.rho
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        right = x + t > self.x0
        out = np.where(right, self.w0.evaluate(x + t), self.v0.evaluate(x + rho * t, side="left"))
        return float(out[0]) if scalar else out

    def curves(self, levels: Sequence[float]) -> list:
        rho = self.flux.rho
        out: list = [Line(self.x0, 1.0)]
        out += [Line(z, rho) for z in profile_features(self.v0, levels)]
        out += [Line(z, 1.0) for z in profile_features(self.w0, levels)]
        return out
