"""Piecewise-analytic initial data.

A :class:`Profile` is an ordered list of :class:`Segment` objects tiling the
real line.  Every segment kind carries a closed-form antiderivative, so the
cumulative deficit/surplus integrals used by the up-crossing construction
are exact up to round-off and never go through a generic quadrature.

Unbounded segments must be constant; this gives the finite-volume solver
well-defined ghost values and makes the improper integrals decidable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Sequence, Union

import numpy as np

from .errors import (
    CrossingViolation,
    MultipleCrossings,
    NonFiniteBound,
    ProfileError,
)

if TYPE_CHECKING:
    from .flux import FluxParams

INF = math.inf
CONTINUITY_RTOL = 1e-12
SAMPLES_PER_SEGMENT = 64


# --------------------------------------------------------------------------
# segment kinds


@dataclass(frozen=True)
class Constant:
    value: float

    tag = "constant"

    def __call__(self, x):
        return np.full(np.shape(x), float(self.value))

    def integral(self, a, b, level):
        return (self.value - level) * (np.asarray(b) - np.asarray(a))

    def crossings(self, level, lo, hi):
        return []

    def extrema(self, lo, hi):
        return []


@dataclass(frozen=True)
class Affine:
    """``x -> slope * x + intercept``."""

    slope: float
    intercept: float

    tag = "affine"

    def __call__(self, x):
        return self.slope * np.asarray(x, dtype=float) + self.intercept

    def integral(self, a, b, level):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        # midpoint form avoids cancellation in b**2 - a**2
        return (b - a) * (self.slope * 0.5 * (a + b) + self.intercept - level)

    def crossings(self, level, lo, hi):
        if self.slope == 0.0:
            return []
        z = (level - self.intercept) / self.slope
        return [z] if lo < z < hi else []

    def extrema(self, lo, hi):
        return []


@dataclass(frozen=True)
class ArctanShift:
    """``x -> arctan(x - center) + offset``."""

    center: float
    offset: float

    tag = "arctan"

    def __call__(self, x):
        return np.arctan(np.asarray(x, dtype=float) - self.center) + self.offset

    def _primitive(self, x, level):
        s = np.asarray(x, dtype=float) - self.center
        return s * np.arctan(s) - 0.5 * np.log1p(s * s) + (self.offset - level) * s

    def integral(self, a, b, level):
        return self._primitive(b, level) - self._primitive(a, level)

    def crossings(self, level, lo, hi):
        arg = level - self.offset
        if abs(arg) >= 0.5 * math.pi:
            return []
        z = self.center + math.tan(arg)
        return [z] if lo < z < hi else []

    def extrema(self, lo, hi):
        return []


@dataclass(frozen=True)
class TabulatedLinear:
    """Linear interpolation through ``knots = ((x0, v0), (x1, v1), ...)``."""

    knots: tuple

    tag = "tabulated"

    def __post_init__(self):
        knots = tuple((float(x), float(v)) for x, v in self.knots)
        if len(knots) < 2:
            raise ProfileError("tabulated segment needs at least two knots")
        xs = [k[0] for k in knots]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ProfileError("tabulated knots must be strictly increasing in x")
        if not all(math.isfinite(x) and math.isfinite(v) for x, v in knots):
            raise ProfileError("tabulated knots must be finite")
        object.__setattr__(self, "knots", knots)

    @cached_property
    def xs(self) -> np.ndarray:
        return np.array([k[0] for k in self.knots])

    @cached_property
    def vs(self) -> np.ndarray:
        return np.array([k[1] for k in self.knots])

    @cached_property
    def _cumulative(self) -> np.ndarray:
        areas = 0.5 * np.diff(self.xs) * (self.vs[1:] + self.vs[:-1])
        return np.concatenate([[0.0], np.cumsum(areas)])

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.xs, self.vs)

    def _primitive(self, x):
        x = np.asarray(x, dtype=float)
        j = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, len(self.xs) - 2)
        return self._cumulative[j] + 0.5 * (x - self.xs[j]) * (self.vs[j] + self(x))

    def integral(self, a, b, level):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return self._primitive(b) - self._primitive(a) - level * (b - a)

    def crossings(self, level, lo, hi):
        out = []
        xs, vs = self.xs, self.vs
        for j in range(len(xs) - 1):
            da, db = vs[j] - level, vs[j + 1] - level
            if da * db < 0.0:
                z = xs[j] + (level - vs[j]) * (xs[j + 1] - xs[j]) / (vs[j + 1] - vs[j])
                if lo < z < hi:
                    out.append(float(z))
        return out

    def extrema(self, lo, hi):
        return [float(x) for x in self.xs if lo <= x <= hi]

    def restricted(self, lo: float, hi: float) -> "TabulatedLinear":
        inner = [(x, v) for x, v in self.knots if lo < x < hi]
        return TabulatedLinear(((lo, float(self(lo))), *inner, (hi, float(self(hi)))))


Kind = Union[Constant, Affine, ArctanShift, TabulatedLinear]


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    kind: Kind

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if not lo < hi:
            raise ProfileError(f"segment needs lo < hi, got [{lo}, {hi}]")
        if math.isnan(lo) or math.isnan(hi):
            raise ProfileError("segment endpoints must not be NaN")
        if not (math.isfinite(lo) and math.isfinite(hi)) and not isinstance(self.kind, Constant):
            raise ProfileError(
                f"unbounded segment [{lo}, {hi}] must be Constant, got {self.kind.tag}"
            )
        if isinstance(self.kind, TabulatedLinear):
            xs = self.kind.xs
            if xs[0] != lo or xs[-1] != hi:
                raise ProfileError("tabulated segment endpoints must coincide with first/last knot")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def clip(self, lo: float, hi: float) -> "Segment | None":
        a, b = max(self.lo, lo), min(self.hi, hi)
        if not a < b:
            return None
        kind = self.kind
        if isinstance(kind, TabulatedLinear) and (a, b) != (self.lo, self.hi):
            kind = kind.restricted(a, b)
        return Segment(a, b, kind)


# --------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class Profile:
    """Initial datum on the whole line, built from tiling segments.

    ``continuity_flag`` is inferred when omitted.  Passing ``True`` asserts
    continuity and raises :class:`ProfileError` if the segments disagree at a
    shared endpoint.
    """

    segments: tuple
    continuity_flag: bool | None = field(default=None)

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ProfileError("profile needs at least one segment")
        object.__setattr__(self, "segments", segs)
        if segs[0].lo != -INF or segs[-1].hi != INF:
            raise ProfileError("segments must tile the whole real line")
        for s, t in zip(segs, segs[1:]):
            if s.hi != t.lo:
                raise ProfileError(f"gap or overlap between {s.hi} and {t.lo}")
        continuous = all(
            _close(float(s.kind(s.hi)), float(t.kind(t.lo))) for s, t in zip(segs, segs[1:])
        )
        if self.continuity_flag is None:
            object.__setattr__(self, "continuity_flag", continuous)
        elif self.continuity_flag and not continuous:
            raise ProfileError("profile declared continuous but segments disagree at a breakpoint")

    # constructors ---------------------------------------------------------

    @classmethod
    def constant(cls, value: float) -> "Profile":
        return cls((Segment(-INF, INF, Constant(float(value))),))

    @classmethod
    def step(cls, x0: float, left: float, right: float) -> "Profile":
        return cls(
            (Segment(-INF, x0, Constant(float(left))), Segment(x0, INF, Constant(float(right))))
        )

    @classmethod
    def arctan_window(cls, center: float, offset: float, half_width: float) -> "Profile":
        """``arctan(x - center) + offset`` on a window, frozen to constants outside it."""
        lo, hi = center - half_width, center + half_width
        kind = ArctanShift(center, offset)
        return cls(
            (
                Segment(-INF, lo, Constant(float(kind(lo)))),
                Segment(lo, hi, kind),
                Segment(hi, INF, Constant(float(kind(hi)))),
            )
        )

    @classmethod
    def affine_window(cls, lo: float, hi: float, slope: float, intercept: float) -> "Profile":
        kind = Affine(slope, intercept)
        return cls(
            (
                Segment(-INF, lo, Constant(float(kind(lo)))),
                Segment(lo, hi, kind),
                Segment(hi, INF, Constant(float(kind(hi)))),
            )
        )

    @classmethod
    def tabulated(cls, knots: Sequence[tuple[float, float]]) -> "Profile":
        kind = TabulatedLinear(tuple(knots))
        lo, hi = float(kind.xs[0]), float(kind.xs[-1])
        return cls(
            (
                Segment(-INF, lo, Constant(float(kind.vs[0]))),
                Segment(lo, hi, kind),
                Segment(hi, INF, Constant(float(kind.vs[-1]))),
            )
        )

    @classmethod
    def join(cls, left: "Profile", right: "Profile", x0: float) -> "Profile":
        """``left`` on ``(-inf, x0]`` and ``right`` on ``(x0, inf)``."""
        segs = [s for s in (t.clip(-INF, x0) for t in left.segments) if s is not None]
        segs += [s for s in (t.clip(x0, INF) for t in right.segments) if s is not None]
        return cls(tuple(_merge_constants(segs)))

    # basic queries ----------------------------------------------------------

    @cached_property
    def breakpoints(self) -> np.ndarray:
        return np.array([s.hi for s in self.segments[:-1]], dtype=float)

    @property
    def left_tail(self) -> float:
        return float(self.segments[0].kind.value)

    @property
    def right_tail(self) -> float:
        return float(self.segments[-1].kind.value)

    @property
    def support(self) -> tuple[float, float]:
        """Smallest interval outside of which the profile equals its tails."""
        if len(self.segments) == 1:
            return (0.0, 0.0)
        return (self.segments[0].hi, self.segments[-1].lo)

    def evaluate(self, x, side: str = "right"):
        """Value at ``x``; at a breakpoint the right segment wins unless ``side="left"``."""
        scalar = np.ndim(x) == 0
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.searchsorted(self.breakpoints, xa, side="right" if side == "right" else "left")
        out = np.empty_like(xa)
        for i in np.unique(idx):
            mask = idx == i
            out[mask] = self.segments[i].kind(xa[mask])
        return float(out[0]) if scalar else out

    __call__ = evaluate

    def antiderivative_diff(self, level: float, a: float, b: float) -> float:
        """Exact ``int_a^b (p(z) - level) dz``."""
        if not (math.isfinite(a) and math.isfinite(b)):
            raise NonFiniteBound(f"integration bounds must be finite, got [{a}, {b}]")
        if a > b:
            return -self.antiderivative_diff(level, b, a)
        total = 0.0
        for s in self.segments:
            lo, hi = max(s.lo, a), min(s.hi, b)
            if lo < hi:
                total += float(s.kind.integral(lo, hi, level))
        return total

    def cell_integrals(self, edges: np.ndarray) -> np.ndarray:
        """Exact integrals of the profile between consecutive ``edges``."""
        edges = np.asarray(edges, dtype=float)
        out = np.zeros(len(edges) - 1)
        for s in self.segments:
            a = np.clip(edges[:-1], s.lo, s.hi)
            b = np.clip(edges[1:], s.lo, s.hi)
            live = b > a
            if np.any(live):
                out[live] += s.kind.integral(a[live], b[live], 0.0)
        return out

    def cell_averages(self, edges: np.ndarray) -> np.ndarray:
        """Exact averages between consecutive ``edges``.

        Constant pieces are weighted by their length fraction instead of
        divided back out, so a cell inside a constant segment gets that
        constant bit for bit.
        """
        edges = np.asarray(edges, dtype=float)
        width = np.diff(edges)
        out = np.zeros(len(edges) - 1)
        for s in self.segments:
            a = np.clip(edges[:-1], s.lo, s.hi)
            b = np.clip(edges[1:], s.lo, s.hi)
            live = b > a
            if not np.any(live):
                continue
            if isinstance(s.kind, Constant):
                out[live] += s.kind.value * ((b[live] - a[live]) / width[live])
            else:
                out[live] += s.kind.integral(a[live], b[live], 0.0) / width[live]
        return out

    def level_crossings(self, level: float) -> list[float]:
        """Interior points where the profile crosses ``level`` inside a segment."""
        out: list[float] = []
        for s in self.segments:
            out.extend(s.kind.crossings(level, s.lo, s.hi))
        return sorted(out)

    def value_range(self) -> tuple[float, float]:
        _, vals = self.samples()
        return float(vals.min()), float(vals.max())

    def samples(self, per_segment: int = SAMPLES_PER_SEGMENT) -> tuple[np.ndarray, np.ndarray]:
        """Dense sample of (x, value) pairs covering every segment.

        Each segment is evaluated on its own closed interval so both one-sided
        limits at every breakpoint appear, along with the kind's extrema.
        """
        xs, vs = [], []
        for s in self.segments:
            if s.bounded:
                pts = np.linspace(s.lo, s.hi, per_segment + 2)
            else:
                anchor = s.hi if math.isfinite(s.hi) else s.lo
                if not math.isfinite(anchor):
                    anchor = 0.0
                pts = anchor + np.linspace(-1.0, 1.0, per_segment + 2)
                pts = pts[(pts >= s.lo) & (pts <= s.hi)]
            extra = s.kind.extrema(s.lo, s.hi)
            if extra:
                pts = np.union1d(pts, extra)
            xs.append(pts)
            vs.append(s.kind(pts))
        return np.concatenate(xs), np.concatenate(vs)

    # splitting ------------------------------------------------------------

    def split(self, x0: float) -> tuple["Profile", "Profile"]:
        """Left and right parts, each extended by its one-sided limit at ``x0``."""
        left_val = self.evaluate(x0, side="left")
        right_val = self.evaluate(x0, side="right")
        left = [s for s in (t.clip(-INF, x0) for t in self.segments) if s is not None]
        left.append(Segment(x0, INF, Constant(left_val)))
        right = [Segment(-INF, x0, Constant(right_val))]
        right += [s for s in (t.clip(x0, INF) for t in self.segments) if s is not None]
        return Profile(tuple(_merge_constants(left))), Profile(tuple(_merge_constants(right)))


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= CONTINUITY_RTOL * max(1.0, abs(a), abs(b))


def _merge_constants(segs: Iterable[Segment]) -> list[Segment]:
    out: list[Segment] = []
    for s in segs:
        if (
            out
            and isinstance(s.kind, Constant)
            and isinstance(out[-1].kind, Constant)
            and out[-1].kind.value == s.kind.value
        ):
            out[-1] = Segment(out[-1].lo, s.hi, s.kind)
        else:
            out.append(s)
    return out


def evaluate(p: Profile, x):
    return p.evaluate(x)


def antiderivative_diff(p: Profile, level: float, a: float, b: float) -> float:
    return p.antiderivative_diff(level, a, b)


# --------------------------------------------------------------------------
# crossing problems


class Direction(enum.Enum):
    DOWN = "down-crossing"
    UP = "up-crossing"

    @classmethod
    def parse(cls, text: "str | Direction") -> "Direction":
        if isinstance(text, Direction):
            return text
        key = str(text).strip().lower().replace("_", "-")
        for d in cls:
            if key in (d.value, d.name.lower(), d.value.replace("-", "")):
                return d
        raise ValueError(f"unknown crossing direction {text!r}")


@dataclass(frozen=True)
class CrossingProblem:
    flux: "FluxParams"
    profile: Profile
    x0: float
    direction: Direction

    @cached_property
    def parts(self) -> tuple[Profile, Profile]:
        return self.profile.split(self.x0)

    @property
    def left(self) -> Profile:
        return self.parts[0]

    @property
    def right(self) -> Profile:
        return self.parts[1]


def validate_crossing(
    p: Profile, flux: "FluxParams", x0: float, direction: "Direction | str"
) -> CrossingProblem:
    """Check the regime conditions of a single-crossing Cauchy problem.

    Down-crossing: ``u0 > c`` left of ``x0`` and ``0 <= u0 <= c`` right of it.
    Up-crossing: ``0 <= u0 < c`` left of ``x0`` and ``u0 > c`` right of it.
    The point ``x0`` itself is not constrained.
    """
    direction = Direction.parse(direction)
    c = flux.c
    xs, vs = p.samples()
    order = np.argsort(xs, kind="stable")
    xs, vs = xs[order], vs[order]

    signs = np.sign(vs - c)
    nz = signs[signs != 0]
    changes = int(np.count_nonzero(nz[1:] != nz[:-1]))
    if changes > 1:
        raise MultipleCrossings(f"u0 - c changes sign {changes} times on the sample grid")

    for x, v in zip(xs, vs):
        if x == x0:
            continue
        if direction is Direction.UP:
            if x < x0 and not (0.0 <= v < c):
                raise CrossingViolation(x, v, f"need 0 <= u0 < c={c} left of x0={x0}")
            if x > x0 and not v > c:
                raise CrossingViolation(x, v, f"need u0 > c={c} right of x0={x0}")
        else:
            if x < x0 and not v > c:
                raise CrossingViolation(x, v, f"need u0 > c={c} left of x0={x0}")
            if x > x0 and not (0.0 <= v <= c):
                raise CrossingViolation(x, v, f"need 0 <= u0 <= c={c} right of x0={x0}")
    return CrossingProblem(flux, p, float(x0), direction)
