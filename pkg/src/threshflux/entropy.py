"""Numerical Kruzhkov entropy certificate.

For a candidate ``u`` and a non-negative bump ``phi`` the functional

    int_0^inf int_R |u - k| phi_t + sgn(u - k) (G(u) - G(k)) phi_x dx dt
        + int_R |u0 - k| phi(x, 0) dx

must be non-negative for every real ``k``.  Its linear counterpart (``|u-k|``
replaced by ``u`` and the entropy flux by ``G(u)``) must vanish for a weak
solution.

Quadrature: an adaptive Gauss-Kronrod rule in ``t`` (``scipy.integrate.quad_vec``)
wrapped around composite Gauss-Legendre panels in ``x``.  Candidates that
expose their non-smooth curves through ``curves(levels)`` get panel edges
placed exactly on them, and the times where those curves cross each other
or the edge of the support become breakpoints of the outer rule.  All
entropy constants of a lattice are integrated together as one vector.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad_vec
from scipy.optimize import brentq

from .advection import profile_features
from .errors import UnresolvedDiscontinuity
from .flux import FluxParams, flux
from .profiles import Profile


def _bump(s):
    s = np.asarray(s, dtype=float)
    return np.where(np.abs(s) < 1.0, (1.0 - s * s) ** 2, 0.0)


def _dbump(s):
    s = np.asarray(s, dtype=float)
    return np.where(np.abs(s) < 1.0, -4.0 * s * (1.0 - s * s), 0.0)


@dataclass(frozen=True)
class BumpTestFn:
    """``phi(x, t) = B((x - xc) / xh) * B((t - tc) / th)`` with ``B(s) = (1 - s^2)^2``."""

    x_center: float
    x_halfwidth: float
    t_center: float
    t_halfwidth: float

    def __post_init__(self):
        if not (self.x_halfwidth > 0 and self.t_halfwidth > 0):
            raise ValueError("bump half-widths must be positive")

    @property
    def x_range(self) -> tuple[float, float]:
        return (self.x_center - self.x_halfwidth, self.x_center + self.x_halfwidth)

    @property
    def t_range(self) -> tuple[float, float]:
        """Support in time, restricted to ``t >= 0``."""
        return (max(0.0, self.t_center - self.t_halfwidth), self.t_center + self.t_halfwidth)

    @property
    def touches_initial_line(self) -> bool:
        return self.t_center - self.t_halfwidth < 0.0 < self.t_center + self.t_halfwidth

    @property
    def area(self) -> float:
        lo, hi = self.t_range
        return 2.0 * self.x_halfwidth * max(0.0, hi - lo)

    def _sx(self, x):
        return (np.asarray(x, dtype=float) - self.x_center) / self.x_halfwidth

    def _st(self, t):
        return (t - self.t_center) / self.t_halfwidth

    def __call__(self, x, t):
        return _bump(self._sx(x)) * _bump(self._st(t))

    def dx(self, x, t):
        return _dbump(self._sx(x)) / self.x_halfwidth * _bump(self._st(t))

    def dt(self, x, t):
        return _bump(self._sx(x)) * _dbump(self._st(t)) / self.t_halfwidth


@dataclass(frozen=True)
class QuadratureOptions:
    panel_width: float = 0.25
    order: int = 10
    check_order: int = 6
    # used for candidates that do not expose their discontinuity curves
    generic_panels: int = 64
    epsabs: float = 1e-11
    epsrel: float = 1e-10
    limit: int = 4000
    # without curve information a moving jump defeats adaptivity; give up early
    generic_limit: int = 100


@dataclass
class FunctionalValues:
    """Everything one quadrature sweep over a test function produces."""

    kruzhkov: np.ndarray
    weak: float
    estimate: float
    sup_u: float


@dataclass
class KruzhkovReport:
    k_values: list
    test_fns: list
    residuals: np.ndarray
    scales: np.ndarray
    weak_residuals: np.ndarray
    quadrature_estimate: float
    tol: float

    @property
    def min_residual(self) -> float:
        return float(self.residuals.min())

    @property
    def normalized(self) -> np.ndarray:
        return self.residuals / self.scales

    @property
    def min_normalized(self) -> float:
        return float(self.normalized.min())

    @property
    def thresholds(self) -> np.ndarray:
        return -self.tol * self.scales - self.quadrature_estimate

    @property
    def passed(self) -> bool:
        return bool(np.all(self.residuals >= self.thresholds))

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict} kruzhkov: {len(self.k_values)} k x {len(self.test_fns)} phi, "
            f"min residual {self.min_residual:.3e}, min residual/scale {self.min_normalized:.3e}, "
            f"tol {self.tol:g}, quadrature estimate {self.quadrature_estimate:.1e}"
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "phi_index", "residual", "scale", "residual_over_scale"])
        for i, k in enumerate(self.k_values):
            for j in range(len(self.test_fns)):
                w.writerow(
                    [
                        f"{k:.17g}",
                        j,
                        f"{self.residuals[i, j]:.17g}",
                        f"{self.scales[i, j]:.17g}",
                        f"{self.normalized[i, j]:.17g}",
                    ]
                )
        return buf.getvalue()


# --------------------------------------------------------------------------
# quadrature machinery


class _Integrator:
    def __init__(self, u, u0, fp: FluxParams, ks: np.ndarray, phi: BumpTestFn, opts):
        self.u = u
        self.u0 = u0 if u0 is not None else getattr(u, "initial", None)
        if self.u0 is None:
            raise ValueError("initial data is required")
        self.fp = fp
        self.ks = np.asarray(ks, dtype=float)
        self.gk = flux(fp, self.ks)
        self.phi = phi
        self.opts = opts
        levels = list(self.ks) + [fp.c]
        self.curves = list(u.curves(levels)) if hasattr(u, "curves") else None
        self.structured = self.curves is not None
        x_lo, x_hi = phi.x_range
        t_lo, t_hi = phi.t_range
        self.x_lo, self.x_hi, self.t_lo, self.t_hi = x_lo, x_hi, t_lo, t_hi
        if self.structured:
            self.curves = self._relevant(self.curves)
        self.rules = self._rules()

    def _rules(self):
        o = self.opts
        if self.structured:
            spec = [(o.panel_width, o.order), (o.panel_width, o.check_order)]
        else:
            w = (self.x_hi - self.x_lo) / o.generic_panels
            spec = [(0.5 * w, o.order), (w, o.order)]
        return [(h, *np.polynomial.legendre.leggauss(n)) for h, n in spec]

    def _relevant(self, curves):
        ts = np.linspace(self.t_lo, self.t_hi, 17)
        keep = []
        for cv in curves:
            xs = np.asarray(cv(ts), dtype=float)
            if xs.max() >= self.x_lo and xs.min() <= self.x_hi:
                keep.append(cv)
        return keep

    # panels ---------------------------------------------------------------

    def _breaks_at(self, t: float) -> np.ndarray:
        pts = [self.x_lo, self.x_hi]
        if self.structured:
            for cv in self.curves:
                x = float(cv(t))
                if self.x_lo < x < self.x_hi:
                    pts.append(x)
        return np.unique(pts)

    def _nodes(self, breaks: np.ndarray, rule):
        h, gx, gw = rule
        a, b = breaks[:-1], breaks[1:]
        counts = np.maximum(1, np.ceil((b - a) / h - 1e-9).astype(int))
        edges = np.concatenate(
            [np.linspace(ai, bi, ci + 1)[:-1] for ai, bi, ci in zip(a, b, counts)] + [[b[-1]]]
        )
        lo, hi = edges[:-1], edges[1:]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        x = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        w = (half[:, None] * gw[None, :]).ravel()
        return x, w

    def _time_breaks(self) -> list[float]:
        if not self.structured:
            return []
        t_lo, t_hi = self.t_lo, self.t_hi
        ts = np.linspace(t_lo, t_hi, 33)
        funcs: list[Callable] = [lambda t, v=self.x_lo: v + 0.0 * t, lambda t, v=self.x_hi: v + 0.0 * t]
        funcs += self.curves
        vals = np.array([np.broadcast_to(np.asarray(f(ts), dtype=float), ts.shape) for f in funcs])
        out = []
        n = len(funcs)
        for i in range(n):
            for j in range(i + 1, n):
                d = vals[i] - vals[j]
                idx = np.nonzero(d[:-1] * d[1:] < 0)[0]
                for m in idx:
                    fi, fj = funcs[i], funcs[j]
                    tc = brentq(lambda s: float(fi(s)) - float(fj(s)), ts[m], ts[m + 1], xtol=1e-14)
                    xc = float(fi(tc))
                    if self.x_lo - 1e-12 <= xc <= self.x_hi + 1e-12:
                        out.append(tc)
                for m in np.nonzero(d == 0)[0]:
                    out.append(float(ts[m]))
        return sorted(set(t for t in out if t_lo < t < t_hi))

    # integrands -------------------------------------------------------------

    def _space_term(self, t: float) -> np.ndarray:
        """x-integrals at fixed t for every rule: [kruzhkov(ks)..., weak] per rule."""
        breaks = self._breaks_at(t)
        out = []
        for rule in self.rules:
            x, w = self._nodes(breaks, rule)
            u = np.asarray(self.u(x, t), dtype=float)
            self.sup_u = max(self.sup_u, float(np.max(np.abs(u))))
            pt = self.phi.dt(x, t) * w
            px = self.phi.dx(x, t) * w
            gu = flux(self.fp, u)
            diff = u[None, :] - self.ks[:, None]
            kr = np.abs(diff) @ pt + (np.sign(diff) * (gu[None, :] - self.gk[:, None])) @ px
            weak = u @ pt + gu @ px
            out.append(np.concatenate([kr, [weak]]))
        return np.concatenate(out)

    def _initial_term(self) -> np.ndarray:
        if not self.phi.touches_initial_line:
            return np.zeros(len(self.rules) * (len(self.ks) + 1))
        pts = [self.x_lo, self.x_hi]
        if isinstance(self.u0, Profile):
            feats = profile_features(self.u0, list(self.ks) + [self.fp.c])
            pts += [z for z in feats if self.x_lo < z < self.x_hi]
        elif self.structured:
            pts += [float(cv(0.0)) for cv in self.curves if self.x_lo < float(cv(0.0)) < self.x_hi]
        breaks = np.unique(pts)
        out = []
        for rule in self.rules:
            x, w = self._nodes(breaks, rule)
            v = np.asarray(self.u0(x), dtype=float)
            self.sup_u = max(self.sup_u, float(np.max(np.abs(v))))
            pw = self.phi(x, 0.0) * w
            kr = np.abs(v[None, :] - self.ks[:, None]) @ pw
            out.append(np.concatenate([kr, [v @ pw]]))
        return np.concatenate(out)

    def run(self) -> FunctionalValues:
        self.sup_u = 0.0
        o = self.opts
        nk = len(self.ks) + 1
        init = self._initial_term()
        if self.t_hi > self.t_lo:
            points = self._time_breaks()
            res, err = quad_vec(
                self._space_term,
                self.t_lo,
                self.t_hi,
                epsabs=o.epsabs,
                epsrel=o.epsrel,
                norm="max",
                points=points or None,
                limit=o.limit if self.structured else o.generic_limit,
            )
        else:
            res, err = np.zeros_like(init), 0.0
        total = res + init
        main, check = total[:nk], total[nk:]
        estimate = float(np.max(np.abs(main - check))) + float(err)
        return FunctionalValues(main[:-1].copy(), float(main[-1]), estimate, self.sup_u)


def functional_values(
    u, u0, fp: FluxParams, ks: Sequence[float], phi: BumpTestFn, opts: QuadratureOptions | None = None
) -> FunctionalValues:
    return _Integrator(u, u0, fp, np.asarray(ks, dtype=float), phi, opts or QuadratureOptions()).run()


def _check_resolved(vals: FunctionalValues, tol: float, scale: float) -> None:
    if vals.estimate > 10.0 * tol * scale:
        raise UnresolvedDiscontinuity(
            f"successive panel refinements differ by {vals.estimate:.3e}, "
            f"more than 10x the tolerance {tol * scale:.3e}"
        )


def residual_scale(k, sup_u: float, phi: BumpTestFn):
    return (1.0 + np.abs(k) + sup_u) * phi.area


def kruzhkov_functional(
    u,
    u0,
    fp: FluxParams,
    k: float,
    phi: BumpTestFn,
    tol: float = 1e-6,
    opts: QuadratureOptions | None = None,
) -> float:
    """Signed left-hand side of the Kruzhkov inequality for one ``(k, phi)``."""
    vals = functional_values(u, u0, fp, [k], phi, opts)
    _check_resolved(vals, tol, float(residual_scale(k, vals.sup_u, phi)))
    return float(vals.kruzhkov[0])


def weak_form_residual(
    u, u0, fp: FluxParams, phi: BumpTestFn, tol: float = 1e-6, opts: QuadratureOptions | None = None
) -> float:
    vals = functional_values(u, u0, fp, [0.0], phi, opts)
    _check_resolved(vals, tol, float(residual_scale(0.0, vals.sup_u, phi)))
    return vals.weak


def certify(
    u,
    u0,
    fp: FluxParams,
    k_lattice: Sequence[float],
    phi_lattice: Sequence[BumpTestFn],
    tol: float = 1e-6,
    opts: QuadratureOptions | None = None,
) -> KruzhkovReport:
    """Evaluate the functional on every ``(k, phi)`` pair.

    PASS iff every residual is at least ``-tol * scale - quadrature_estimate``
    where ``scale = (1 + |k| + sup|u|) * area(supp phi)``.
    """
    ks = np.asarray(list(k_lattice), dtype=float)
    phis = list(phi_lattice)
    if len(ks) == 0 or len(phis) == 0:
        raise ValueError("k and phi lattices must be non-empty")
    res = np.empty((len(ks), len(phis)))
    scales = np.empty_like(res)
    weak = np.empty(len(phis))
    estimate = 0.0
    for j, phi in enumerate(phis):
        vals = functional_values(u, u0, fp, ks, phi, opts)
        sc = residual_scale(ks, vals.sup_u, phi)
        _check_resolved(vals, tol, float(sc.min()))
        res[:, j] = vals.kruzhkov
        scales[:, j] = sc
        weak[j] = vals.weak
        estimate = max(estimate, vals.estimate)
    return KruzhkovReport([float(k) for k in ks], phis, res, scales, weak, estimate, tol)


# --------------------------------------------------------------------------
# lattices


def default_k_lattice(u0: Profile, fp: FluxParams, x0: float | None = None) -> list[float]:
    """Entropy constants covering the data range, the threshold and the jump levels."""
    c = fp.c
    _, vals = u0.samples()
    lo, hi = float(vals.min()), float(vals.max())
    ks = {0.0, 0.5 * c, c, lo, hi, lo - 1.0, hi + 1.0}
    ks.update(float(k) for k in np.linspace(lo - 0.5, hi + 0.5, 9))
    ks.update(float(q) for q in np.quantile(vals, [0.25, 0.5, 0.75]))
    if x0 is not None:
        jump = abs(u0.evaluate(x0, side="right") - u0.evaluate(x0, side="left"))
        if jump > 0:
            ks.update({c - jump, c + jump})
    return sorted(ks)


def bump_lattice(
    n: int,
    x_range: tuple[float, float],
    t_range: tuple[float, float],
    seed: int,
    anchors: Sequence[tuple[float, float]] = (),
    x_halfwidth: tuple[float, float] = (0.2, 1.0),
    t_halfwidth: tuple[float, float] = (0.2, 0.8),
) -> list[BumpTestFn]:
    """``n`` seeded bumps: one centred on each anchor first, the rest uniform."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        if i < len(anchors):
            xc, tc = anchors[i]
        else:
            xc = rng.uniform(*x_range)
            tc = rng.uniform(*t_range)
        xh = rng.uniform(*x_halfwidth)
        th = rng.uniform(*t_halfwidth)
        out.append(BumpTestFn(float(xc), float(xh), float(tc), float(th)))
    return out
