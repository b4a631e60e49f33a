"""Scenario files and the pipeline that runs them.

A scenario is a TOML file::

    name = "riemann_upcross"
    case = "up-crossing"            # or "down-crossing", "advection"
    x0 = 0.0
    t_snapshots = [1.0]
    domain = [-2.0, 0.5]            # or "auto"
    refinement_levels = [100, 200, 400, 800]
    cfl = 0.9
    seed = 7

    [flux]
    c = 1.0
    rho = 0.5

    [profile]                       # shorthand ...
    kind = "step"
    at = 0.0
    left = 0.0
    right = 2.0

    # ... or an explicit segment list:
    # [[profile]]
    # kind = "constant"
    # lo = "-inf"
    # hi = 0.0
    # value = 0.0

    [checks]
    min_order = 0.5

    [certifier]
    test_functions = 20
    tolerance = 1e-6
    negative_control = true

Two-part data can also be given as ``left``/``right`` profiles joined at
``x0``.  All CSV output uses 17 significant digits.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from . import fv
from .advection import AdvectionSolution, DownCrossSolution
from .entropy import KruzhkovReport, bump_lattice, certify, default_k_lattice
from .errors import ConfigError, ThreshfluxError
from .flux import FluxParams
from .profiles import (
    Affine,
    ArctanShift,
    Constant,
    Direction,
    Profile,
    Segment,
    TabulatedLinear,
    validate_crossing,
)
from .upcross import UncoupledUpCross, UpCrossSolution

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

CONSERVATION_RTOL = 1e-10
BOUNDARY_TOL = 1e-12


class Case(enum.Enum):
    DOWN = "down-crossing"
    UP = "up-crossing"
    ADVECTION = "advection"


@dataclass
class CertifierOptions:
    enabled: bool = True
    k_lattice: list | None = None
    test_functions: int = 20
    tolerance: float = 1e-6
    negative_control: bool = False
    x_halfwidth: tuple = (0.2, 1.0)
    t_halfwidth: tuple = (0.2, 0.8)


@dataclass
class Scenario:
    name: str
    flux: FluxParams
    case: Case
    profile: Profile
    x0: float
    t_snapshots: list
    domain: tuple | None
    refinement_levels: list
    cfl: float = 0.9
    seed: int = 0
    min_order: float | None = None
    max_order: float | None = None
    certifier: CertifierOptions = field(default_factory=CertifierOptions)
    description: str = ""

    @property
    def t_max(self) -> float:
        return max(self.t_snapshots)

    def solution(self):
        """The exact or semi-analytic solution of this scenario (memoised)."""
        cached = self.__dict__.get("_solution")
        if cached is not None:
            return cached
        sol = self._build_solution()
        self.__dict__["_solution"] = sol
        return sol

    def _build_solution(self):
        try:
            if self.case is Case.ADVECTION:
                sol = AdvectionSolution(self.flux, self.profile)
                sol.speed  # raises when the data straddles c
                return sol
            direction = Direction.DOWN if self.case is Case.DOWN else Direction.UP
            problem = validate_crossing(self.profile, self.flux, self.x0, direction)
        except ValueError as exc:
            raise ConfigError(str(exc), "profile") from exc
        if self.case is Case.DOWN:
            return DownCrossSolution.from_problem(problem)
        return UpCrossSolution.from_problem(problem)

    def negative_control(self):
        v0, w0 = self.profile.split(self.x0)
        return UncoupledUpCross(self.flux, v0, w0, self.x0)

    def data_extent(self) -> tuple[float, float]:
        a, b = self.profile.support
        return min(a, self.x0), max(b, self.x0)

    def resolved_domain(self) -> tuple[float, float]:
        """Explicit domain (checked) or the automatic one.

        Waves only travel left, at numerical speed at most ``1/cfl`` cells per
        unit time, so the left boundary gets a ``t_max / cfl`` pad and the
        right boundary only needs to sit in the constant tail.
        """
        a, b = self.data_extent()
        reach = self.t_max / self.cfl
        if self.domain is None:
            pad = 0.5 + 0.1 * (b - a + self.t_max)
            return (a - reach - pad, b + pad)
        x_min, x_max = self.domain
        dx = (x_max - x_min) / min(self.refinement_levels)
        if a - x_min < reach + 2 * dx:
            raise ConfigError(
                f"left boundary {x_min} too close to the data: need x_min <= {a - reach - 2 * dx:.6g}",
                "domain",
            )
        if x_max - b < 2 * dx:
            raise ConfigError(
                f"right boundary {x_max} too close to the data: need x_max >= {b + 2 * dx:.6g}",
                "domain",
            )
        return (x_min, x_max)

    def k_lattice(self) -> list[float]:
        if self.certifier.k_lattice is not None:
            return list(self.certifier.k_lattice)
        return default_k_lattice(self.profile, self.flux, self.x0)

    def phi_lattice(self):
        a, b = self.data_extent()
        T = self.t_max
        x_range = (a - T, b + 0.5)
        anchors = []
        if self.case is Case.UP:
            sol = self.solution()
            anchors = [(sol.shock_curve(f * T), f * T) for f in (0.25, 0.5, 0.9)]
        elif self.case is Case.DOWN:
            rho = self.flux.rho
            anchors = [(self.x0 - 0.5 * T, 0.5 * T), (self.x0 - 0.5 * rho * T, 0.5 * T)]
        return bump_lattice(
            self.certifier.test_functions,
            x_range,
            (0.0, T),
            self.seed,
            anchors,
            self.certifier.x_halfwidth,
            self.certifier.t_halfwidth,
        )


# --------------------------------------------------------------------------
# parsing


def _num(value, where: str) -> float:
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("-inf", "-infinity"):
            return -math.inf
        if text in ("+inf", "inf", "+infinity", "infinity"):
            return math.inf
        raise ConfigError(f"expected a number or '-inf'/'+inf', got {value!r}", where)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", where)
    return float(value)


def _finite(value, where: str) -> float:
    v = _num(value, where)
    if not math.isfinite(v):
        raise ConfigError("value must be finite", where)
    return v


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise ConfigError("missing required key", f"{where}.{key}" if where else key)
    return table[key]


def _segment(spec: dict, where: str) -> Segment:
    if not isinstance(spec, dict):
        raise ConfigError("segment must be a table", where)
    kind = str(_require(spec, "kind", where)).lower()
    try:
        if kind == "tabulated":
            knots = _require(spec, "knots", where)
            if not isinstance(knots, list) or not all(
                isinstance(k, list) and len(k) == 2 for k in knots
            ):
                raise ConfigError("knots must be a list of [x, value] pairs", f"{where}.knots")
            tab = TabulatedLinear(
                tuple((_finite(x, f"{where}.knots"), _finite(v, f"{where}.knots")) for x, v in knots)
            )
            lo = _num(spec.get("lo", tab.knots[0][0]), f"{where}.lo")
            hi = _num(spec.get("hi", tab.knots[-1][0]), f"{where}.hi")
            return Segment(lo, hi, tab)
        lo = _num(_require(spec, "lo", where), f"{where}.lo")
        hi = _num(_require(spec, "hi", where), f"{where}.hi")
        if kind == "constant":
            k: Any = Constant(_finite(_require(spec, "value", where), f"{where}.value"))
        elif kind == "affine":
            k = Affine(
                _finite(_require(spec, "slope", where), f"{where}.slope"),
                _finite(_require(spec, "intercept", where), f"{where}.intercept"),
            )
        elif kind == "arctan":
            k = ArctanShift(
                _finite(_require(spec, "center", where), f"{where}.center"),
                _finite(_require(spec, "offset", where), f"{where}.offset"),
            )
        else:
            raise ConfigError(f"unknown segment kind {kind!r}", f"{where}.kind")
        return Segment(lo, hi, k)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), where) from exc


def _profile(spec, where: str) -> Profile:
    try:
        if isinstance(spec, list):
            return Profile(tuple(_segment(s, f"{where}[{i}]") for i, s in enumerate(spec)))
        if not isinstance(spec, dict):
            raise ConfigError("profile must be a table or an array of segment tables", where)
        kind = str(_require(spec, "kind", where)).lower()
        if kind == "constant":
            return Profile.constant(_finite(_require(spec, "value", where), f"{where}.value"))
        if kind == "step":
            return Profile.step(
                _finite(_require(spec, "at", where), f"{where}.at"),
                _finite(_require(spec, "left", where), f"{where}.left"),
                _finite(_require(spec, "right", where), f"{where}.right"),
            )
        if kind == "arctan_window":
            return Profile.arctan_window(
                _finite(_require(spec, "center", where), f"{where}.center"),
                _finite(_require(spec, "offset", where), f"{where}.offset"),
                _finite(_require(spec, "half_width", where), f"{where}.half_width"),
            )
        if kind == "tabulated":
            seg = _segment(spec, where)
            return Profile.tabulated(seg.kind.knots)
        raise ConfigError(
            f"unknown profile kind {kind!r} (constant, step, arctan_window, tabulated)",
            f"{where}.kind",
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), where) from exc


def scenario_from_dict(data: dict) -> Scenario:
    name = str(_require(data, "name", ""))
    try:
        case = Case(str(_require(data, "case", "")).lower().replace("_", "-"))
    except ValueError:
        raise ConfigError(
            "case must be one of " + ", ".join(c.value for c in Case), "case"
        ) from None

    fl = _require(data, "flux", "")
    if not isinstance(fl, dict):
        raise ConfigError("flux must be a table with c and rho", "flux")
    try:
        flux = FluxParams(
            _finite(_require(fl, "c", "flux"), "flux.c"),
            _finite(_require(fl, "rho", "flux"), "flux.rho"),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), "flux") from exc

    x0 = _finite(data.get("x0", 0.0), "x0")
    if "profile" in data:
        profile = _profile(data["profile"], "profile")
    elif "left" in data and "right" in data:
        profile = Profile.join(_profile(data["left"], "left"), _profile(data["right"], "right"), x0)
    else:
        raise ConfigError("need either 'profile' or both 'left' and 'right'", "profile")

    snaps = data.get("t_snapshots", [1.0])
    if not isinstance(snaps, list) or not snaps:
        raise ConfigError("must be a non-empty list of times", "t_snapshots")
    snaps = [_finite(t, "t_snapshots") for t in snaps]
    if any(t < 0 for t in snaps):
        raise ConfigError("times must be non-negative", "t_snapshots")
    if any(b <= a for a, b in zip(snaps, snaps[1:])):
        raise ConfigError("times must be strictly increasing", "t_snapshots")

    dom = data.get("domain", "auto")
    if dom == "auto":
        domain = None
    elif isinstance(dom, list) and len(dom) == 2:
        domain = (_finite(dom[0], "domain"), _finite(dom[1], "domain"))
        if not domain[0] < domain[1]:
            raise ConfigError("need x_min < x_max", "domain")
    else:
        raise ConfigError("must be 'auto' or [x_min, x_max]", "domain")

    levels = data.get("refinement_levels", [100, 200, 400, 800])
    if not isinstance(levels, list) or not all(
        isinstance(n, int) and not isinstance(n, bool) and n >= 2 for n in levels
    ):
        raise ConfigError("must be a list of integers >= 2", "refinement_levels")
    if len(levels) < 3:
        raise ConfigError("a convergence study needs at least 3 levels", "refinement_levels")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ConfigError("cell counts must be strictly increasing", "refinement_levels")

    cfl = _finite(data.get("cfl", 0.9), "cfl")
    if not 0 < cfl <= 1:
        raise ConfigError("must lie in (0, 1]", "cfl")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigError("must be an unsigned 64-bit integer", "seed")

    checks = data.get("checks", {})
    if not isinstance(checks, dict):
        raise ConfigError("must be a table", "checks")
    min_order = checks.get("min_order")
    max_order = checks.get("max_order")
    min_order = None if min_order is None else _finite(min_order, "checks.min_order")
    max_order = None if max_order is None else _finite(max_order, "checks.max_order")

    cert = data.get("certifier", {})
    if not isinstance(cert, dict):
        raise ConfigError("must be a table", "certifier")
    k_lat = cert.get("k_lattice", "auto")
    if k_lat == "auto":
        k_lat = None
    elif isinstance(k_lat, list) and k_lat:
        k_lat = [_finite(k, "certifier.k_lattice") for k in k_lat]
    else:
        raise ConfigError("must be 'auto' or a non-empty list", "certifier.k_lattice")
    n_phi = cert.get("test_functions", 20)
    if not isinstance(n_phi, int) or isinstance(n_phi, bool) or n_phi < 1:
        raise ConfigError("must be a positive integer", "certifier.test_functions")
    copts = CertifierOptions(
        enabled=bool(cert.get("enabled", True)),
        k_lattice=k_lat,
        test_functions=n_phi,
        tolerance=_finite(cert.get("tolerance", 1e-6), "certifier.tolerance"),
        negative_control=bool(cert.get("negative_control", False)),
    )
    if copts.negative_control and case is not Case.UP:
        raise ConfigError("the negative control exists for up-crossing data only",
                          "certifier.negative_control")

    scn = Scenario(
        name=name,
        flux=flux,
        case=case,
        profile=profile,
        x0=x0,
        t_snapshots=snaps,
        domain=domain,
        refinement_levels=list(levels),
        cfl=cfl,
        seed=int(seed),
        min_order=min_order,
        max_order=max_order,
        certifier=copts,
        description=str(data.get("description", "")),
    )
    scn.solution()
    scn.resolved_domain()
    return scn


def list_fixtures() -> list[str]:
    root = resources.files("threshflux") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("threshflux") / "fixtures" / f"{name}.toml"))


def load_scenario(source: str | Path) -> Scenario:
    """Load a scenario from a TOML path or a bundled fixture name."""
    path = Path(source)
    if not path.exists():
        if str(source) in list_fixtures():
            path = fixture_path(str(source))
        else:
            raise ConfigError(f"no such file or bundled fixture: {source}")
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return scenario_from_dict(data)


# --------------------------------------------------------------------------
# running


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) if not isinstance(v, (int, np.integer)) else str(v) for v in r)
              for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


@dataclass
class ConvergenceRow:
    n_cells: int
    dx: float
    l1_error: float
    order: float  # NaN on the coarsest level


@dataclass
class RunReport:
    scenario: str
    checks: list = field(default_factory=list)
    files: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    certificate: KruzhkovReport | None = None
    negative: KruzhkovReport | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def _orders(levels, errors) -> list[float]:
    out = [math.nan]
    for (n1, e1), (n2, e2) in zip(zip(levels, errors), zip(levels[1:], errors[1:])):
        if e1 > 0 and e2 > 0:
            out.append(math.log(e1 / e2) / math.log(n2 / n1))
        else:
            out.append(math.inf if e2 == 0 else -math.inf)
    return out


def _fv_runs(s: Scenario, report: RunReport | None = None):
    """Solve every refinement level through every snapshot.

    Returns ``{n: {t: GridField}}`` and appends conservation, maximum
    principle and boundary checks to ``report``.
    """
    x_min, x_max = s.resolved_domain()
    out = {}
    worst_cons = worst_exc = worst_bdry = 0.0
    for n in s.refinement_levels:
        g0 = fv.project(s.profile, x_min, x_max, n)
        g = g0
        out[n] = {}
        for t in s.t_snapshots:
            g = fv.solve(fv.FvRun(s.flux, g, s.cfl, t))
            out[n][t] = g
            drift = abs(g.mass - g0.mass + g.boundary_flux) / max(1.0, abs(g0.mass))
            worst_cons = max(worst_cons, drift)
            worst_exc = max(worst_exc, g.max_excursion)
            worst_bdry = max(
                worst_bdry,
                abs(g.values[0] - g.left_tail),
                abs(g.values[-1] - g.right_tail),
            )
    if report is not None:
        report.checks.append(Check("discrete conservation", worst_cons <= CONSERVATION_RTOL,
                                   f"max relative drift {worst_cons:.2e}"))
        report.checks.append(Check("maximum principle", worst_exc <= BOUNDARY_TOL,
                                   f"max excursion {worst_exc:.2e}"))
        report.checks.append(Check("boundary cells at tail values", worst_bdry <= BOUNDARY_TOL,
                                   f"max deviation {worst_bdry:.2e}"))
    return out


def convergence_study(s: Scenario, runs=None, report: RunReport | None = None) -> dict:
    """L1 error of the FV field against the exact solution at each snapshot.

    Returns ``{t: [ConvergenceRow, ...]}``; orders are
    ``log(e_i / e_{i+1}) / log(n_{i+1} / n_i)``.
    """
    levels = s.refinement_levels
    if len(levels) < 3 or len(set(levels)) != len(levels):
        raise ConfigError("need at least 3 distinct refinement levels", "refinement_levels")
    if runs is None:
        runs = _fv_runs(s, report)
    sol = s.solution()
    tables = {}
    for t in s.t_snapshots:
        errs = [fv.l1_distance(runs[n][t], sol, t) for n in levels]
        orders = _orders(levels, errs)
        tables[t] = [
            ConvergenceRow(n, runs[n][t].dx, e, o) for n, e, o in zip(levels, errs, orders)
        ]
        if report is not None and t > 0:
            decreasing = all(b < a for a, b in zip(errs, errs[1:]))
            report.checks.append(Check(f"L1 error strictly decreasing (t={t:g})", decreasing,
                                       " > ".join(f"{e:.3e}" for e in errs)))
            ords = orders[1:]
            if s.min_order is not None:
                report.checks.append(Check(
                    f"empirical order >= {s.min_order:g} (t={t:g})",
                    all(o >= s.min_order for o in ords),
                    ", ".join(f"{o:.3f}" for o in ords)))
            if s.max_order is not None:
                report.checks.append(Check(
                    f"empirical order <= {s.max_order:g} (t={t:g})",
                    all(o <= s.max_order for o in ords),
                    ", ".join(f"{o:.3f}" for o in ords)))
    return tables


def run_certifier(s: Scenario, report: RunReport | None = None):
    sol = s.solution()
    ks = s.k_lattice()
    phis = s.phi_lattice()
    tol = s.certifier.tolerance
    cert = certify(sol, s.profile, s.flux, ks, phis, tol)
    neg = None
    if report is not None:
        report.certificate = cert
        report.checks.append(Check("kruzhkov certificate", cert.passed, cert.summary()))
    if s.certifier.negative_control:
        neg = certify(s.negative_control(), s.profile, s.flux, ks, phis, tol)
        if report is not None:
            report.negative = neg
            report.checks.append(Check("negative control rejected", not neg.passed, neg.summary()))
    return cert, neg


def _tlabel(t: float) -> str:
    return format(t, "g").replace("-", "m")


def write_outputs(s: Scenario, out_dir: Path, runs, tables, report: RunReport) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    sol = s.solution()
    finest = max(s.refinement_levels)
    for t in s.t_snapshots:
        xc = runs[finest][t].centers
        path = out_dir / f"exact_t{_tlabel(t)}.csv"
        _write_csv(path, ["x", "u_exact"], zip(xc, sol(xc, t)))
        report.files.append(path)
        for n in s.refinement_levels:
            g = runs[n][t]
            path = out_dir / f"fv_n{n}_t{_tlabel(t)}.csv"
            _write_csv(path, ["x", "u_fv"], zip(g.centers, g.values))
            report.files.append(path)
        path = out_dir / f"convergence_t{_tlabel(t)}.csv"
        _write_csv(path, ["n_cells", "dx", "l1_error", "order"],
                   ((r.n_cells, r.dx, r.l1_error, r.order) for r in tables[t]))
        report.files.append(path)
    if s.case is Case.UP:
        times = sorted(set(s.t_snapshots) | set(np.linspace(0.0, s.t_max, 11).tolist()))
        rows = []
        for t in times:
            xt = sol.fronts.x_of_t(t)
            rows.append((t, xt, sol.fronts.y_of_x(xt), sol.shock_curve(t)))
        path = out_dir / "fronts.csv"
        _write_csv(path, ["t", "x_t", "y_of_x_t", "shock"], rows)
        report.files.append(path)
    for label, cert in (("certificate", report.certificate), ("negative_control", report.negative)):
        if cert is not None:
            path = out_dir / f"{label}.csv"
            path.write_text(cert.to_csv(), encoding="utf-8")
            report.files.append(path)


def run_scenario(s: Scenario, out_dir: str | Path | None = None) -> RunReport:
    """Full pipeline: FV runs, convergence table, certificate and CSV output."""
    report = RunReport(s.name)
    runs = _fv_runs(s, report)
    tables = convergence_study(s, runs, report)
    report.tables = tables
    if s.certifier.enabled:
        run_certifier(s, report)
    if out_dir is not None:
        write_outputs(s, Path(out_dir), runs, tables, report)
    return report


__all__ = [
    "Case",
    "Check",
    "CertifierOptions",
    "ConvergenceRow",
    "RunReport",
    "Scenario",
    "ThreshfluxError",
    "convergence_study",
    "fixture_path",
    "list_fixtures",
    "load_scenario",
    "run_certifier",
    "run_scenario",
    "scenario_from_dict",
]
