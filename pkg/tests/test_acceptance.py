"""Acceptance criteria, each run at its stated tolerance.

Every test records one PASS/FAIL line that is printed in the terminal
summary, then asserts.
"""

import math
import time

import numpy as np

from threshflux import fv
from threshflux import scenario as sc
from threshflux.flux import FluxParams
from threshflux.profiles import Profile
from threshflux.upcross import UpCrossSolution

LEVELS = [100, 200, 400, 800]


def test_1_riemann_shock_speed(record):
    start = time.perf_counter()
    fp = FluxParams(1.0, 0.5)
    sol = UpCrossSolution.from_profiles(fp, Profile.constant(0.0), Profile.constant(2.0), 0.0)
    ts = np.linspace(0.0, 5.0, 51)
    curve_err = max(abs(sol.shock_curve(t) + 0.75 * t) for t in ts)
    n = 1000  # dx = 2.5 / 1000 = 1/400
    g = fv.solve(fv.FvRun(fp, fv.project(Profile.step(0.0, 0.0, 2.0), -2.0, 0.5, n), 0.9, 1.0))
    mid = fv.transition_midpoint(g, 0.0, 2.0)
    elapsed = time.perf_counter() - start
    ok = curve_err <= 1e-10 and abs(mid + 0.75) <= 2 * g.dx and elapsed < 5.0
    record(
        1,
        "Riemann shock speed",
        ok,
        f"|shock+0.75t| max {curve_err:.1e}, FV midpoint {mid:.5f} (|err| {abs(mid + 0.75):.2e}"
        f" <= {2 * g.dx:.4f}), {elapsed:.2f}s",
    )
    assert ok


def test_2_arctan_front_maps(record):
    start = time.perf_counter()
    x0, c, rho = 0.0, 2.0, 0.5
    p = Profile.arctan_window(x0, c, 3.0)
    v0, w0 = p.split(x0)
    fm = UpCrossSolution.from_profiles(FluxParams(c, rho), v0, w0, x0).fronts
    xs = np.linspace(x0, x0 + 2.9, 200)
    y_err = max(abs(fm.y_of_x(x) - (2 * x0 - x)) for x in xs)
    ts = np.linspace(0.0, 11.0, 200)
    x_err = max(abs(fm.x_of_t(t) - (x0 + (1 - rho) * t / 2)) for t in ts)
    elapsed = time.perf_counter() - start
    ok = y_err <= 1e-8 and x_err <= 1e-8 and elapsed < 1.0
    record(2, "arctan front maps", ok,
           f"max |y-(2x0-x)| {y_err:.1e}, max |x_t-(x0+(1-rho)t/2)| {x_err:.1e}, {elapsed:.2f}s")
    assert ok


def test_3_downcross_plateau(record):
    s = sc.load_scenario("plateau_downcross")
    sol = s.solution()
    t = 2.0
    lo, hi = sol.plateau_interval(t)
    xs = np.linspace(lo, hi, 10_001)
    plateau_exact = bool(np.all(sol(xs, t) == s.flux.c))
    x_min, x_max = s.resolved_domain()
    errs = []
    dxs = []
    for n in (200, 400, 800):
        g = fv.solve(fv.FvRun(s.flux, fv.project(s.profile, x_min, x_max, n), s.cfl, t))
        errs.append(fv.l1_distance(g, sol, t))
        dxs.append(g.dx)
    l1_at = errs[dxs.index(1 / 200)] if 1 / 200 in dxs else math.nan
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    ok = plateau_exact and l1_at <= 0.05 and decreasing
    record(3, "down-crossing plateau", ok,
           f"u == c on [{lo:g}, {hi:g}]: {plateau_exact}, L1 at dx=1/200 {l1_at:.4f} <= 0.05, "
           f"errors {', '.join(f'{e:.4f}' for e in errs)}")
    assert ok


def test_4_entropy_certification(record):
    start = time.perf_counter()
    lines = []
    ok = True
    for name in ("advection_arctan", "plateau_downcross", "arctan_upcross", "riemann_upcross"):
        s = sc.load_scenario(name)
        ks = s.k_lattice()
        phis = s.phi_lattice()
        report = sc.RunReport(name)
        cert, neg = sc.run_certifier(s, report)
        good = len(ks) >= 9 and len(phis) >= 20 and cert.passed
        good = good and bool(np.all(cert.residuals >= -1e-6 * cert.scales - cert.quadrature_estimate))
        lines.append(f"{name} {'PASS' if cert.passed else 'FAIL'} ({len(ks)}k x {len(phis)}phi, "
                     f"min/scale {cert.min_normalized:.1e})")
        if neg is not None:
            rejected = not neg.passed and neg.min_normalized <= -1e-3
            lines.append(f"{name} control {'FAIL' if not neg.passed else 'PASS'} "
                         f"(min/scale {neg.min_normalized:.1e})")
            good = good and rejected
        ok = ok and good
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 60.0
    record(4, "entropy certification", ok, "; ".join(lines) + f"; {elapsed:.1f}s")
    assert ok


def test_5_oracle_equivalence(record):
    lines = []
    ok = True
    for name in ("advection_arctan", "riemann_upcross", "arctan_upcross", "plateau_downcross"):
        s = sc.load_scenario(name)
        s.refinement_levels = LEVELS
        min_order = 0.8 if name.startswith("advection") else 0.5
        tables = sc.convergence_study(s)
        rows = tables[s.t_max]
        errs = [r.l1_error for r in rows]
        orders = [r.order for r in rows[1:]]
        good = all(b < a for a, b in zip(errs, errs[1:])) and all(o >= min_order for o in orders)
        ok = ok and good
        lines.append(f"{name} {'ok' if good else 'BELOW'} orders "
                     f"{', '.join(f'{o:.3f}' for o in orders)} (need >= {min_order})")
    record(5, "FV oracle convergence", ok, "; ".join(lines))
    assert ok


def test_6_structural_invariants(record):
    fp = FluxParams(1.0, 0.3)
    v0 = Profile.affine_window(-3.0, 0.0, 0.2, 0.7)
    w0 = Profile.tabulated([(0.0, 1.2), (1.0, 2.5), (2.5, 1.6), (4.0, 3.0)])
    sol = UpCrossSolution.from_profiles(fp, v0, w0, 0.0)
    fm = sol.fronts
    rng = np.random.default_rng(2024)

    match = 0.0
    for x in rng.uniform(0.0, 6.0, 1000):
        match = max(match, abs(fm.I_L(fm.y_of_x(x)) - fm.I_R(x)) / (1 + fm.I_R(x)))
    match_ok = match <= fm.inversion_tol

    xs = rng.uniform(-8.0, 6.0, 10_000)
    ts = rng.uniform(0.0, 5.0, 10_000)
    bad = 0
    for x, t in zip(xs, ts):
        if abs(x - sol.shock_curve(t)) <= 1e-6:
            continue
        xt = fm.x_of_t(t)
        left = x + fp.rho * t < fm.y_of_x(xt)
        right = xt < x + t
        bad += left == right
    part_ok = bad == 0

    fd = 0.0
    checked = 0
    for x in np.linspace(0.05, 6.0, 140):
        y = fm.y_of_x(x)
        if min(abs(x - b) for b in (1.0, 2.5, 4.0)) < 1e-3 or abs(y + 3.0) < 1e-3:
            continue
        h = 1e-5
        dy = (fm.y_of_x(x + h) - fm.y_of_x(x - h)) / (2 * h)
        dt = (fm.t_of_x(x + h) - fm.t_of_x(x - h)) / (2 * h)
        fd = max(fd, abs(dy / fm.dy_dx(x) - 1), abs(dt / fm.dt_dx(x) - 1))
        checked += 1
    fd_ok = fd <= 1e-5 and checked >= 100

    drift = 0.0
    for name in sc.list_fixtures():
        s = sc.load_scenario(name)
        x_min, x_max = s.resolved_domain()
        for n in s.refinement_levels:
            g0 = fv.project(s.profile, x_min, x_max, n)
            g = fv.solve(fv.FvRun(s.flux, g0, s.cfl, s.t_max))
            drift = max(drift, abs(g.mass - g0.mass + g.boundary_flux) / max(1.0, abs(g0.mass)))
    cons_ok = drift <= 1e-10

    ok = match_ok and part_ok and fd_ok and cons_ok
    record(6, "structural invariants", ok,
           f"matching {match:.1e}, partition violations {bad}/10^4, "
           f"y'/t' FD rel {fd:.1e} on {checked} pts, conservation drift {drift:.1e}")
    assert ok
