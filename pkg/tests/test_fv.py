import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threshflux import _fvpython, fv
from threshflux.advection import AdvectionSolution
from threshflux.errors import CflViolation, TailNotConstant
from threshflux.flux import FluxParams, godunov_flux
from threshflux.profiles import Profile
from threshflux.upcross import UpCrossSolution

FP = FluxParams(1.0, 0.5)

try:
    from threshflux import _fvkernel
except ImportError:  # pragma: no cover
    _fvkernel = None


class TestProject:
    def test_constant(self):
        g = fv.project(Profile.constant(2.0), -1.0, 1.0, 10)
        assert np.all(g.values == 2.0)
        assert g.left_tail == g.right_tail == 2.0

    def test_step_on_face(self):
        g = fv.project(Profile.step(0.0, 0.0, 1.0), -1.0, 1.0, 10)
        assert np.array_equal(g.values, [0.0] * 5 + [1.0] * 5)

    def test_step_mid_cell(self):
        g = fv.project(Profile.step(0.05, 0.0, 1.0), -1.0, 1.0, 10)
        # cell [0, 0.2] holds 0.15 of value 1
        assert g.values[5] == pytest.approx(0.75, abs=1e-15)

    def test_tails_must_be_covered(self):
        with pytest.raises(TailNotConstant):
            fv.project(Profile.arctan_window(0.0, 1.0, 3.0), -1.0, 1.0, 10)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            fv.project(Profile.constant(1.0), 1.0, 0.0, 10)
        with pytest.raises(ValueError):
            fv.project(Profile.constant(1.0), 0.0, 1.0, 1)


class TestStep:
    def test_uniform_unchanged(self):
        g = fv.project(Profile.constant(0.7), 0.0, 1.0, 20)
        out = fv.step(fv.FvRun(FP, g))
        assert np.array_equal(out.values, g.values)

    def test_matches_flux_formula(self):
        rng = np.random.default_rng(4)
        u = rng.uniform(0, 2, 30)
        g = fv.GridField(0.0, 3.0, u, 0.0, 1.3)
        run = fv.FvRun(FP, g, cfl=0.8)
        out = fv.step(run)
        right = np.append(u[1:], 1.3)
        F = np.array([godunov_flux(FP, a, b) for a, b in zip(u, right)])
        Fl = np.concatenate([[godunov_flux(FP, u[0], u[0])], F[:-1]])
        want = u - run.dt / g.dx * (F - Fl)
        assert np.allclose(out.values, want, atol=1e-15)

    def test_cfl(self):
        g = fv.project(Profile.constant(0.7), 0.0, 1.0, 10)
        with pytest.raises(CflViolation):
            fv.FvRun(FP, g, cfl=1.5)
        with pytest.raises(CflViolation):
            fv.FvRun(FP, g, cfl=0.0)
        with pytest.raises(CflViolation):
            fv.step(fv.FvRun(FP, g), dt=0.2)

    def test_below_threshold_is_advection(self):
        fp = FluxParams(4.0, 0.5)
        p = Profile.arctan_window(0.0, 2.0, 5.0)
        exact = AdvectionSolution(fp, p)
        errs = []
        for n in (200, 400):
            g = fv.solve(fv.FvRun(fp, fv.project(p, -8.0, 6.0, n), 0.9, 2.0))
            errs.append(fv.l1_distance(g, exact, 2.0))
        assert errs[1] < errs[0] < 14.0 / 200 * 2
        assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.1)

    def test_riemann_front_speed(self):
        n = 1000  # dx = 1/400
        g = fv.solve(fv.FvRun(FP, fv.project(Profile.step(0.0, 0.0, 2.0), -2.0, 0.5, n), 0.9, 1.0))
        mid = fv.transition_midpoint(g, 0.0, 2.0)
        assert abs(mid + 0.75) <= 2 * g.dx


class TestSolve:
    def test_t_end_zero(self):
        g = fv.project(Profile.step(0.0, 0.0, 2.0), -2.0, 0.5, 50)
        out = fv.solve(fv.FvRun(FP, g, 0.9, 0.0))
        assert np.array_equal(out.values, g.values) and out.t == 0.0

    def test_lands_on_t_end(self):
        g = fv.project(Profile.step(0.0, 0.0, 2.0), -2.0, 0.5, 50)
        out = fv.solve(fv.FvRun(FP, g, 0.9, 0.777))
        assert out.t == pytest.approx(0.777, abs=1e-14)

    def test_plateau_emerges(self):
        p = Profile.step(0.0, 2.0, 0.5)
        g = fv.solve(fv.FvRun(FP, fv.project(p, -3.0, 1.0, 800), 0.9, 2.0))
        x = g.centers
        interior = (x > -2.0 + 0.3) & (x < -1.0 - 0.3)
        assert np.max(np.abs(g.values[interior] - 1.0)) <= 0.05

    def test_arctan_upcross_converges(self):
        p = Profile.arctan_window(0.0, 2.0, 3.0)
        v0, w0 = p.split(0.0)
        exact = UpCrossSolution.from_profiles(FluxParams(2.0, 0.5), v0, w0, 0.0)
        errs = [
            fv.l1_distance(
                fv.solve(fv.FvRun(exact.flux, fv.project(p, -5.0, 3.5, n), 0.9, 1.0)), exact, 1.0
            )
            for n in (100, 200, 400)
        ]
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(orders >= 0.5)


class TestL1:
    def test_projection_at_t0(self):
        p = Profile.arctan_window(0.0, 1.0, 2.0)
        g = fv.project(p, -3.0, 3.0, 60)
        assert fv.l1_distance(g, lambda x, t: p(x), 0.0) <= 1e-8

    def test_nonnegative(self):
        g = fv.project(Profile.step(0.0, 0.0, 2.0), -1.0, 1.0, 20)
        assert fv.l1_distance(g, lambda x, t: np.zeros_like(x), 0.0) >= 0.0
        assert fv.l1_distance(g, lambda x, t: np.full_like(x, 5.0), 0.0) >= 0.0


@pytest.mark.skipif(_fvkernel is None, reason="compiled kernel not built")
class TestBackends:
    def test_same_answer(self):
        rng = np.random.default_rng(9)
        u = rng.uniform(0, 3, 257)
        a, b = u.copy(), u.copy()
        ra = _fvpython.advance(a, 1.7, 1.0, 0.4, 0.9, 123, 0.35, 0.0, 3.0)
        rb = _fvkernel.advance(b, 1.7, 1.0, 0.4, 0.9, 123, 0.35, 0.0, 3.0)
        assert np.allclose(a, b, rtol=0, atol=1e-13)
        assert ra[0] == pytest.approx(rb[0], abs=1e-12)
        assert ra[1] == pytest.approx(rb[1], abs=1e-13)

    def test_env_override(self):
        code = "from threshflux import _backend; print(_backend.BACKEND)"
        env = dict(os.environ, THRESHFLUX_BACKEND="python")
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
        assert out.stdout.strip() == "python"
        env.pop("THRESHFLUX_BACKEND")
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
        assert out.stdout.strip() == "cython"


data = st.lists(st.floats(0.0, 3.0), min_size=4, max_size=40)


@settings(max_examples=60, deadline=None)
@given(u=data, tail=st.floats(0.0, 3.0), cfl=st.floats(0.05, 1.0), steps=st.integers(1, 40))
def test_conservation_and_maximum_principle(u, tail, cfl, steps):
    g = fv.GridField(0.0, 1.0, np.array(u), u[0], tail)
    run = fv.FvRun(FP, g, cfl, steps * cfl * g.dx * 0.999)
    out = fv.solve(run)
    drift = abs(out.mass - g.mass + out.boundary_flux)
    assert drift <= 1e-10 * max(1.0, abs(g.mass))
    assert out.max_excursion <= 1e-12
    assert out.values.min() >= g.bounds[0] - 1e-12
    assert out.values.max() <= g.bounds[1] + 1e-12
