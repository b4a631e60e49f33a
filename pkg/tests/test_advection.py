import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threshflux.advection import (
    AdvectionSolution,
    DownCrossSolution,
    advect,
    downcross_eval,
    plateau_interval,
)
from threshflux.errors import CrossingViolation, NegativeTime
from threshflux.flux import FluxParams
from threshflux.profiles import Profile

FP = FluxParams(1.0, 0.5)


def step_down(x0=0.0, fp=FP):
    return DownCrossSolution(fp, Profile.constant(2.0), Profile.constant(0.5), x0)


def ramp_down():
    w0 = Profile.tabulated([(-2.0, 2.5), (0.0, 1.5)])
    v0 = Profile.tabulated([(0.0, 0.8), (2.0, 0.2)])
    return DownCrossSolution(FP, w0, v0, 0.0)


class TestAdvect:
    def test_constant(self):
        assert advect(Profile.constant(3.0), 0.7, 0.0, 5.0) == 3.0

    def test_arctan(self):
        p = Profile.arctan_window(0.0, 1.0, 5.0)
        assert advect(p, 0.5, -1.0, 2.0) == 1.0

    def test_affine(self):
        p = Profile.affine_window(-10.0, 10.0, 1.0, 0.0)
        assert advect(p, 1.0, 2.0, 3.0) == 5.0

    def test_negative_time(self):
        with pytest.raises(NegativeTime):
            advect(Profile.constant(1.0), 0.5, 0.0, -1.0)

    def test_solution_speed(self):
        low = AdvectionSolution(FluxParams(4.0, 0.5), Profile.arctan_window(0.0, 2.0, 5.0))
        assert low.speed == 0.5
        high = AdvectionSolution(FluxParams(0.5, 0.5), Profile.arctan_window(0.0, 2.0, 5.0))
        assert high.speed == 1.0
        with pytest.raises(ValueError):
            AdvectionSolution(FP, Profile.step(0.0, 0.5, 1.5)).speed

    @settings(max_examples=50, deadline=None)
    @given(x=st.floats(-10, 10), t1=st.floats(0, 3), t2=st.floats(0, 3))
    def test_semigroup(self, x, t1, t2):
        p = Profile.arctan_window(0.3, 1.0, 4.0)
        rho = 0.5
        # pre-advecting by t1 is a shift of the profile by rho * t1
        shifted = lambda z: advect(p, rho, z, t1)  # noqa: E731
        direct = advect(p, rho, x, t1 + t2)
        assert abs(direct - shifted(x + rho * t2)) <= 1e-12


class TestDownCross:
    def test_plateau_point(self):
        assert downcross_eval(step_down(), -1.5, 2.0) == 1.0

    def test_left_flank(self):
        assert downcross_eval(step_down(), -3.0, 2.0) == 2.0

    def test_initial_condition(self):
        s = ramp_down()
        assert downcross_eval(s, 1.0, 0.0) == s.v0(1.0)
        xs = np.linspace(-4, 4, 81)
        xs = xs[xs != 0.0]
        assert np.array_equal(s(xs, 0.0), s.initial(xs))

    def test_closed_plateau_edges(self):
        s = step_down()
        assert s(-2.0, 2.0) == 1.0
        assert s(-1.0, 2.0) == 1.0

    def test_plateau_interval(self):
        assert plateau_interval(step_down(), 2.0) == (-2.0, -1.0)
        assert plateau_interval(step_down(), 0.0) == (0.0, 0.0)
        s = step_down(1.0, FluxParams(1.0, 0.25))
        assert plateau_interval(s, 4.0) == (-3.0, 0.0)

    def test_negative_time(self):
        with pytest.raises(NegativeTime):
            step_down()(0.0, -0.1)
        with pytest.raises(NegativeTime):
            plateau_interval(step_down(), -1.0)

    def test_rejects_up_crossing_parts(self):
        with pytest.raises(CrossingViolation):
            DownCrossSolution(FP, Profile.constant(0.5), Profile.constant(2.0), 0.0)

    @given(t=st.floats(0, 100), rho=st.floats(0.01, 0.99), x0=st.floats(-10, 10))
    def test_plateau_width(self, t, rho, x0):
        s = step_down(x0, FluxParams(1.0, rho))
        lo, hi = s.plateau_interval(t)
        assert hi - lo == pytest.approx((1 - rho) * t, abs=1e-12 * (1 + abs(x0) + t))

    def test_regime_preserved(self):
        s = ramp_down()
        rng = np.random.default_rng(5)
        for x, t in zip(rng.uniform(-6, 4, 1000), rng.uniform(0, 3, 1000)):
            lo, hi = s.plateau_interval(t)
            u = s(x, t)
            if x < lo:
                assert u > 1.0
            elif x > hi:
                assert u < 1.0
            else:
                assert u == 1.0

    def test_curves(self):
        s = ramp_down()
        lines = s.curves([1.0])
        assert lines[0](2.0) == -2.0 and lines[1](2.0) == -1.0
        assert all(math.isfinite(float(c(1.0))) for c in lines)
