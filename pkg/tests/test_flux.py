import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import threshold_flux
from threshflux.errors import DegenerateJump
from threshflux.flux import FluxParams, flux, flux_slope, godunov_flux, rankine_hugoniot_speed

FP = FluxParams(1.0, 0.5)
params = st.builds(
    FluxParams,
    c=st.floats(0.01, 10),
    rho=st.floats(0.01, 0.99),
)


def test_values():
    assert flux(FP, 0.0) == 0.0
    assert flux(FP, 1.0) == -0.5
    assert (1 - 0.5) * 1.0 - 1.0 == -0.5
    assert flux(FP, 1.5) == -1.0


def test_vectorised():
    ys = np.linspace(-1, 3, 41)
    assert np.array_equal(flux(FP, ys), [threshold_flux(1.0, 0.5, y) for y in ys])


def test_slope():
    fp = FluxParams(1.0, 0.3)
    assert flux_slope(fp, 0.5) == -0.3
    assert flux_slope(fp, 2.0) == -1.0
    assert flux_slope(fp, 1.0) == -1.0


def test_rankine_hugoniot():
    assert rankine_hugoniot_speed(FP, 0.0, 2.0) == -0.75
    # same number from the front-speed coefficient 1 - (c-uL)/(uR-uL)(1-rho)
    assert -(1 - (1.0 - 0.0) / (2.0 - 0.0) * (1 - 0.5)) == -0.75
    assert rankine_hugoniot_speed(FP, 0.2, 0.4) == pytest.approx(-0.5)
    assert rankine_hugoniot_speed(FP, 2.0, 3.0) == pytest.approx(-1.0)
    with pytest.raises(DegenerateJump):
        rankine_hugoniot_speed(FP, 1.0, 1.0)


def test_godunov():
    assert godunov_flux(FP, 7.0, 0.0) == 0.0
    # flux(2) = (1 - 0.5) - 2
    assert godunov_flux(FP, 0.0, 2.0) == -1.5
    assert godunov_flux(FP, 1.0, 1.0) == -0.5


@pytest.mark.parametrize("c, rho", [(0.0, 0.5), (-1.0, 0.5), (1.0, 0.0), (1.0, 1.0), (1.0, 1.5)])
def test_invalid_params(c, rho):
    with pytest.raises(ValueError):
        FluxParams(c, rho)


@given(fp=params, eps=st.floats(1e-9, 1.0))
def test_continuity(fp, eps):
    assert abs(flux(fp, fp.c - eps) - flux(fp, fp.c + eps)) <= 2 * eps * (1 + 1e-12)


@given(fp=params, y=st.lists(st.floats(-20, 20), min_size=2, max_size=2, unique=True))
def test_strictly_decreasing(fp, y):
    y1, y2 = sorted(y)
    assert flux(fp, y1) > flux(fp, y2)


def test_strictly_decreasing_bulk():
    rng = np.random.default_rng(1)
    y = np.sort(rng.uniform(-5, 5, (10_000, 2)), axis=1)
    y = y[y[:, 0] < y[:, 1]]
    assert np.all(flux(FP, y[:, 0]) > flux(FP, y[:, 1]))


@given(fp=params, y=st.lists(st.floats(-20, 20), min_size=2, max_size=2, unique=True))
def test_speed_sandwich(fp, y):
    s = rankine_hugoniot_speed(fp, y[0], y[1])
    assert -1 - 1e-9 <= s <= -fp.rho + 1e-9


@given(fp=params, u=st.floats(-20, 20))
def test_godunov_consistent(fp, u):
    assert godunov_flux(fp, u, u) == flux(fp, u)
