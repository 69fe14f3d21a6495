import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfspace_nls.closed_form import homoclinic
from halfspace_nls.errors import ParameterError, SupportOverflowError
from halfspace_nls.grid import Grid2D, lp_norm
from halfspace_nls.ground_state import (
    ball_integral,
    bump_test_function,
    decay_slope,
    endpoint_scale,
    energy_direct,
    epsilon,
    ground_level,
    nehari_defect,
    radial_ground_state,
    verify_energy_estimates,
)
from halfspace_nls.nonlinearity import NonlinearityCtx


@pytest.fixture(scope="module")
def gs1():
    return radial_ground_state(3.0, 1)


def test_line_case_reproduces_homoclinic(gs1):
    r = np.linspace(0, 20, 2001)
    exact, _ = homoclinic(r, 3.0)
    assert np.max(np.abs(gs1(r) - exact)) < 1e-7
    # on the line the level is (p-1)/(2(p+1)) int w0^4 = 4/3
    assert ground_level(gs1) == pytest.approx(4 / 3, abs=1e-7)


@pytest.mark.parametrize("p", [2.0, 5.0])
def test_line_case_other_exponents(p):
    gs = radial_ground_state(p, 1)
    r = np.linspace(0, 15, 301)
    assert np.max(np.abs(gs(r) - homoclinic(r, p)[0])) < 1e-7


def test_planar_ground_state(gs2):
    assert gs2.psi0 == pytest.approx(2.2062, abs=1e-4)
    assert nehari_defect(gs2) < 1e-5
    assert abs(decay_slope(gs2)) < 0.01
    assert energy_direct(gs2) == pytest.approx(ground_level(gs2), rel=1e-5)
    assert np.all(np.diff(gs2.psi) < 0)
    assert np.all(gs2.psi > 0)
    assert gs2.derivative(0.0) == pytest.approx(0.0, abs=1e-12)


def test_tail_continuation(gs2):
    r = np.array([30.0, 35.0, 40.0])
    vals = gs2(r)
    assert np.all(np.diff(vals) < 0) and np.all(vals > 0)
    ratio = vals[1] / vals[0]
    assert ratio == pytest.approx(math.exp(-5) * math.sqrt(30 / 35), rel=1e-2)
    assert gs2(gs2.R_max) == pytest.approx(gs2.psi[-1], rel=1e-10)


def test_spacing_stability(gs2):
    coarse = radial_ground_state(3.0, 2, drho=2e-3)
    assert coarse.psi0 == pytest.approx(gs2.psi0, rel=1e-7)
    assert ground_level(coarse) == pytest.approx(ground_level(gs2), rel=1e-6)


@pytest.mark.parametrize("p", [2.0, 5.0])
def test_nehari_other_exponents(p):
    gs = radial_ground_state(p, 2)
    assert nehari_defect(gs) < 1e-5
    assert abs(decay_slope(gs)) < 0.01


def test_rejections():
    with pytest.raises(ParameterError):
        radial_ground_state(1.0)
    with pytest.raises(ParameterError):
        radial_ground_state(3.0, N=3)
    with pytest.raises(ParameterError):
        radial_ground_state(3.0, R_max=10.0)


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=2.0, max_value=25.0))
def test_epsilon_bound(gs2, r):
    # psi(r) <= C rho^-(N-1)/2 e^-r with the fitted constant, up to a small slack
    assert 0 < epsilon(gs2, r) <= 1.05 * gs2.C_fit * r**-0.5 * math.exp(-r)


def test_bump_properties(gs2):
    grid = Grid2D(16.0, 24.0, 0.125)
    psi_r, eps = bump_test_function(gs2, 10.0, grid)
    X1, X2 = grid.mesh()
    dist = np.hypot(X1, X2 - 10.0)
    assert np.all(psi_r.values >= 0)
    assert np.all(psi_r.values[dist >= 10.0] == 0)
    assert np.array_equal(psi_r.values, psi_r.mirrored().values)
    assert psi_r.values.max() == pytest.approx(gs2.psi0 - eps, abs=1e-2)


def test_bump_norm_grows_with_r(gs2):
    grid = Grid2D(16.0, 32.0, 0.125)
    norms = [lp_norm(bump_test_function(gs2, r, grid)[0], 4.0) for r in (4, 8, 12, 16)]
    assert np.all(np.diff(norms) > 0)
    limit = (ball_integral(gs2, lambda s: s**4, 30.0)) ** 0.25
    assert norms[-1] == pytest.approx(limit, rel=1e-3)


def test_bump_support_overflow(gs2):
    with pytest.raises(SupportOverflowError):
        bump_test_function(gs2, 13.0, Grid2D(24.0, 24.0, 0.25))
    with pytest.raises(SupportOverflowError):
        bump_test_function(gs2, 9.0, Grid2D(8.0, 24.0, 0.25))


def test_endpoint_scale(gs2):
    k = endpoint_scale(gs2)
    assert endpoint_scale(gs2, safety=1.0) * 1.1 == pytest.approx(k)
    assert 8 < k < 10


def test_energy_estimates_on_small_grid(gs2, ctx31):
    rep = verify_energy_estimates(gs2, ctx31, Grid2D(16.0, 32.0, 0.25), nt=50)
    assert rep.passed, rep.failures
    assert set(rep.max_energy) == {"8", "10", "12", "14"}
    assert all(v < 0 for v in rep.endpoint_energy.values())
    assert all(m > 0 for m in rep.level_margin.values())
    with pytest.raises(ParameterError):
        verify_energy_estimates(gs2, ctx31, Grid2D(16.0, 32.0, 0.25), nt=10)


def test_ctx_is_independent_of_profile_choice():
    assert NonlinearityCtx(3.0, 1.0) == NonlinearityCtx(3.0, 1.0)
