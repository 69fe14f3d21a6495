import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfspace_nls.closed_form import (
    Params,
    Trichotomy,
    boundary_shift,
    critical_threshold,
    first_integral,
    first_integral_criterion,
    homoclinic,
    profiles,
)
from halfspace_nls.errors import ParameterError, ThresholdError

PS = (1.5, 2.0, 3.0, 5.0)
exponents = st.floats(min_value=1.05, max_value=9.0)
fractions = st.floats(min_value=0.01, max_value=0.999)


def test_threshold_values():
    assert critical_threshold(3) == pytest.approx(math.sqrt(2), abs=1e-14)
    assert critical_threshold(5) == pytest.approx(3**0.25, rel=1e-14)
    near_one = [critical_threshold(p) for p in (1.01, 1.001)]
    assert near_one[0] < near_one[1] < math.sqrt(math.e)
    assert abs(near_one[1] - math.sqrt(math.e)) < 1e-3


@pytest.mark.parametrize("p", [1.0, 0.5, -2.0, float("nan")])
def test_rejects_bad_exponent(p):
    with pytest.raises(ParameterError):
        critical_threshold(p)


@given(exponents)
def test_threshold_range(p):
    assert 1 < critical_threshold(p) < math.sqrt(math.e)


def test_homoclinic_examples():
    v, d = homoclinic(0.0, 3)
    assert v == pytest.approx(math.sqrt(2)) and d == 0.0
    v10, _ = homoclinic(10.0, 3)
    assert v10 == pytest.approx(2 * math.sqrt(2) * math.exp(-10), rel=1e-2)


def test_homoclinic_large_argument_is_finite():
    v, d = homoclinic(np.array([-700.0, 700.0]), 3)
    assert np.all(np.isfinite(v)) and np.all(v >= 0) and np.all(np.isfinite(d))


@pytest.mark.parametrize("p", PS)
def test_homoclinic_solves_ode(p):
    t = np.linspace(-3, 3, 13)
    h = 1e-4
    w = homoclinic(t, p)[0]
    wpp = (homoclinic(t + h, p)[0] - 2 * w + homoclinic(t - h, p)[0]) / h**2
    assert np.max(np.abs(-wpp + w - w**p)) < 1e-6


@pytest.mark.parametrize("p", PS)
def test_fd_residual_second_order(p):
    t = np.linspace(-5, 5, 41)
    errs = []
    for h in (0.02, 0.01):
        w = homoclinic(t, p)[0]
        wpp = (homoclinic(t + h, p)[0] - 2 * w + homoclinic(t - h, p)[0]) / h**2
        errs.append(np.max(np.abs(-wpp + w - w**p)))
    assert 3.6 < errs[0] / errs[1] < 4.4


@given(exponents)
def test_derivative_matches_difference(p):
    t = np.linspace(-4, 4, 17)
    h = 1e-6
    fd = (homoclinic(t + h, p)[0] - homoclinic(t - h, p)[0]) / (2 * h)
    assert np.allclose(homoclinic(t, p)[1], fd, atol=1e-7)


def test_boundary_shift_examples():
    assert boundary_shift(math.sqrt(2), 3) == 0.0
    assert boundary_shift(1.0, 3) == pytest.approx(math.log(math.sqrt(2) + 1), rel=1e-12)
    assert homoclinic(0.8813736, 3)[0] == pytest.approx(1.0, abs=1e-7)
    with pytest.raises(ThresholdError):
        boundary_shift(1.5, 3)


@pytest.mark.parametrize("p", PS)
def test_shift_hits_boundary_value(p):
    cp = critical_threshold(p)
    for c in (0.1, 0.5, 0.9 * cp, cp):
        t = boundary_shift(c, p)
        assert abs(homoclinic(t, p)[0] - c) <= 1e-12
        assert abs(homoclinic(-t, p)[0] - c) <= 1e-12


@settings(max_examples=60)
@given(exponents, fractions)
def test_shift_property(p, frac):
    c = frac * critical_threshold(p)
    t = boundary_shift(c, p)
    assert t > 0
    assert homoclinic(t, p)[0] == pytest.approx(c, rel=1e-11)


def test_profiles_example():
    prof = profiles(1.0, 3)
    assert prof.u_c(0.0) == pytest.approx(1.0, abs=1e-14)
    assert prof.u_c_tilde(0.0) == pytest.approx(1.0, abs=1e-14)
    assert prof.m1 == pytest.approx(2 - math.sqrt(2), rel=1e-12)
    assert prof.m2 == pytest.approx(2 * (2 - math.sqrt(2)), rel=1e-12)
    s = np.array([0.0, 1.0, 5.0, 10.0])
    scaled = prof.u_c(s) * np.exp(s)
    assert np.all(scaled >= prof.m1 - 1e-14) and np.all(scaled <= prof.m2 + 1e-14)
    assert prof.u_c_tilde(prof.t_shift) == pytest.approx(math.sqrt(2))


@settings(max_examples=40)
@given(exponents, fractions)
def test_profile_monotonicity_and_bounds(p, frac):
    prof = profiles(frac * critical_threshold(p), p)
    s = np.linspace(0, 15, 301)
    u = prof.u_c(s)
    assert np.all(np.diff(u) < 0)
    assert np.all((u >= 0) & (u <= prof.c_p))
    tilde = prof.u_c_tilde(s)
    rising = s <= prof.t_shift
    assert np.all(np.diff(tilde[rising]) > 0)
    assert np.all(np.diff(tilde[s >= prof.t_shift]) < 0)
    scaled = u * np.exp(s)
    assert np.all(scaled >= prof.m1 * (1 - 1e-12)) and np.all(scaled <= prof.m2 * (1 + 1e-12))


def test_first_integral_examples():
    assert first_integral_criterion(math.sqrt(2), 3)[1] is Trichotomy.ONE_SOLUTION
    val, flag = first_integral_criterion(1.0, 3)
    assert val == pytest.approx(0.5) and flag is Trichotomy.TWO_SOLUTIONS
    val, flag = first_integral_criterion(1.6, 3)
    assert val == pytest.approx(2.56 - 3.2768) and flag is Trichotomy.NO_SOLUTION


def test_first_integral_matches_trajectory():
    # the decaying profile with boundary value 1 has slope^2 = I(1)
    prof = profiles(1.0, 3)
    assert prof.u_c_prime(0.0) ** 2 == pytest.approx(first_integral(1.0, 3), rel=1e-12)


@given(exponents, st.floats(min_value=0.01, max_value=1.99))
def test_sign_of_first_integral(p, frac):
    c = frac * critical_threshold(p)
    val, flag = first_integral_criterion(c, p)
    if frac < 1 - 1e-9:
        assert val > 0 and flag is Trichotomy.TWO_SOLUTIONS
    elif frac > 1 + 1e-9:
        assert val < 0 and flag is Trichotomy.NO_SOLUTION


def test_params_validation():
    assert Params(3, 1).subthreshold
    assert not Params(3, 1.5).subthreshold
    with pytest.raises(ParameterError):
        Params(3, 0.0)
    with pytest.raises(ParameterError):
        Params(1.0, 1.0)
