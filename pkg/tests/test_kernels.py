import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_bounds import kernels as K
from spectral_bounds.errors import DomainError
from spectral_bounds.models import GeometryInput, geometry_drift, weight

kappas = st.floats(-4.0, 4.0, allow_nan=False)


# -- documented values --------------------------------------------------------


@pytest.mark.parametrize("kappa, t, expected", [
    (0.0, 1.7, 0.0),
    (1.0, math.pi / 4, 1.0),
    (-1.0, 0.0, 0.0),
])
def test_t_kernel_values(kappa, t, expected):
    assert K.t_kernel(kappa, t) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("kappa, t, expected", [
    (1.0, 0.0, 1.0),
    (0.0, 5.0, 1.0),
    (-1.0, 1.0, math.cosh(1.0)),
])
def test_c_kernel_values(kappa, t, expected):
    assert K.c_kernel(kappa, t) == pytest.approx(expected, rel=1e-15)


def test_c_kernel_general_values():
    assert K.c_kernel_general(0.0, 0.7, 0.4) == pytest.approx(1 - 0.28, rel=1e-15)
    assert K.c_kernel_general(1.0, 0.0, math.pi / 3) == pytest.approx(0.5, rel=1e-14)
    assert K.c_kernel_general(-1.0, 1.0, 1.0) == pytest.approx(math.exp(-1), rel=1e-14)


def test_t_kernel_general_values():
    assert K.t_kernel_general(0.0, 0.5, 1.0) == pytest.approx(0.5 / (1 - 0.5), rel=1e-15)
    assert K.t_kernel_general(1.0, 0.0, math.pi / 4) == pytest.approx(1.0, rel=1e-14)
    for kappa in (-2.0, 0.0, 3.0):
        assert K.t_kernel_general(kappa, 0.3, 0.0) == pytest.approx(0.3, rel=1e-15)


def test_t_max_closed_forms():
    assert K.t_max(1.0) == pytest.approx(math.pi / 2)
    assert K.t_max(4.0) == pytest.approx(math.pi / 4)
    assert math.isinf(K.t_max(0.0)) and math.isinf(K.t_max(-3.0))
    assert K.t_max_general(0.0, 2.0) == pytest.approx(0.5)
    assert math.isinf(K.t_max_general(0.0, -1.0))
    assert math.isinf(K.t_max_general(-1.0, 0.5))
    # kappa = -1, Lambda = 2: cosh t - 2 sinh t = 0  <=>  tanh t = 1/2
    assert K.t_max_general(-1.0, 2.0) == pytest.approx(math.atanh(0.5), rel=1e-14)


@given(kappas, st.floats(-3.0, 3.0))
def test_t_max_general_is_first_zero(kappa, lam):
    tm = K.t_max_general(kappa, lam)
    if math.isinf(tm):
        t = np.linspace(0.0, 20.0, 2001)
        assert np.all(K.c_kernel_general(kappa, lam, t) > 0)
        return
    assert abs(K.c_kernel_general(kappa, lam, tm)) < 1e-9 * max(1.0, abs(lam) * tm)
    t = np.linspace(0.0, tm, 400, endpoint=False)
    assert np.all(K.c_kernel_general(kappa, lam, t) > 0)


def test_domain_errors():
    with pytest.raises(DomainError):
        K.t_kernel(1.0, math.pi / 2)
    with pytest.raises(DomainError):
        K.t_kernel(1.0, 2.0)
    with pytest.raises(DomainError):
        K.t_kernel_general(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        K.c_kernel(math.nan, 0.1)
    with pytest.raises(DomainError):
        K.t_kernel(1.0, math.inf)


def test_vectorized_and_scalar():
    t = np.linspace(0, 1, 5)
    v = K.t_kernel(1.0, t)
    assert isinstance(v, np.ndarray) and v.shape == t.shape
    assert isinstance(K.t_kernel(1.0, 0.5), float)


# -- properties ---------------------------------------------------------------


@given(kappas, st.floats(0.0, 0.999))
def test_oddness(kappa, frac):
    tm = K.t_max(kappa)
    t = frac * (tm if math.isfinite(tm) else 3.0)
    assert K.t_kernel(kappa, -t) == -K.t_kernel(kappa, t)


@pytest.mark.parametrize("kappa", [-2.0, -0.3, 0.0, 1e-9, 0.5, 1.0, 3.0])
def test_ode_identity(kappa):
    tm = K.t_max(kappa)
    top = 0.95 * tm if math.isfinite(tm) else 2.0
    t = np.linspace(0.01, top, 200)
    h = 1e-5
    dc = (K.c_kernel(kappa, t + h) - K.c_kernel(kappa, t - h)) / (2 * h)
    resid = np.abs(dc + K.t_kernel(kappa, t) * K.c_kernel(kappa, t))
    # central-difference truncation h^2/6 |c'''| plus rounding eps/h
    c = np.abs(K.c_kernel(kappa, t))
    bracket = h ** 2 / 6 * (abs(kappa) ** 1.5 * np.cosh(math.sqrt(abs(kappa)) * t) + 1) \
        + 4 * np.finfo(float).eps * c / h
    assert np.all(resid <= 1e-12 + bracket)


@given(st.floats(-1e-4, 1e-4))
def test_small_kappa_continuity(kappa):
    assert abs(K.t_kernel(kappa, 1.0) - kappa) <= kappa ** 2 * 1.0


@given(kappas, st.floats(0.0, 0.99))
def test_general_reduces_to_special(kappa, frac):
    tm = K.t_max(kappa)
    t = frac * (tm if math.isfinite(tm) else 4.0)
    special = K.t_kernel(kappa, t)
    assert abs(K.t_kernel_general(kappa, 0.0, t) - special) <= 1e-13 * max(1.0, abs(special))
    assert K.c_kernel_general(kappa, 0.0, t) == pytest.approx(K.c_kernel(kappa, t), rel=1e-13)


@given(kappas, st.floats(-2.0, 2.0), st.floats(0.0, 0.95))
def test_general_kernel_is_log_derivative(kappa, lam, frac):
    t = frac * min(K.t_max_general(kappa, lam), 3.0)
    h = 1e-6
    lo = max(t - h, 0.0)
    dc = (K.c_kernel_general(kappa, lam, t + h) - K.c_kernel_general(kappa, lam, lo)) / (t + h - lo)
    c = K.c_kernel_general(kappa, lam, t)
    expected = -dc / c
    got = K.t_kernel_general(kappa, lam, t)
    assert got == pytest.approx(expected, rel=1e-4, abs=1e-4)


# -- weights ------------------------------------------------------------------


def test_weight_values():
    qk_flat = geometry_drift(GeometryInput("qk", 3, 0.0))
    assert weight(qk_flat, 0.7) == 1.0
    riem = geometry_drift(GeometryInput("riemannian", 3, 1.0))
    assert weight(riem, math.pi / 3) == pytest.approx(0.25, rel=1e-14)
    qk = geometry_drift(GeometryInput("qk", 2, 1.0))
    direct = math.cos(math.pi / 8) ** 4 * math.cos(math.pi / 4) ** 3
    assert weight(qk, math.pi / 8) == pytest.approx(direct, rel=1e-14)
    assert direct == pytest.approx(0.257582, abs=1e-6)


def test_weight_outside_domain():
    qk = geometry_drift(GeometryInput("qk", 2, 1.0))
    with pytest.raises(DomainError):
        weight(qk, math.pi / 4)


@pytest.mark.parametrize("g", [
    GeometryInput("riemannian", 4, -1.0),
    GeometryInput("kahler", 3, 1.0, kappa2=0.25),
    GeometryInput("qk", 2, 0.5),
    GeometryInput("qk", 3, -0.5),
])
def test_weight_log_derivative(g):
    drift = geometry_drift(g)
    tm = drift.t_max
    top = 0.9 * tm if math.isfinite(tm) else 2.0
    t = np.linspace(-top, top, 101)
    h = 1e-5
    logd = (np.log(drift.weight(t + h)) - np.log(drift.weight(t - h))) / (2 * h)
    assert np.max(np.abs(logd + drift(t))) < 1e-6 * max(1.0, float(np.max(np.abs(drift(t)))))


def test_boundary_adjusted_weight():
    g = GeometryInput("qk", 2, 1.0, inradius=0.3, convexity=0.5)
    drift = geometry_drift(g, g.convexity)
    t = np.linspace(0.01, 0.9 * drift.t_max, 50)
    h = 1e-6
    logd = (np.log(drift.weight(t + h)) - np.log(drift.weight(t - h))) / (2 * h)
    assert np.max(np.abs(logd + drift(t))) < 1e-5
    with pytest.raises(DomainError):
        drift.weight(-0.1)


@settings(max_examples=50)
@given(st.floats(0.0, 3.0), st.floats(0.0, 0.98))
def test_weight_positive(kappa, frac):
    drift = geometry_drift(GeometryInput("qk", 2, kappa))
    tm = drift.t_max
    t = frac * (tm if math.isfinite(tm) else 5.0)
    assert drift.weight(t) > 0
