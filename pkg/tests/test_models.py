import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectral_bounds.errors import DomainError, InvalidGeometryError
from spectral_bounds.models import (DIRICHLET_NEUMANN, SYMMETRIC_NEUMANN, ComparisonProblem,
                                    DriftSpec, DriftTerm, GeometryInput, dirichlet_problem,
                                    generalized_problem, geometry_drift, laplace_comparison_rhs,
                                    neumann_problem, singular_diameter)


def test_flat_riemannian_neumann():
    p = neumann_problem(GeometryInput("riemannian", 5, 0.0, diameter=2.0))
    assert p.interval == (-1.0, 1.0) and p.bc == SYMMETRIC_NEUMANN
    t = np.linspace(-0.9, 0.9, 7)
    assert np.all(p.drift(t) == 0)


def test_qk_neumann_drift():
    p = neumann_problem(GeometryInput("qk", 2, 1.0, diameter=1.0))
    t = np.linspace(-0.49, 0.49, 41)
    np.testing.assert_allclose(p.drift(t), 4 * np.tan(t) + 6 * np.tan(2 * t), rtol=1e-13)
    assert p.interval == (-0.5, 0.5)


def test_kahler_neumann_drift():
    p = neumann_problem(GeometryInput("kahler", 3, 1.0, kappa2=0.0, diameter=1.0))
    t = np.linspace(-0.49, 0.49, 41)
    np.testing.assert_allclose(p.drift(t), 2 * np.tan(2 * t), rtol=1e-13, atol=1e-15)


def test_dirichlet_examples():
    p = dirichlet_problem(GeometryInput("riemannian", 2, 0.0, inradius=1.0, convexity=0.0))
    assert p.bc == DIRICHLET_NEUMANN and p.interval == (0.0, 1.0)
    assert np.all(p.drift(np.linspace(0, 0.9, 5)) == 0)
    p = dirichlet_problem(GeometryInput("qk", 2, 1.0, inradius=0.4, convexity=0.0))
    t = np.linspace(0, 0.4, 9)
    np.testing.assert_allclose(p.drift(t), 4 * np.tan(t) + 6 * np.tan(2 * t), rtol=1e-13)
    p = dirichlet_problem(GeometryInput("riemannian", 3, 0.0, inradius=0.5, convexity=1.0))
    t = np.linspace(0, 0.49, 9)
    np.testing.assert_allclose(p.drift(t), 2 / (1 - t), rtol=1e-13)


def test_generalized_specializations():
    t = np.linspace(-0.45, 0.45, 91)
    for m in (2, 3, 4):
        for kappa in (0.0, 0.3, 1.0):
            g = generalized_problem(2, 3, m, kappa, kappa, 1.0).drift
            q = neumann_problem(GeometryInput("qk", m, kappa, diameter=1.0)).drift
            assert np.max(np.abs(g(t) - q(t))) <= 1e-15 * max(1, np.max(np.abs(q(t))))
            g = generalized_problem(1, 1, m, kappa, 0.5 * kappa, 1.0).drift
            k = neumann_problem(GeometryInput("kahler", m, kappa, kappa2=0.5 * kappa,
                                              diameter=1.0)).drift
            assert np.max(np.abs(g(t) - k(t))) <= 1e-15 * max(1, np.max(np.abs(k(t))))
    z = generalized_problem(1, 1, 2, 0.0, 0.0, 1.0).drift
    assert np.all(z(t) == 0)


def test_generalized_rejects_negative():
    with pytest.raises(InvalidGeometryError):
        generalized_problem(1, 1, 2, -0.1, 0.0, 1.0)
    with pytest.raises(InvalidGeometryError):
        generalized_problem(0, 1, 2, 0.1, 0.0, 1.0)


def test_laplace_comparison_rhs():
    g = GeometryInput("qk", 2, 0.0, convexity=0.0)
    assert laplace_comparison_rhs(g, 0.7) == 0.0
    g = GeometryInput("qk", 2, 1.0, convexity=0.0)
    assert laplace_comparison_rhs(g, 0.3) == pytest.approx(-(4 * math.tan(0.3) + 6 * math.tan(0.6)))
    assert laplace_comparison_rhs(g, 0.3) == pytest.approx(-5.342166, abs=1e-6)
    g = GeometryInput("qk", 2, 0.0, convexity=1.0)
    assert laplace_comparison_rhs(g, 0.5) == pytest.approx(-14.0, rel=1e-14)
    with pytest.raises(DomainError):
        laplace_comparison_rhs(g, 1.0)
    with pytest.raises(InvalidGeometryError):
        laplace_comparison_rhs(GeometryInput("riemannian", 3, 0.0, convexity=0.0), 0.1)


def test_geometry_validation():
    with pytest.raises(InvalidGeometryError):
        GeometryInput("qk", 1, 1.0)
    with pytest.raises(InvalidGeometryError):
        GeometryInput("lorentzian", 3, 1.0)
    with pytest.raises(InvalidGeometryError):
        GeometryInput("riemannian", 3, 1.0, diameter=-1.0)
    with pytest.raises(InvalidGeometryError):
        GeometryInput("riemannian", 3, 1.0, kappa2=1.0)
    assert GeometryInput("QK", 2, 1.0).kind == "quaternion_kahler"


def test_domain_limit_and_singular_flag():
    g = GeometryInput("qk", 2, 1.0, diameter=math.pi / 2)
    with pytest.raises(DomainError):
        neumann_problem(g)
    p = neumann_problem(g, singular_limit=True)
    assert p.length == math.pi / 4 and p.singular_limit
    with pytest.raises(DomainError):
        neumann_problem(GeometryInput("qk", 2, 1.0, diameter=1.0), singular_limit=True)
    p = neumann_problem(GeometryInput("riemannian", 3, 1.0, diameter=3.14159265),
                        singular_limit=True)
    assert p.length == math.pi / 2
    with pytest.raises(DomainError):
        dirichlet_problem(GeometryInput("riemannian", 3, 0.0, inradius=1.0, convexity=1.0))


def test_singular_diameter():
    assert singular_diameter(GeometryInput("riemannian", 3, 1.0)) == pytest.approx(math.pi)
    assert singular_diameter(GeometryInput("qk", 2, 1.0)) == pytest.approx(math.pi / 2)
    assert singular_diameter(GeometryInput("kahler", 2, 1.0, kappa2=0.0)) == pytest.approx(
        math.pi / 2)
    assert math.isinf(singular_diameter(GeometryInput("qk", 2, -1.0)))


@given(st.sampled_from(["riemannian", "kahler", "qk"]), st.integers(2, 5),
       st.floats(-2.0, 2.0), st.floats(0.0, 0.99))
def test_neumann_drift_is_odd(kind, dim, kappa, frac):
    drift = geometry_drift(GeometryInput(kind, dim, kappa))
    tm = drift.t_max
    t = frac * (tm if math.isfinite(tm) else 3.0)
    assert drift(-t) == -drift(t)


@given(st.sampled_from(["riemannian", "kahler", "qk"]), st.floats(-1.0, 1.0),
       st.floats(0.05, 0.7))
def test_zero_convexity_reduces_to_neumann(kind, kappa, R):
    g = GeometryInput(kind, 2, kappa, inradius=R, convexity=0.0)
    nd = geometry_drift(g)
    if R >= nd.t_max:
        return
    dd = dirichlet_problem(g).drift
    t = np.linspace(0, R, 17)
    np.testing.assert_allclose(dd(t), nd(t), rtol=1e-13, atol=1e-15)


def test_kahler_is_not_riemannian():
    k = geometry_drift(GeometryInput("kahler", 2, 1.0))
    r = geometry_drift(GeometryInput("riemannian", 2 * 2 - 1 + 1, 1.0))
    assert k(0.3) != r(0.3)


def test_drift_term_validation():
    with pytest.raises(ValueError):
        DriftTerm(0.0, 1.0)
    with pytest.raises(ValueError):
        DriftTerm(1.0, 1.0, scale=2)
    spec = DriftSpec((DriftTerm(2.0, 1.0), DriftTerm(3.0, 1.0, 4)))
    assert spec.t_max == pytest.approx(math.pi / 4)
    assert spec.singular_order == 3.0
    assert "4*1" in spec.label()


def test_problem_validation():
    spec = DriftSpec()
    with pytest.raises(DomainError):
        ComparisonProblem(spec, 0.0)
    with pytest.raises(ValueError):
        ComparisonProblem(spec, 1.0, bc="robin")
    with pytest.raises(DomainError):
        ComparisonProblem(spec, 1.0, singular_limit=True)
