import math

import numpy as np
import pytest

from spectral_bounds.eigensolver import (SolverConfig, eigenvalue_curve, fd_level,
                                         rayleigh_quotient, richardson, solve, solve_shooting,
                                         solve_weighted_fd)
from spectral_bounds.errors import DisagreementError
from spectral_bounds.models import (DIRICHLET_NEUMANN, ComparisonProblem, DriftSpec,
                                    GeometryInput, dirichlet_problem, neumann_problem)

PI2 = math.pi ** 2


def qk(m=2, kappa=1.0, D=1.0, sing=False):
    return neumann_problem(GeometryInput("qk", m, kappa, diameter=D), singular_limit=sing)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_flat_shooting(n):
    p = neumann_problem(GeometryInput("riemannian", n, 0.0, diameter=2.0))
    assert solve_shooting(p).lam == pytest.approx(PI2 / 4, rel=1e-9)


@pytest.mark.parametrize("solver", [solve_shooting, solve_weighted_fd])
def test_sphere_singular_limit(solver):
    p = neumann_problem(GeometryInput("riemannian", 3, 1.0, diameter=math.pi),
                        singular_limit=True)
    r = solver(p)
    assert r.lam == pytest.approx(3.0, rel=1e-6)
    assert r.singular_limit


def test_fd_flat_qk():
    r = solve_weighted_fd(qk(kappa=0.0))
    assert abs(r.lam - PI2) <= max(r.error_bracket, 1e-9 * PI2)


def test_fd_dirichlet_flat():
    p = ComparisonProblem(DriftSpec(), 1.0, DIRICHLET_NEUMANN)
    assert solve_weighted_fd(p).lam == pytest.approx(PI2 / 4, rel=1e-9)
    assert solve_shooting(p).lam == pytest.approx(PI2 / 4, rel=1e-9)


def test_consensus_qk():
    r = solve(qk())
    assert r.method == "consensus"
    assert r.relative_bracket <= 1e-6
    assert r.details["relative_gap"] <= 1e-6


def test_consensus_kahler_flat():
    p = neumann_problem(GeometryInput("kahler", 2, 0.0, diameter=3.0))
    assert solve(p).lam == pytest.approx(PI2 / 9, rel=1e-9)


@pytest.mark.parametrize("m", [2, 3])
def test_singular_qk_below_model(m):
    assert solve(qk(m=m, D=math.pi / 2, sing=True)).lam <= 8 * (m + 1) + 1e-6


def test_eigenfunction_one_signed_and_rayleigh():
    for p in (qk(), qk(D=math.pi / 2, sing=True),
              neumann_problem(GeometryInput("riemannian", 3, -1.0, diameter=3.0))):
        r = solve_shooting(p)
        inner = r.phi[1:-1]
        assert np.all(inner > 0)
        assert rayleigh_quotient(p, r.t, r.phi) == pytest.approx(r.lam, rel=1e-8)


def test_fd_observed_order():
    p = qk()
    vals = [fd_level(p.drift.weight, -0.5, 0.5, n, False, 1)[0][1] for n in (200, 400, 800, 1600)]
    exact = solve_shooting(p).lam
    errs = [abs(v - exact) for v in vals]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(3)]
    assert min(orders) >= 1.9


def test_richardson_exact_on_quadratic_error():
    h = np.array([1.0, 0.5, 0.25])
    vals = 3.0 + 0.7 * h ** 2
    assert richardson(vals)[0][-1] == pytest.approx(3.0, abs=1e-14)


def test_reduction_equivalence():
    for g in (GeometryInput("kahler", 3, 0.5, kappa2=0.2, diameter=2.0),
              GeometryInput("riemannian", 4, -2.0, diameter=1.5)):
        p = neumann_problem(g)
        a, b = solve_shooting(p), solve_weighted_fd(p)
        assert abs(a.lam - b.lam) <= max(1e-6 * a.lam, a.error_bracket + b.error_bracket)


def test_dirichlet_shooting_matches_fd():
    g = GeometryInput("qk", 2, 1.0, inradius=0.4, convexity=0.5)
    p = dirichlet_problem(g)
    a, b = solve_shooting(p), solve_weighted_fd(p)
    assert a.lam == pytest.approx(b.lam, rel=1e-6)


def test_flat_floor():
    for kind, dim in (("riemannian", 3), ("kahler", 2), ("qk", 3)):
        for D in (0.7, 2.5):
            p = neumann_problem(GeometryInput(kind, dim, 0.0, diameter=D))
            assert abs(solve(p).lam - PI2 / D ** 2) <= 1e-8 * PI2 / D ** 2


def test_curve_flat_and_decreasing():
    flat = eigenvalue_curve(GeometryInput("riemannian", 3, 0.0), [1.0, 2.0, 4.0])
    for D, r in flat:
        assert r.lam == pytest.approx(PI2 / D ** 2, rel=1e-8)
    curve = eigenvalue_curve(GeometryInput("qk", 2, 1.0), np.linspace(0.4, 1.5, 6))
    lams = [r.lam for _, r in curve]
    assert all(b < a for a, b in zip(lams, lams[1:]))


def test_curve_parallel_matches_serial(monkeypatch):
    g = GeometryInput("qk", 2, 1.0)
    grid = [0.5, 0.9, 1.3]
    serial = [r.lam for _, r in eigenvalue_curve(g, grid, workers=1)]
    monkeypatch.setenv("SPECTRAL_BOUNDS_THREADS", "2")
    parallel = [r.lam for _, r in eigenvalue_curve(g, grid)]
    assert serial == parallel


def test_curvature_increases_lambda():
    assert solve(qk(kappa=0.5)).lam > solve(qk(kappa=0.0)).lam == pytest.approx(PI2)


def test_kappa_monotone():
    lams = [solve(qk(kappa=k)).lam for k in np.linspace(0, 1, 5)]
    assert all(b >= a for a, b in zip(lams, lams[1:]))


def test_disagreement_reported(monkeypatch):
    import dataclasses

    from spectral_bounds import eigensolver

    real = eigensolver.solve_shooting
    monkeypatch.setattr(eigensolver, "solve_shooting",
                        lambda p, cfg: dataclasses.replace(real(p, cfg), lam=real(p, cfg).lam * 1.01))
    with pytest.raises(DisagreementError) as info:
        eigensolver.solve(qk())
    assert info.value.shooting is not None and info.value.fd is not None


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(rel_tol=1e-15)
    with pytest.raises(ValueError):
        SolverConfig(refinement_levels=1)
