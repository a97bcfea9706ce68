import math

import numpy as np
import pytest

from spectral_bounds import model_spaces as ms
from spectral_bounds.errors import InvalidGeometryError
from spectral_bounds.model_spaces import (RadialModel, eigenfunction_residual,
                                          radial_first_eigenvalue,
                                          radial_first_eigenvalue_numeric, sharpness_gap)


def test_analytic_values():
    assert radial_first_eigenvalue(RadialModel("sphere", 3)) == 3
    assert radial_first_eigenvalue(RadialModel("complex_projective", 2)) == 12
    assert radial_first_eigenvalue(RadialModel("quaternionic_projective", 2)) == 24


@pytest.mark.parametrize("family", ms.FAMILIES)
@pytest.mark.parametrize("dim", [2, 3, 5])
def test_numeric_matches_analytic(family, dim):
    model = RadialModel(family, dim)
    exact = radial_first_eigenvalue(model)
    assert radial_first_eigenvalue_numeric(model).lam == pytest.approx(exact, rel=1e-6)


@pytest.mark.parametrize("family", ms.FAMILIES)
@pytest.mark.parametrize("dim", [2, 3, 5])
def test_eigenfunction_residual(family, dim):
    model = RadialModel(family, dim)
    r = np.linspace(0.01, model.diameter - 0.01, 4001)
    assert np.max(np.abs(eigenfunction_residual(model, r))) <= 1e-10


@pytest.mark.parametrize("kappa", [1.0, 2.0, 4.0])
def test_curvature_scaling(kappa):
    for family in ms.FAMILIES:
        model = RadialModel(family, 2, kappa)
        base = radial_first_eigenvalue(RadialModel(family, 2))
        assert radial_first_eigenvalue_numeric(model).lam == pytest.approx(kappa * base,
                                                                          rel=1e-6)


def test_weight_matches_drift():
    model = RadialModel("quaternionic_projective", 3)
    r = np.linspace(0.1, model.diameter - 0.1, 50)
    h = 1e-6
    logd = (np.log(model.weight(r + h)) - np.log(model.weight(r - h))) / (2 * h)
    np.testing.assert_allclose(logd, model.drift(r), rtol=1e-6)


def test_sharpness_gap():
    g1 = sharpness_gap(2, 1.0)
    assert g1 >= -1e-6
    assert sharpness_gap(2, 4.0) == pytest.approx(4 * g1, rel=1e-6)
    with pytest.raises(InvalidGeometryError):
        sharpness_gap(1, 1.0)


def test_fault_hook_breaks_sphere(monkeypatch):
    monkeypatch.setattr(ms, "_WEIGHT_EXPONENT_OFFSET", 1)
    lam = radial_first_eigenvalue_numeric(RadialModel("sphere", 2)).lam
    assert abs(lam - 2.0) > 0.5


def test_validation():
    with pytest.raises(InvalidGeometryError):
        RadialModel("octonionic", 2)
    with pytest.raises(InvalidGeometryError):
        RadialModel("sphere", 2, -1.0)
    with pytest.raises(InvalidGeometryError):
        RadialModel("quaternionic_projective", 1)
    assert RadialModel("sphere", 2, 4.0).diameter == pytest.approx(math.pi / 2)
