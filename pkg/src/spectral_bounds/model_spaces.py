"""Radial eigenproblems of the round sphere and the projective spaces CP^m, HP^m.

With sectional curvatures normalized to [k, 4k] (projective) or k (sphere),
radial functions of the distance r to a point satisfy

    phi'' + b(r) phi' = -lambda phi,   0 < r < diameter,

    sphere                  b = (n-1) rk cot(rk r)                  diameter pi/rk
    complex_projective      b = (2m-2) rk cot(rk r) + 2 rk cot(2 rk r)  diameter pi/(2 rk)
    quaternionic_projective b = (4m-4) rk cot(rk r) + 6 rk cot(2 rk r)  diameter pi/(2 rk)

with rk = sqrt(k).  The multiplicities (2m-2, 1) and (4m-4, 3) are the
principal-curvature multiplicities of distance spheres.  The first radial
eigenfunctions are cos(rk r) (sphere) and cos(2 rk r) + (m-1)/(m+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensolver import EigenResult, SolverConfig, solve, weighted_fd
from .errors import InvalidGeometryError
from .models import GeometryInput, neumann_problem

FAMILIES = ("sphere", "complex_projective", "quaternionic_projective")

# test-only fault hook: added to the leading weight exponent
_WEIGHT_EXPONENT_OFFSET = 0


@dataclass(frozen=True)
class RadialModel:
    family: str
    dim: int
    kappa: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidGeometryError(f"unknown model family {self.family!r}")
        if not self.kappa > 0:
            raise InvalidGeometryError("model spaces need kappa > 0")
        if self.dim < (2 if self.family == "quaternionic_projective" else 1):
            raise InvalidGeometryError(f"dimension {self.dim} too small for {self.family}")

    @property
    def exponents(self) -> tuple:
        """Powers (p, q) in the radial weight sin(rk r)^p sin(2 rk r)^q."""
        n = self.dim
        if self.family == "sphere":
            return (n - 1, 0)
        if self.family == "complex_projective":
            return (2 * n - 2, 1)
        return (4 * n - 4, 3)

    @property
    def diameter(self) -> float:
        rk = math.sqrt(self.kappa)
        return math.pi / rk if self.family == "sphere" else math.pi / (2 * rk)

    def drift(self, r):
        rk = math.sqrt(self.kappa)
        p, q = self.exponents
        return p * rk / np.tan(rk * r) + 2 * q * rk / np.tan(2 * rk * r)

    def weight(self, r):
        rk = math.sqrt(self.kappa)
        p, q = self.exponents
        p += _WEIGHT_EXPONENT_OFFSET
        return np.sin(rk * r) ** p * np.sin(2 * rk * r) ** q

    def eigenfunction(self, r):
        rk = math.sqrt(self.kappa)
        if self.family == "sphere":
            return np.cos(rk * r)
        m = self.dim
        return np.cos(2 * rk * r) + (m - 1) / (m + 1)

    def eigenfunction_derivatives(self, r):
        rk = math.sqrt(self.kappa)
        if self.family == "sphere":
            return -rk * np.sin(rk * r), -self.kappa * np.cos(rk * r)
        return -2 * rk * np.sin(2 * rk * r), -4 * self.kappa * np.cos(2 * rk * r)


def radial_first_eigenvalue(model: RadialModel) -> float:
    """n k (sphere), 4(m+1) k (CP^m), 8(m+1) k (HP^m)."""
    if model.family == "sphere":
        return model.dim * model.kappa
    if model.family == "complex_projective":
        return 4 * (model.dim + 1) * model.kappa
    return 8 * (model.dim + 1) * model.kappa


def eigenfunction_residual(model: RadialModel, r) -> np.ndarray:
    """phi'' + b phi' + lambda phi for the stored closed-form eigenfunction."""
    d1, d2 = model.eigenfunction_derivatives(r)
    lam = radial_first_eigenvalue(model)
    return d2 + model.drift(r) * d1 + lam * model.eigenfunction(r)


def radial_first_eigenvalue_numeric(model: RadialModel,
                                    cfg: SolverConfig = SolverConfig()) -> EigenResult:
    """Weighted FD with natural conditions at both (singular) ends."""
    return weighted_fd(model.weight, 0.0, model.diameter, False, 1, cfg, singular=True)


def sharpness_gap(m: int, kappa: float, cfg: SolverConfig = SolverConfig()) -> float:
    """8(m+1)k minus the qk comparison eigenvalue at the diameter of HP^m."""
    if m < 2 or not kappa > 0:
        raise InvalidGeometryError("sharpness_gap needs m >= 2 and kappa > 0")
    g = GeometryInput("quaternion_kahler", m, kappa, diameter=math.pi / (2 * math.sqrt(kappa)))
    lam = solve(neumann_problem(g, singular_limit=True), cfg).lam
    return 8 * (m + 1) * kappa - lam
