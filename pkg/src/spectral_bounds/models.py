"""One-dimensional comparison problems built from geometric data.

A comparison problem is the Sturm-Liouville problem

    phi'' - b(t) phi' = -lambda phi

where the drift ``b`` is a positive combination of curvature kernels.  With
the weight ``w = exp(-int b)`` it is the symmetric problem
``-(w phi')' = lambda w phi``.

    riemannian          b = (n-1) T_k
    kahler              b = 2(m-1) T_k2 + T_4k1
    quaternion_kahler   b = 4(m-1) T_k + 3 T_4k

Neumann problems live on [-D/2, D/2]; Dirichlet problems replace every
``T_k`` by the boundary-adjusted kernel and live on [0, R] with
phi(0) = 0, phi'(R) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import kernels
from .errors import DomainError, InvalidGeometryError

SYMMETRIC_NEUMANN = "symmetric_neumann"
DIRICHLET_NEUMANN = "dirichlet_neumann"

SINGULAR_SNAP_RTOL = 1e-6

_KIND_ALIASES = {
    "riemannian": "riemannian",
    "riem": "riemannian",
    "kahler": "kahler",
    "kaehler": "kahler",
    "quaternion_kahler": "quaternion_kahler",
    "qk": "quaternion_kahler",
}


@dataclass(frozen=True)
class DriftTerm:
    """``multiplicity * T_{scale*curvature}`` (or ``T_{scale*curvature, convexity}``)."""

    multiplicity: float
    curvature: float
    scale: int = 1
    convexity: Optional[float] = None

    def __post_init__(self):
        if not self.multiplicity > 0:
            raise ValueError(f"multiplicity must be positive, got {self.multiplicity}")
        if self.scale not in (1, 4):
            raise ValueError(f"curvature scale must be 1 or 4, got {self.scale}")
        if not (math.isfinite(self.curvature) and
                (self.convexity is None or math.isfinite(self.convexity))):
            raise DomainError("curvature and convexity must be finite")

    @property
    def kernel_curvature(self) -> float:
        return self.scale * self.curvature

    @property
    def t_max(self) -> float:
        if self.convexity is None:
            return kernels.t_max(self.kernel_curvature)
        return kernels.t_max_general(self.kernel_curvature, self.convexity)

    def value(self, t):
        if self.convexity is None:
            k = kernels.t_kernel(self.kernel_curvature, t)
        else:
            k = kernels.t_kernel_general(self.kernel_curvature, self.convexity, t)
        return self.multiplicity * k

    def base(self, t):
        """The warping function whose negative log-derivative is the kernel."""
        if self.convexity is None:
            return kernels.c_kernel(self.kernel_curvature, t)
        return kernels.c_kernel_general(self.kernel_curvature, self.convexity, t)

    def scalar_base(self):
        """Fast float-only version of :meth:`base` for ODE right-hand sides."""
        k = self.kernel_curvature
        lam = self.convexity or 0.0
        if k > 0:
            rk = math.sqrt(k)
            return lambda t: math.cos(rk * t) - lam * math.sin(rk * t) / rk
        if k < 0:
            rk = math.sqrt(-k)
            return lambda t: math.cosh(rk * t) - lam * math.sinh(rk * t) / rk
        return lambda t: 1.0 - lam * t

    def label(self) -> str:
        kname = f"{self.curvature:g}" if self.scale == 1 else f"4*{self.curvature:g}"
        if self.convexity is not None:
            kname += f",{self.convexity:g}"
        return f"{self.multiplicity:g}*T[{kname}]"


@dataclass(frozen=True)
class DriftSpec:
    terms: tuple = ()

    @property
    def t_max(self) -> float:
        return min((term.t_max for term in self.terms), default=math.inf)

    @property
    def singular_order(self) -> float:
        """Vanishing order of the weight at ``t_max`` (0 when the domain is unbounded)."""
        tm = self.t_max
        if math.isinf(tm):
            return 0.0
        return sum(term.multiplicity for term in self.terms
                   if math.isclose(term.t_max, tm, rel_tol=1e-12))

    def __call__(self, t):
        if not self.terms:
            return 0.0 * np.asarray(t, dtype=float) if np.ndim(t) else 0.0
        return sum(term.value(t) for term in self.terms)

    def weight(self, t):
        """Sturm-Liouville weight ``w`` with ``w'/w = -b`` and ``w(0) = 1``."""
        tm = self.t_max
        if np.any(np.abs(np.asarray(t)) >= tm):
            raise DomainError(f"weight evaluated outside |t| < {tm}")
        if np.any(np.asarray(t) < 0) and any(term.convexity is not None for term in self.terms):
            raise DomainError("boundary-adjusted drifts are defined for t >= 0 only")
        out = np.ones_like(np.asarray(t, dtype=float))
        for term in self.terms:
            out = out * np.asarray(term.base(t)) ** term.multiplicity
        return float(out) if np.ndim(t) == 0 else out

    def scalar_weight(self):
        bases = [(term.scalar_base(), term.multiplicity) for term in self.terms]

        def w(t):
            out = 1.0
            for f, p in bases:
                out *= f(t) ** p
            return out

        return w

    def label(self) -> str:
        return " + ".join(term.label() for term in self.terms) or "0"


def weight(drift: DriftSpec, t):
    return drift.weight(t)


@dataclass(frozen=True)
class ComparisonProblem:
    """Drift plus interval: [-length, length] (Neumann) or [0, length] (Dirichlet/Neumann)."""

    drift: DriftSpec
    length: float
    bc: str = SYMMETRIC_NEUMANN
    singular_limit: bool = False

    def __post_init__(self):
        if self.bc not in (SYMMETRIC_NEUMANN, DIRICHLET_NEUMANN):
            raise ValueError(f"unknown boundary condition {self.bc!r}")
        if not (math.isfinite(self.length) and self.length > 0):
            raise DomainError(f"interval length must be positive and finite, got {self.length}")
        tm = self.drift.t_max
        if self.singular_limit:
            if math.isinf(tm) or abs(self.length - tm) > SINGULAR_SNAP_RTOL * tm:
                raise DomainError(
                    f"singular limit requested but length {self.length!r} is not the "
                    f"kernel singularity {tm!r}")
            object.__setattr__(self, "length", tm)
        elif self.length >= tm:
            raise DomainError(
                f"length {self.length!r} reaches the drift singularity at {tm!r}; "
                "pass singular_limit=True for the limiting problem")

    @property
    def interval(self) -> tuple:
        if self.bc == SYMMETRIC_NEUMANN:
            return (-self.length, self.length)
        return (0.0, self.length)

    @property
    def reduced_interval(self) -> tuple:
        return (0.0, self.length)


@dataclass(frozen=True)
class GeometryInput:
    """User-facing geometry.

    ``kappa`` is the curvature parameter of the class (for kahler, the
    holomorphic one kappa_1); ``kappa2`` is the orthogonal-Ricci parameter
    kappa_2 of the kahler class and defaults to ``kappa``.
    """

    kind: str
    dim: int
    kappa: float
    kappa2: Optional[float] = None
    diameter: Optional[float] = None
    inradius: Optional[float] = None
    convexity: Optional[float] = None

    def __post_init__(self):
        kind = _KIND_ALIASES.get(str(self.kind).lower())
        if kind is None:
            raise InvalidGeometryError(f"unknown geometry class {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidGeometryError(f"dimension must be a positive integer, got {self.dim}")
        if kind == "quaternion_kahler" and self.dim < 2:
            raise InvalidGeometryError("quaternionic dimension m >= 2 required")
        if kind != "kahler" and self.kappa2 is not None:
            raise InvalidGeometryError("kappa2 is only meaningful for the kahler class")
        for name in ("diameter", "inradius"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise InvalidGeometryError(f"{name} must be positive, got {v}")

    @property
    def curvatures(self) -> tuple:
        if self.kind == "kahler":
            return (self.kappa, self.kappa if self.kappa2 is None else self.kappa2)
        return (self.kappa,)

    def with_extent(self, diameter=None, inradius=None) -> "GeometryInput":
        return replace(self, diameter=diameter, inradius=inradius)

    def with_kappa(self, kappa) -> "GeometryInput":
        if self.kind == "kahler" and self.kappa2 is not None:
            return replace(self, kappa=kappa, kappa2=kappa)
        return replace(self, kappa=kappa)


def geometry_drift(g: GeometryInput, convexity: Optional[float] = None) -> DriftSpec:
    """Drift of the comparison equation for ``g`` (boundary-adjusted if ``convexity`` is given)."""
    terms = []

    def add(mult, curv, scale):
        if mult > 0:
            terms.append(DriftTerm(float(mult), float(curv), scale, convexity))

    if g.kind == "riemannian":
        add(g.dim - 1, g.kappa, 1)
    elif g.kind == "kahler":
        k1, k2 = g.curvatures
        add(2 * (g.dim - 1), k2, 1)
        add(1, k1, 4)
    else:
        add(4 * (g.dim - 1), g.kappa, 1)
        add(3, g.kappa, 4)
    return DriftSpec(tuple(terms))


def neumann_problem(g: GeometryInput, singular_limit: bool = False) -> ComparisonProblem:
    if g.diameter is None:
        raise InvalidGeometryError("Neumann comparison problem needs a diameter")
    return ComparisonProblem(geometry_drift(g), g.diameter / 2.0, SYMMETRIC_NEUMANN,
                             singular_limit)


def dirichlet_problem(g: GeometryInput, singular_limit: bool = False) -> ComparisonProblem:
    if g.inradius is None:
        raise InvalidGeometryError("Dirichlet comparison problem needs an inradius")
    if g.convexity is None:
        raise InvalidGeometryError("Dirichlet comparison problem needs the boundary convexity")
    return ComparisonProblem(geometry_drift(g, g.convexity), g.inradius, DIRICHLET_NEUMANN,
                             singular_limit)


def generalized_problem(a: int, b: int, m: int, kappa1: float, kappa2: float, diameter: float,
                        singular_limit: bool = False) -> ComparisonProblem:
    """Neumann problem for ``2a(m-1) T_k2 + b T_4k1`` on [-D/2, D/2].

    ``b T_{4 k1}(t) = 2b sqrt(k1) tan(2 sqrt(k1) t)``.  Only nonnegative
    curvatures are admitted for this family.
    """
    if a < 1 or b < 1 or int(a) != a or int(b) != b:
        raise InvalidGeometryError("a and b must be positive integers")
    if kappa1 < 0 or kappa2 < 0:
        raise InvalidGeometryError("the (a, b) family requires kappa1, kappa2 >= 0")
    terms = []
    if 2 * a * (m - 1) > 0:
        terms.append(DriftTerm(float(2 * a * (m - 1)), float(kappa2), 1))
    terms.append(DriftTerm(float(b), float(kappa1), 4))
    return ComparisonProblem(DriftSpec(tuple(terms)), diameter / 2.0, SYMMETRIC_NEUMANN,
                             singular_limit)


def laplace_comparison_rhs(g: GeometryInput, s):
    """Upper bound for the Laplacian of the distance to the boundary at distance ``s``.

    Equals ``-(4(m-1) T_{k,L}(s) + 3 T_{4k,L}(s))`` for the quaternion-Kahler
    class with boundary convexity L.
    """
    if g.kind != "quaternion_kahler":
        raise InvalidGeometryError("laplace_comparison_rhs is defined for the qk class")
    if g.convexity is None:
        raise InvalidGeometryError("boundary convexity is required")
    drift = geometry_drift(g, g.convexity)
    if np.any(np.asarray(s) < 0) or np.any(np.asarray(s) >= drift.t_max):
        raise DomainError(f"s={s!r} outside [0, {drift.t_max})")
    return -drift(s)


def singular_diameter(g: GeometryInput) -> float:
    """Diameter at which the Neumann drift of ``g`` becomes singular (inf if never)."""
    return 2.0 * geometry_drift(g).t_max
