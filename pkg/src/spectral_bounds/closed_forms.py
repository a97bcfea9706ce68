"""Explicit interpolation lower bounds between the pi^2/D^2 and curvature regimes.

Every bound has the form ``sup_{0<s<1} 4 A s (1 - s) + B s`` with
``A = pi^2 / D^2`` and ``B`` a curvature aggregate.
"""

from __future__ import annotations

import math


def _check_nonneg(**kw):
    for name, v in kw.items():
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"{name} must be finite and nonnegative, got {v}")


def sup_interpolation(A: float, B: float) -> float:
    """sup over s in (0, 1) of 4 A s (1 - s) + B s.

    The parabola peaks at s* = (4A + B) / (8A) with value (4A + B)^2 / (16 A)
    while s* < 1; otherwise the supremum is the limit B at s -> 1 (not attained).
    """
    if not (math.isfinite(A) and A > 0):
        raise ValueError(f"A must be positive, got {A}")
    _check_nonneg(B=B)
    if B >= 4.0 * A:
        return B
    return (4.0 * A + B) ** 2 / (16.0 * A)


def maximizer(A: float, B: float) -> float:
    """Location of the supremum (1.0 when it is only approached)."""
    sup_interpolation(A, B)
    return min(1.0, (4.0 * A + B) / (8.0 * A))


def explicit_bound_generalized(a: int, b: int, m: int, kappa1: float, kappa2: float,
                               diameter: float) -> float:
    if a < 1 or b < 1:
        raise ValueError("a and b must be positive integers")
    _check_nonneg(kappa1=kappa1, kappa2=kappa2)
    if not diameter > 0:
        raise ValueError("diameter must be positive")
    return sup_interpolation(math.pi ** 2 / diameter ** 2,
                             2 * a * (m - 1) * kappa2 + 4 * b * kappa1)


def explicit_bound_kahler(m: int, kappa1: float, kappa2: float, diameter: float) -> float:
    return explicit_bound_generalized(1, 1, m, kappa1, kappa2, diameter)


def explicit_bound_qk(m: int, kappa: float, diameter: float) -> float:
    if m < 2:
        raise ValueError("quaternionic dimension m >= 2 required")
    _check_nonneg(kappa=kappa)
    if not diameter > 0:
        raise ValueError("diameter must be positive")
    return sup_interpolation(math.pi ** 2 / diameter ** 2, 4 * (m + 2) * kappa)
