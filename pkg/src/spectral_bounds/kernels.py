"""Curvature kernels T_k, c_k and their boundary-adjusted variants.

All functions take a scalar curvature ``kappa`` (any sign) and a scalar or
array argument ``t``; scalar input gives a Python float back.  The three
sign branches are joined through a Taylor series when ``|kappa| t^2`` is
tiny, so the functions are smooth across ``kappa = 0``.

    t_kernel(k, t)       = sqrt(k) tan(sqrt(k) t)   (k > 0)
                         = 0                        (k = 0)
                         = -sqrt(-k) tanh(sqrt(-k) t)  (k < 0)
    c_kernel(k, t)       = cos / 1 / cosh, with c' = -T c
    c_kernel_general     = solution of f'' + k f = 0, f(0) = 1, f'(0) = -lam
    t_kernel_general     = -C'/C
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

SERIES_THRESHOLD = 1e-8


def _finite(*values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise DomainError(f"non-finite input {v!r}")


def _out(x, scalar):
    return float(x) if scalar else x


def t_max(kappa: float) -> float:
    """First positive singularity of ``t_kernel(kappa, .)``."""
    _finite(kappa)
    if kappa > 0:
        return math.pi / (2.0 * math.sqrt(kappa))
    return math.inf


def t_max_general(kappa: float, lam: float) -> float:
    """First positive zero of ``c_kernel_general(kappa, lam, .)``.

    C = c_k(t) - lam * s_k(t) with s_k = sin(sqrt(k) t)/sqrt(k); the zero
    has a closed form on every branch.
    """
    _finite(kappa, lam)
    if kappa > 0:
        rk = math.sqrt(kappa)
        return math.atan2(rk, lam) / rk
    if kappa == 0:
        return 1.0 / lam if lam > 0 else math.inf
    rk = math.sqrt(-kappa)
    if lam > rk:
        return math.atanh(rk / lam) / rk
    return math.inf


def _check_domain(t, limit):
    if np.any(np.abs(t) >= limit):
        raise DomainError(f"t={t!r} outside kernel domain |t| < {limit!r}")


def t_kernel(kappa: float, t):
    """sqrt(k) tan(sqrt(k) t), extended by its 0 / tanh branches.

    Odd in ``t``; negative arguments are accepted on ``|t| < t_max``.
    """
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    _finite(kappa, t)
    _check_domain(t, t_max(kappa))
    x = kappa * t * t
    if kappa == 0:
        out = np.zeros_like(t)
    elif np.all(np.abs(x) < SERIES_THRESHOLD):
        out = kappa * t * (1.0 + x / 3.0 + 2.0 * x * x / 15.0)
    elif kappa > 0:
        rk = math.sqrt(kappa)
        out = rk * np.tan(rk * t)
    else:
        rk = math.sqrt(-kappa)
        out = -rk * np.tanh(rk * t)
    return _out(out, scalar)


def c_kernel(kappa: float, t):
    """cos(sqrt(k) t), 1 or cosh(sqrt(-k) t) according to the sign of k."""
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    _finite(kappa, t)
    if kappa > 0:
        out = np.cos(math.sqrt(kappa) * t)
    elif kappa == 0:
        out = np.ones_like(t)
    else:
        out = np.cosh(math.sqrt(-kappa) * t)
    return _out(out, scalar)


def s_kernel(kappa: float, t):
    """Companion solution sin(sqrt(k) t)/sqrt(k) (t at k=0, sinh at k<0)."""
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    _finite(kappa, t)
    x = kappa * t * t
    if kappa == 0:
        out = t.copy()
    elif np.all(np.abs(x) < SERIES_THRESHOLD):
        out = t * (1.0 - x / 6.0 + x * x / 120.0)
    elif kappa > 0:
        rk = math.sqrt(kappa)
        out = np.sin(rk * t) / rk
    else:
        rk = math.sqrt(-kappa)
        out = np.sinh(rk * t) / rk
    return _out(out, scalar)


def c_kernel_general(kappa: float, lam: float, t):
    """Solution of f'' + k f = 0 with f(0) = 1, f'(0) = -lam."""
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    _finite(lam)
    out = np.asarray(c_kernel(kappa, t)) - lam * np.asarray(s_kernel(kappa, t))
    return _out(out, scalar)


def t_kernel_general(kappa: float, lam: float, t):
    """-C'/C for C = c_kernel_general(kappa, lam, .), on 0 <= t < first zero of C."""
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    _finite(kappa, lam, t)
    if np.any(t < 0):
        raise DomainError("t_kernel_general is defined for t >= 0 only")
    _check_domain(t, t_max_general(kappa, lam))
    c = np.asarray(c_kernel(kappa, t))
    s = np.asarray(s_kernel(kappa, t))
    # C' = -k s - lam c
    out = (kappa * s + lam * c) / (c - lam * s)
    return _out(out, scalar)
