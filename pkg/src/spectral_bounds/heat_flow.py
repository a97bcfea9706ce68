"""The one-dimensional comparison flow and its large-time behaviour.

    omega_t = alpha(omega_s) omega_ss - b(s) beta(omega_s) omega_s,
    omega(0, t) = 0,   omega_s(L, t) = 0,

on [0, L] with L = D/2 (or the inradius).  For the heat preset
(alpha = beta = 1) the sup norm decays like exp(-lambda t) with lambda the
first eigenvalue of the comparison problem, which is how the eigenvalue
bound is obtained from the modulus-of-continuity estimate.

Time stepping is a theta scheme with alpha, beta frozen at the previous
step; ``evolve`` starts with two backward-Euler half steps before switching
to Crank-Nicolson.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded

from .errors import CertificateError, CoefficientBlowupError, SolverError
from .models import ComparisonProblem, DriftSpec


@dataclass(frozen=True)
class FlowCoefficients:
    alpha: Callable
    beta: Callable
    preset: str = "custom"
    regularization_eps: float = 0.0
    p: Optional[float] = None

    @classmethod
    def heat(cls):
        one = lambda xi: np.ones_like(xi)
        return cls(one, one, "heat")

    @classmethod
    def p_flow(cls, p: float, eps: float = 0.0):
        """alpha = (p-1)|xi|^(p-2), beta = |xi|^(p-2), with |xi| -> sqrt(xi^2 + eps^2)."""
        if p <= 1:
            raise ValueError("p_flow needs p > 1")

        def beta(xi):
            with np.errstate(divide="ignore"):
                return (xi * xi + eps * eps) ** ((p - 2) / 2)

        def alpha(xi):
            return (p - 1) * beta(xi)

        return cls(alpha, beta, "p_flow", eps, p)

    @classmethod
    def graphical_mcf(cls):
        return cls(lambda xi: 1.0 / (1.0 + xi * xi), lambda xi: np.ones_like(xi),
                   "graphical_mcf")

    def regularized(self, eps: float) -> "FlowCoefficients":
        if self.preset != "p_flow":
            return self
        return FlowCoefficients.p_flow(self.p, eps)


@dataclass(frozen=True)
class FlowState:
    grid: np.ndarray
    values: np.ndarray
    time: float = 0.0

    @property
    def h(self) -> float:
        return float(self.grid[1] - self.grid[0])


@dataclass
class Trajectory:
    grid: np.ndarray
    times: np.ndarray
    profiles: np.ndarray
    sup_norms: np.ndarray
    step_times: np.ndarray
    min_slope: float

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "s", "omega"])
            for t, row in zip(self.times, self.profiles):
                for s, v in zip(self.grid, row):
                    writer.writerow([repr(float(t)), repr(float(s)), repr(float(v))])


@dataclass
class DecayReport:
    rate: float
    window: tuple
    r_squared: float
    reference_lambda: float
    details: dict = field(default_factory=dict)

    @property
    def relative_error(self) -> float:
        return abs(self.rate - self.reference_lambda) / self.reference_lambda


def make_state(length: float, nodes: int, initial) -> FlowState:
    grid = np.linspace(0.0, length, nodes + 1)
    values = np.asarray(initial(grid) if callable(initial) else initial, dtype=float).copy()
    if values.shape != grid.shape:
        raise ValueError(f"initial profile has shape {values.shape}, grid {grid.shape}")
    values[0] = 0.0
    return FlowState(grid, values, 0.0)


def _gradient(values, h):
    g = np.empty_like(values)
    g[1:-1] = (values[2:] - values[:-2]) / (2 * h)
    g[0] = (values[1] - values[0]) / h
    g[-1] = 0.0
    return g


def _coefficients(coeffs, grad):
    a = np.asarray(coeffs.alpha(grad), dtype=float)
    b = np.asarray(coeffs.beta(grad), dtype=float)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(a > 0)
            and np.all(b > 0)):
        raise CoefficientBlowupError(
            f"{coeffs.preset} coefficients degenerate at the current gradient "
            f"(eps={coeffs.regularization_eps}); regularize the preset")
    return a, b


def operator_bands(state: FlowState, coeffs: FlowCoefficients, drift_values: np.ndarray):
    """Tridiagonal operator on unknowns omega_1..omega_N (lower, diag, upper)."""
    h = state.h
    grad = _gradient(state.values, h)[1:]
    a, bt = _coefficients(coeffs, grad)
    adv = drift_values * bt / (2 * h)
    lower = a / h ** 2 + adv           # coefficient of omega_{i-1}
    diag = -2 * a / h ** 2
    upper = a / h ** 2 - adv           # coefficient of omega_{i+1}
    # ghost node omega_{N+1} = omega_{N-1}
    lower[-1] = lower[-1] + upper[-1]
    upper[-1] = 0.0
    return lower, diag, upper


def apply_operator(values, lower, diag, upper):
    u = values[1:]
    out = diag * u
    out[1:] += lower[1:] * u[:-1]
    out[:-1] += upper[:-1] * u[1:]
    return out


def step(state: FlowState, coeffs: FlowCoefficients, drift: DriftSpec, dt: float,
         theta: float = 0.5, drift_values: Optional[np.ndarray] = None) -> FlowState:
    """One frozen-coefficient theta step (theta = 1 backward Euler, 1/2 Crank-Nicolson)."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if drift_values is None:
        drift_values = np.asarray(drift(state.grid[1:]), dtype=float) * np.ones(len(state.grid) - 1)
    lower, diag, upper = operator_bands(state, coeffs, drift_values)
    rhs = state.values[1:] + (1 - theta) * dt * apply_operator(state.values, lower, diag, upper)
    n = len(diag)
    ab = np.zeros((3, n))
    ab[0, 1:] = -theta * dt * upper[:-1]
    ab[1] = 1.0 - theta * dt * diag
    ab[2, :-1] = -theta * dt * lower[1:]
    new = np.empty_like(state.values)
    new[0] = 0.0
    new[1:] = solve_banded((1, 1), ab, rhs)
    return FlowState(state.grid, new, state.time + dt)


def default_dt(length: float, nodes: int, coeffs: FlowCoefficients, state: FlowState) -> float:
    a, _ = _coefficients(coeffs, _gradient(state.values, state.h))
    return length ** 2 / (4.0 * float(np.max(a)) * nodes ** 2) * 50.0


def evolve(initial, coeffs: FlowCoefficients, drift: DriftSpec, length: float, horizon: float,
           nodes: int = 200, dt: Optional[float] = None, theta: float = 0.5,
           record: int = 100, startup: bool = True) -> Trajectory:
    """Evolve to ``horizon``; keeps sup norms at every step and ~``record`` profiles."""
    state = make_state(length, nodes, initial)
    if coeffs.preset == "p_flow" and coeffs.regularization_eps == 0.0 and coeffs.p != 2:
        scale = float(np.max(np.abs(np.diff(state.values)))) / state.h
        coeffs = coeffs.regularized(1e-6 * scale)
    if dt is None:
        dt = default_dt(length, nodes, coeffs, state)
    drift_values = np.asarray(drift(state.grid[1:]), dtype=float) * np.ones(nodes)
    n_steps = max(1, int(math.ceil(horizon / dt - 1e-9)))
    every = max(1, n_steps // record)
    times, profiles = [0.0], [state.values.copy()]
    norms, step_times = [np.max(np.abs(state.values))], [0.0]
    min_slope = float(np.min(np.diff(state.values)))
    for k in range(n_steps):
        if startup and theta < 1 and k == 0:
            state = step(state, coeffs, drift, dt / 2, 1.0, drift_values)
            state = step(state, coeffs, drift, dt / 2, 1.0, drift_values)
        else:
            state = step(state, coeffs, drift, dt, theta, drift_values)
        norms.append(np.max(np.abs(state.values)))
        step_times.append(state.time)
        min_slope = min(min_slope, float(np.min(np.diff(state.values))))
        if (k + 1) % every == 0 or k == n_steps - 1:
            times.append(state.time)
            profiles.append(state.values.copy())
    return Trajectory(state.grid, np.array(times), np.array(profiles), np.array(norms),
                      np.array(step_times), min_slope)


def fit_decay(times, norms, t_start, t_end):
    """Least-squares slope of log(norm) on [t_start, t_end]; returns (rate, r^2)."""
    times = np.asarray(times)
    mask = (times >= t_start) & (times <= t_end)
    if mask.sum() < 3:
        raise SolverError("decay window holds fewer than three samples")
    x, y = times[mask], np.log(np.asarray(norms)[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 1.0
    return float(-slope), float(r2)


class UnderResolvedError(SolverError):
    pass


def decay_rate(coeffs: FlowCoefficients, problem: ComparisonProblem, initial=None,
               horizon: Optional[float] = None, nodes: int = 200, dt: Optional[float] = None,
               reference_lambda: Optional[float] = None, t_start: Optional[float] = None,
               trajectory_csv=None) -> DecayReport:
    """Large-time decay rate of the sup norm, next to the eigensolver's lambda."""
    if problem.singular_limit:
        raise SolverError("the flow is only run strictly inside the drift domain")
    if reference_lambda is None:
        from .eigensolver import solve
        reference_lambda = solve(problem).lam
    lam = reference_lambda
    L = problem.length
    if horizon is None:
        horizon = 10.0 / lam
    if horizon < 6.0 / lam:
        raise UnderResolvedError(
            f"horizon {horizon:g} shorter than 6/lambda = {6 / lam:g}; transient not resolved")
    if initial is None:
        initial = lambda s: np.sin(0.5 * math.pi * s / L)
    t_start = 3.0 / lam if t_start is None else t_start
    traj = evolve(initial, coeffs, problem.drift, L, horizon, nodes, dt)
    if trajectory_csv is not None:
        traj.to_csv(trajectory_csv)
    rate, r2 = fit_decay(traj.step_times, traj.sup_norms, t_start, horizon)
    return DecayReport(rate, (t_start, horizon), r2, lam,
                       details={"nodes": nodes, "steps": len(traj.step_times) - 1,
                                "min_slope": traj.min_slope,
                                "sup_norm_increase": float(np.max(np.diff(traj.sup_norms)))})


def eigenfunction_path(t_samples, phi_samples, lam: float, factor: float = 1.0):
    """(s, t) -> factor * exp(-lam t) * phi(s) from sampled eigenfunction data.

    The spline is clamped to phi'(L) = 0, the Neumann condition the samples satisfy.
    """
    from scipy.interpolate import CubicSpline

    spline = CubicSpline(t_samples, phi_samples, bc_type=("not-a-knot", (1, 0.0)))
    end = t_samples[-1]

    def path(s, t):
        s = np.asarray(s, dtype=float)
        return factor * np.exp(-lam * np.asarray(t, dtype=float)) * spline(np.minimum(s, end))

    return path


def path_operator(coeffs, drift_values, path, grid, t, delta=None):
    """F applied to a callable path at the interior nodes ``grid[1:]``.

    Derivatives come from difference quotients with offset ``delta``, much
    finer than the grid, so the result measures the continuous residual of
    the path rather than the truncation of the time-stepping stencil.  The
    end node uses a one-sided second-order stencil.
    """
    s = np.asarray(grid[1:], dtype=float)
    length = float(grid[-1])
    if delta is None:
        delta = 1e-4 * length
    f = lambda x: np.asarray(path(x, t), dtype=float)
    d1 = np.empty_like(s)
    d2 = np.empty_like(s)
    inner = s[:-1]
    fm, f0, fp = f(inner - delta), f(inner), f(inner + delta)
    d1[:-1] = (fp - fm) / (2 * delta)
    d2[:-1] = (fp - 2 * f0 + fm) / delta ** 2
    end = length - delta * np.arange(4)
    e = f(end)
    d1[-1] = (3 * e[0] - 4 * e[1] + e[2]) / (2 * delta)
    d2[-1] = (2 * e[0] - 5 * e[1] + 4 * e[2] - e[3]) / delta ** 2
    a, b = _coefficients(coeffs, d1)
    return a * d2 - drift_values * b * d1


def certify_supersolution(coeffs, drift, grid, sup, times, tol=1e-4):
    """Check phi_t >= F phi, phi_s >= 0 on the grid at ``times``; raise CertificateError."""
    drift_values = np.asarray(drift(grid[1:]), dtype=float) * np.ones(len(grid) - 1)
    for t in times:
        vals = np.asarray(sup(grid, t), dtype=float)
        scale = float(np.max(np.abs(vals)))
        if scale == 0.0:
            continue
        if np.min(np.diff(vals)) < -tol * scale or vals[0] < -tol * scale:
            raise CertificateError(f"supersolution not nondecreasing / nonnegative at t={t:g}")
        dtau = 1e-5 * max(t, 1e-3)
        t0 = max(t - dtau, 0.0)
        vt = (np.asarray(sup(grid, t + dtau)) - np.asarray(sup(grid, t0))) / (t + dtau - t0)
        f_phi = path_operator(coeffs, drift_values, sup, grid, t)
        residual = vt[1:] - f_phi
        res_scale = float(np.max(np.abs(f_phi))) or scale
        if np.min(residual) < -tol * res_scale:
            raise CertificateError(
                f"residual phi_t - F phi = {np.min(residual):.3e} < -{tol:g} * {res_scale:.3e} "
                f"at t={t:g}")


def comparison_test(coeffs: FlowCoefficients, drift: DriftSpec, length: float, sub, sup,
                    horizon: float, nodes: int = 200, dt: Optional[float] = None,
                    tol: float = 1e-4, n_certificate_times: int = 50) -> bool:
    """Evolve ``sub`` (initial profile) and check it stays below the path ``sup``.

    ``sup(s, t)`` must be a certified supersolution: nondecreasing in s,
    ``phi_t >= F phi`` up to ``tol``, and above ``sub`` at t = 0.  A failed
    certificate raises :class:`CertificateError`; the boolean result is the
    comparison verdict only.
    """
    grid = np.linspace(0.0, length, nodes + 1)
    sub0 = np.asarray(sub(grid) if callable(sub) else sub, dtype=float)
    sup0 = np.asarray(sup(grid, 0.0), dtype=float)
    if np.any(sup0 < sub0 - tol * np.max(np.abs(sub0))):
        raise CertificateError("supersolution does not dominate the initial profile")
    certify_supersolution(coeffs, drift, grid, sup,
                          np.linspace(0.0, horizon, n_certificate_times), tol)
    state = make_state(length, nodes, sub0)
    if dt is None:
        dt = default_dt(length, nodes, coeffs, state)
    drift_values = np.asarray(drift(grid[1:]), dtype=float) * np.ones(nodes)
    n_steps = max(1, int(math.ceil(horizon / dt - 1e-9)))
    for k in range(n_steps):
        if k == 0:
            state = step(state, coeffs, drift, dt / 2, 1.0, drift_values)
            state = step(state, coeffs, drift, dt / 2, 1.0, drift_values)
        else:
            state = step(state, coeffs, drift, dt, 0.5, drift_values)
        upper_path = np.asarray(sup(grid, state.time), dtype=float)
        if np.any(upper_path < state.values - tol * np.max(np.abs(state.values))):
            return False
    return True
