"""First eigenvalue of a comparison problem by two independent routes.

Shooting works on the reduced interval [0, L] with phi(0) = 0, phi'(L) = 0;
a symmetric Neumann problem with odd drift reduces to it because its first
nonconstant eigenfunction is odd.  The ODE is integrated in flux form

    phi' = y / w,    y' = -lambda w phi,     y = w phi',

from both ends towards the midpoint, where the Wronskian of the two
solutions is the miss function.  Starting the right solution at the
Neumann end keeps it regular even where ``w`` vanishes there.

The weighted finite-difference route discretizes ``-(w phi')' = lambda w phi``
on the full interval without using the reduction, which is what makes the
two routes a genuine cross-check.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .errors import (DisagreementError, ExtrapolationError, NoBracketError, SolverError,
                     StiffnessError)
from .models import (DIRICHLET_NEUMANN, SINGULAR_SNAP_RTOL, SYMMETRIC_NEUMANN,
                     ComparisonProblem, GeometryInput, geometry_drift,
                     neumann_problem)


@dataclass(frozen=True)
class SolverConfig:
    rel_tol: float = 1e-10
    max_nodes: int = 2 ** 20
    refinement_levels: int = 4
    # Used by the builders in this module (eigenvalue_curve, problem_for_diameter)
    # when deciding whether a grid point sits at the singular limit.
    singular_limit: bool = False
    base_nodes: int = 400
    consensus_tol: float = 1e-6
    ode_rtol: float = 1e-12
    eps_sequence: tuple = (1e-4, 1e-5, 1e-6, 1e-7)
    n_samples: int = 401

    def __post_init__(self):
        if self.rel_tol < 1e-13:
            raise ValueError("rel_tol must be >= 1e-13")
        if self.refinement_levels < 2:
            raise ValueError("refinement_levels must be >= 2")
        if self.base_nodes * 2 ** (self.refinement_levels - 1) > self.max_nodes:
            raise ValueError("finest mesh exceeds max_nodes")


@dataclass
class EigenResult:
    lam: float
    method: str
    error_bracket: float
    t: np.ndarray
    phi: np.ndarray
    mesh: dict = field(default_factory=dict)
    singular_limit: bool = False
    details: dict = field(default_factory=dict)

    @property
    def relative_bracket(self) -> float:
        return self.error_bracket / abs(self.lam)

    def summary(self) -> dict:
        return {
            "lambda": self.lam,
            "bracket": self.error_bracket,
            "method": self.method,
            "singular_limit": self.singular_limit,
        }


# -- shooting -----------------------------------------------------------------


class _Shooter:
    """Two-sided shooting with a Wronskian miss at the midpoint.

    The left solution starts at t = 0 with (phi, y) = (0, 1); the right one
    starts at ``t_start`` (L, or L - eps at a singular end) with
    (phi, y) = (1, 0) and is integrated backwards, which damps the
    non-normalizable mode of a singular endpoint instead of amplifying it.
    """

    def __init__(self, problem: ComparisonProblem, rtol: float):
        self.problem = problem
        self.w = problem.drift.scalar_weight()
        self.rtol = rtol
        self.atol = 1e-3 * rtol
        self.t_mid = 0.5 * problem.length

    def _ivp(self, lam, t0, t1, u0, dense):
        w = self.w

        def rhs(t, u):
            wt = w(t)
            return (u[1] / wt, -lam * wt * u[0])

        sol = solve_ivp(rhs, (t0, t1), u0, method="DOP853", rtol=self.rtol, atol=self.atol,
                        dense_output=dense)
        if sol.status != 0:
            raise StiffnessError(f"integration failed at lambda={lam}: {sol.message}")
        return sol

    def integrate(self, lam: float, t_start: float, dense: bool = False):
        left = self._ivp(lam, 0.0, self.t_mid, (0.0, 1.0), dense)
        right = self._ivp(lam, t_start, self.t_mid, (1.0, 0.0), dense)
        return left, right

    def miss(self, lam: float, t_start: float) -> float:
        left, right = self.integrate(lam, t_start)
        pl, yl = left.y[:, -1]
        pr, yr = right.y[:, -1]
        return float(pr * yl - pl * yr)

    def sign_changes(self, lam: float, t_start: float) -> int:
        left, right = self.integrate(lam, t_start)
        scale = left.y[0, -1] / right.y[0, -1]
        phi = np.concatenate((left.y[0, 1:], scale * right.y[0]))
        return int(np.count_nonzero(np.diff(np.sign(phi)) != 0)) + int(scale <= 0)

    def eigenfunction(self, lam: float, t_start: float, n: int):
        left, right = self.integrate(lam, t_start, dense=True)
        scale = left.y[0, -1] / right.y[0, -1]
        t = np.linspace(0.0, t_start, n)
        phi = np.where(t <= self.t_mid, left.sol(np.minimum(t, self.t_mid))[0],
                       scale * right.sol(np.maximum(t, self.t_mid))[0])
        return t, phi


def _bracket_first_root(f: Callable[[float], float], start: float, factor: float = 1.3,
                        max_steps: int = 200):
    lo = start
    f_lo = f(lo)
    steps = 0
    while f_lo <= 0:
        lo /= 2.0
        f_lo = f(lo)
        steps += 1
        if steps > 60:
            raise NoBracketError(f"miss function never positive down to lambda={lo:g}")
    hi = lo
    for _ in range(max_steps):
        hi = lo * factor
        f_hi = f(hi)
        if f_hi < 0:
            return lo, hi
        lo, f_lo = hi, f_hi
    raise NoBracketError(f"no sign change of the miss function in [{start:g}, {hi:g}]")


def _root(shooter: _Shooter, t_start: float, lo: float, hi: float, rel_tol: float) -> float:
    return brentq(lambda lam: shooter.miss(lam, t_start), lo, hi,
                  xtol=1e-300, rtol=max(0.1 * rel_tol, 4.5e-16), maxiter=200)


def _local_root(shooter: _Shooter, t_start: float, guess: float, rel_tol: float) -> float:
    """Root near a known eigenvalue estimate (expanding bracket)."""
    f = lambda lam: shooter.miss(lam, t_start)
    delta = 1e-6 * guess
    while delta < 0.25 * guess:
        lo, hi = guess - delta, guess + delta
        if f(lo) > 0 > f(hi):
            return _root(shooter, t_start, lo, hi, rel_tol)
        delta *= 4.0
    lo, hi = _bracket_first_root(f, 0.5 * guess)
    return _root(shooter, t_start, lo, hi, rel_tol)


def _first_root(problem, cfg, shooter, t_start):
    L = problem.length
    start = 0.5 * (math.pi / (2.0 * L)) ** 2
    lo, hi = _bracket_first_root(lambda lam: shooter.miss(lam, t_start), start)
    lam = _root(shooter, t_start, lo, hi, cfg.rel_tol)
    if shooter.sign_changes(lam, t_start) != 0:
        raise NoBracketError(f"root {lam:g} has an eigenfunction with interior zeros")
    return lam


def solve_shooting(problem: ComparisonProblem, cfg: SolverConfig = SolverConfig()) -> EigenResult:
    """Smallest positive eigenvalue of the reduced problem on [0, L] by shooting.

    At a singular endpoint the right-hand start is moved to L(1 - eps) for
    each eps in ``cfg.eps_sequence`` and the roots are extrapolated to eps = 0.
    """
    L = problem.length
    fine = _Shooter(problem, cfg.ode_rtol)
    coarse = _Shooter(problem, cfg.ode_rtol * 100.0)

    if not problem.singular_limit:
        lam = _first_root(problem, cfg, fine, L)
        lam_coarse = _local_root(coarse, L, lam, cfg.rel_tol)
        bracket = abs(lam - lam_coarse) + cfg.rel_tol * lam
        t_end = L
        eps_values = {}
    else:
        values = []
        t_ends = [L * (1.0 - eps) for eps in cfg.eps_sequence]
        lam = _first_root(problem, cfg, fine, t_ends[0])
        values.append(lam)
        for te in t_ends[1:]:
            lam = _local_root(fine, te, lam, cfg.rel_tol)
            values.append(lam)
        if fine.sign_changes(lam, t_ends[-1]) != 0:
            raise NoBracketError("singular-limit root lost its one-signed eigenfunction")
        lam_coarse = _local_root(coarse, t_ends[-1], lam, cfg.rel_tol)
        lam, ext_err = _extrapolate_eps(values)
        bracket = ext_err + abs(values[-1] - lam_coarse) + cfg.rel_tol * lam
        t_end = t_ends[-1]
        eps_values = dict(zip(cfg.eps_sequence, values))

    t, phi = fine.eigenfunction(lam, t_end, cfg.n_samples)
    phi = phi / np.max(np.abs(phi))
    return EigenResult(lam=float(lam), method="shooting", error_bracket=float(bracket), t=t,
                       phi=phi, mesh={"ode_rtol": cfg.ode_rtol, "t_end": t_end},
                       singular_limit=problem.singular_limit,
                       details={"eps_values": eps_values, "coarse_lambda": lam_coarse})


def _extrapolate_eps(values):
    """Limit of lambda(eps) as eps -> 0 from a geometric eps-sequence.

    Returns (estimate, error bracket).  When the successive differences
    contract geometrically the Aitken limit is used, otherwise the last value.
    """
    v = np.asarray(values, dtype=float)
    d = np.diff(v)
    noise = 1e-14 * abs(v[-1])
    if len(d) < 2 or abs(d[-1]) <= noise:
        return float(v[-1]), float(abs(d[-1]) if len(d) else 0.0)
    r = d[-1] / d[-2] if d[-2] != 0 else 0.0
    if 0.0 < r < 0.9:
        limit = v[-1] + d[-1] * r / (1.0 - r)
        return float(limit), float(abs(limit - v[-1]) + abs(d[-1]) * r)
    return float(v[-1]), float(10.0 * abs(d[-1]))


# -- weighted finite differences ----------------------------------------------


def fd_level(weight_fn: Callable, a: float, b: float, n: int, dirichlet_left: bool,
             index: int):
    """Eigenpair ``index`` of the vertex-centred discretization of -(w u')' = lam w u.

    ``n`` intervals on [a, b].  Flux weights are taken at cell midpoints and
    the lumped mass of each half cell at its midpoint, so ``w`` is never
    evaluated at an endpoint; where it vanishes the Neumann condition is the
    natural one.
    """
    h = (b - a) / n
    nodes = a + h * np.arange(n + 1)
    nodes[-1] = b
    wm = np.asarray(weight_fn(nodes[:-1] + 0.5 * h))
    wl = np.asarray(weight_fn(nodes[:-1] + 0.25 * h))
    wr = np.asarray(weight_fn(nodes[1:] - 0.25 * h))
    mass = np.zeros(n + 1)
    mass[:-1] += 0.5 * h * wl
    mass[1:] += 0.5 * h * wr
    diag = np.zeros(n + 1)
    diag[:-1] += wm / h
    diag[1:] += wm / h
    off = -wm / h
    if dirichlet_left:
        nodes, mass, diag, off = nodes[1:], mass[1:], diag[1:], off[1:]
    if np.any(mass <= 0) or not np.all(np.isfinite(mass)):
        raise SolverError("weight not positive inside the interval")
    s = 1.0 / np.sqrt(mass)
    # bisection to full precision: the symmetrized matrix norm is dominated by
    # endpoint rows when w vanishes to high order, so the default tolerance
    # (eps * norm) is far too loose for the low eigenvalues
    vals, vecs = eigh_tridiagonal(diag * s * s, off * s[:-1] * s[1:], select="i",
                                  select_range=(0, index), lapack_driver="stebz",
                                  tol=np.finfo(float).tiny)
    phi = vecs[:, index] * s
    if dirichlet_left:
        nodes = np.concatenate(([a], nodes))
        phi = np.concatenate(([0.0], phi))
    return vals, nodes, phi


def richardson(values, ratio: float = 2.0, order: int = 2):
    """Richardson table for a sequence refined by ``ratio`` with even error powers.

    Returns (diagonal estimates, full table).
    """
    n = len(values)
    table = [[float(v)] for v in values]
    for k in range(1, n):
        for j in range(1, k + 1):
            f = ratio ** (order * j)
            prev = table[k][j - 1]
            table[k].append(prev + (prev - table[k - 1][j - 1]) / (f - 1.0))
    diag = [table[k][k] for k in range(n)]
    return diag, table


def weighted_fd(weight_fn: Callable, a: float, b: float, dirichlet_left: bool, index: int,
                cfg: SolverConfig = SolverConfig(), singular: bool = False) -> EigenResult:
    """Eigenvalue ``index`` of -(w u')' = lam w u, Richardson-extrapolated over refinements."""
    levels = []
    vecs = None
    for k in range(cfg.refinement_levels):
        n = cfg.base_nodes * 2 ** k
        vals, nodes, phi = fd_level(weight_fn, a, b, n, dirichlet_left, index)
        levels.append(vals[index])
        vecs = (nodes, phi, vals)
    diffs = np.abs(np.diff(levels))
    scale = abs(levels[-1])
    if len(diffs) >= 2 and diffs[-1] > diffs[-2] and diffs[-1] > 1e-12 * scale:
        raise ExtrapolationError(f"eigenvalue sequence not contracting: {levels}")
    diag, _ = richardson(levels)
    lam = diag[-1]
    bracket = abs(diag[-1] - diag[-2])
    observed = None
    if len(levels) >= 3 and diffs[-1] > 0 and diffs[-2] > 1e3 * 1e-15 * scale:
        observed = float(np.log2(diffs[-2] / diffs[-1]))
    nodes, phi, vals = vecs
    if index > 0:
        phi = phi if phi[-1] > 0 else -phi
    else:
        phi = phi if np.sum(phi) > 0 else -phi
    phi = phi / np.max(np.abs(phi))
    return EigenResult(
        lam=float(lam), method="weighted_fd", error_bracket=float(bracket), t=nodes, phi=phi,
        mesh={"base_nodes": cfg.base_nodes, "levels": cfg.refinement_levels,
              "finest_nodes": cfg.base_nodes * 2 ** (cfg.refinement_levels - 1)},
        singular_limit=singular,
        details={"level_values": [float(v) for v in levels], "observed_order": observed,
                 "lowest_values": [float(v) for v in vals]})


def solve_weighted_fd(problem: ComparisonProblem,
                      cfg: SolverConfig = SolverConfig()) -> EigenResult:
    """Weighted FD on the full interval; the constant mode is deflated for Neumann."""
    a, b = problem.interval
    if problem.bc == SYMMETRIC_NEUMANN:
        res = weighted_fd(problem.drift.weight, a, b, False, 1, cfg, problem.singular_limit)
        res.details["constant_mode"] = res.details["lowest_values"][0]
    else:
        res = weighted_fd(problem.drift.weight, a, b, True, 0, cfg, problem.singular_limit)
    return res


# -- consensus ----------------------------------------------------------------


def solve(problem: ComparisonProblem, cfg: SolverConfig = SolverConfig()) -> EigenResult:
    """Run both routes and insist that they agree."""
    shoot = solve_shooting(problem, cfg)
    fd = solve_weighted_fd(problem, cfg)
    rel = abs(shoot.lam - fd.lam) / abs(shoot.lam)
    allowed = max(cfg.consensus_tol, (shoot.error_bracket + fd.error_bracket) / abs(shoot.lam))
    if rel > allowed:
        raise DisagreementError(
            f"shooting {shoot.lam:.12g} vs weighted FD {fd.lam:.12g} "
            f"(relative gap {rel:.2e} > {allowed:.2e})", shoot, fd)
    best = shoot if shoot.error_bracket <= fd.error_bracket else fd
    return EigenResult(
        lam=best.lam, method="consensus", error_bracket=best.error_bracket, t=shoot.t,
        phi=shoot.phi, mesh=fd.mesh, singular_limit=problem.singular_limit,
        details={"shooting": shoot.lam, "weighted_fd": fd.lam,
                 "shooting_bracket": shoot.error_bracket, "fd_bracket": fd.error_bracket,
                 "relative_gap": rel, "chosen": best.method,
                 "observed_order": fd.details.get("observed_order")})


SOLVERS = {"shooting": solve_shooting, "fd": solve_weighted_fd, "weighted_fd": solve_weighted_fd,
           "both": solve, "consensus": solve}


def rayleigh_quotient(problem: ComparisonProblem, t, phi, n_fine: int = 20001) -> float:
    """int w phi'^2 / int w phi^2 for sampled ``phi`` (cubic-spline derivative)."""
    from scipy.interpolate import CubicSpline
    from scipy.integrate import simpson

    spline = CubicSpline(t, phi)
    tt = np.linspace(t[0], t[-1], n_fine)
    w = problem.drift.weight(tt)
    return float(simpson(w * spline(tt, 1) ** 2, x=tt) / simpson(w * spline(tt) ** 2, x=tt))


# -- curves -------------------------------------------------------------------


class CurveError(SolverError):
    def __init__(self, param, cause):
        super().__init__(f"at D={param!r}: {cause}")
        self.param = param
        self.cause = cause


def problem_for_diameter(g: GeometryInput, diameter: float,
                         singular_limit: Optional[bool] = None) -> ComparisonProblem:
    """Neumann problem at ``diameter``; the singular flag is set automatically at D = 2 t_max."""
    g = g.with_extent(diameter=diameter)
    if singular_limit is None:
        tm = geometry_drift(g).t_max
        singular_limit = math.isfinite(tm) and abs(diameter / 2 - tm) <= SINGULAR_SNAP_RTOL * tm
    return neumann_problem(g, singular_limit=singular_limit)


def _curve_point(args):
    g, D, cfg, method = args
    try:
        return D, SOLVERS[method](problem_for_diameter(g, D), cfg)
    except Exception as exc:  # noqa: BLE001 -- re-raised with the offending D attached
        raise CurveError(D, exc) from exc


def default_workers() -> int:
    env = os.environ.get("SPECTRAL_BOUNDS_THREADS")
    return max(1, int(env)) if env else 1


def eigenvalue_curve(g: GeometryInput, d_grid, cfg: SolverConfig = SolverConfig(),
                     method: str = "both", workers: Optional[int] = None) -> list:
    """[(D, EigenResult)] over ``d_grid``, in grid order."""
    workers = default_workers() if workers is None else workers
    jobs = [(g, float(D), cfg, method) for D in d_grid]
    if workers <= 1:
        return [_curve_point(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_curve_point, jobs))
