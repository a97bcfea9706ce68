"""Oracle and invariant checks, grouped by acceptance criterion.

Each suite returns a list of :class:`Check` records.  A record with
``passed=None`` is informational: it is reported but never fails a run.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from . import closed_forms as cf
from .eigensolver import SolverConfig, solve, solve_shooting, solve_weighted_fd
from .errors import CertificateError, SolverError
from .heat_flow import (FlowCoefficients, comparison_test, decay_rate, eigenfunction_path,
                        evolve)
from .model_spaces import (RadialModel, eigenfunction_residual, radial_first_eigenvalue,
                           radial_first_eigenvalue_numeric, sharpness_gap)
from .models import (GeometryInput, dirichlet_problem, generalized_problem, geometry_drift,
                     neumann_problem, singular_diameter)

PI2 = math.pi ** 2


@dataclass
class Check:
    name: str
    criterion: int
    measured: Optional[float]
    expected: Optional[float]
    tol: Optional[float]
    passed: Optional[bool]
    relation: str = "rel"
    note: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("measured", "expected", "tol"):
            v = d[k]
            if v is not None:
                v = float(v)
                d[k] = v if math.isfinite(v) else None
        return d


def _finite(x):
    return x is not None and math.isfinite(x)


def rel_check(name, criterion, measured, expected, tol, note="") -> Check:
    ok = _finite(measured) and abs(measured - expected) <= tol * abs(expected)
    return Check(name, criterion, measured, expected, tol, bool(ok), "rel", note)


def le_check(name, criterion, measured, bound, slack=0.0, note="") -> Check:
    """measured <= bound + slack."""
    ok = _finite(measured) and measured <= bound + slack
    return Check(name, criterion, measured, bound, slack, bool(ok), "le", note)


def bool_check(name, criterion, ok, note="", measured=None, expected=None) -> Check:
    return Check(name, criterion, measured, expected, None, bool(ok), "bool", note)


def report(name, criterion, measured, note="") -> Check:
    return Check(name, criterion, measured, None, None, None, "report", note)


def failed(name, criterion, exc) -> Check:
    return Check(name, criterion, None, None, None, False, "error",
                 f"{type(exc).__name__}: {exc}")


def _geo(kind, dim, kappa, **kw):
    return GeometryInput(kind, dim, kappa, **kw)


CLASSES = (("riemannian", 3), ("kahler", 2), ("quaternion_kahler", 2))


def _sing_d(kind, dim, kappa):
    return singular_diameter(_geo(kind, dim, kappa))


# -- 1 ------------------------------------------------------------------------


def flat_anchor(cfg: SolverConfig = SolverConfig()) -> list:
    out = []
    for kind, dim in CLASSES:
        for D in (0.5, 1.0, 2.0, 4.0):
            name = f"flat {kind} dim={dim} D={D}"
            try:
                lam = solve(neumann_problem(_geo(kind, dim, 0.0, diameter=D)), cfg).lam
                out.append(rel_check(name, 1, lam, PI2 / D ** 2, 1e-8))
            except SolverError as exc:
                out.append(failed(name, 1, exc))
    return out


# -- 2 to 4: model spaces -----------------------------------------------------


def _radial(family, dims, criterion, cfg):
    out = []
    for d in dims:
        model = RadialModel(family, d)
        exact = radial_first_eigenvalue(model)
        name = f"radial {family} dim={d}"
        try:
            out.append(rel_check(name, criterion,
                                 radial_first_eigenvalue_numeric(model, cfg).lam, exact, 1e-6))
        except SolverError as exc:
            out.append(failed(name, criterion, exc))
        r = np.linspace(0.01, model.diameter - 0.01, 2001)
        res = float(np.max(np.abs(eigenfunction_residual(model, r))))
        out.append(le_check(f"eigenfunction residual {family} dim={d}", criterion, res, 1e-10))
    return out


def sphere(cfg: SolverConfig = SolverConfig()) -> list:
    out = []
    for n in (2, 3, 5):
        name = f"riemannian singular limit n={n}"
        try:
            p = neumann_problem(_geo("riemannian", n, 1.0, diameter=math.pi), singular_limit=True)
            out.append(rel_check(name, 2, solve(p, cfg).lam, float(n), 1e-6))
        except SolverError as exc:
            out.append(failed(name, 2, exc))
    return out + _radial("sphere", (2, 3, 5), 2, cfg)


def quaternionic(cfg: SolverConfig = SolverConfig()) -> list:
    out = _radial("quaternionic_projective", (2, 3), 3, cfg)
    for m in (2, 3):
        name = f"qk comparison at HP^{m} diameter"
        try:
            p = neumann_problem(_geo("quaternion_kahler", m, 1.0, diameter=math.pi / 2),
                                singular_limit=True)
            lam = solve(p, cfg).lam
            out.append(le_check(name, 3, lam, 8.0 * (m + 1), 1e-6))
            out.append(report(f"sharpness gap m={m} kappa=1", 3, 8.0 * (m + 1) - lam,
                              "8(m+1) minus comparison eigenvalue; reported, not asserted"))
        except SolverError as exc:
            out.append(failed(name, 3, exc))
    for kappa in (2.0, 4.0):
        name = f"radial HP^2 scaling kappa={kappa}"
        model = RadialModel("quaternionic_projective", 2, kappa)
        try:
            out.append(rel_check(name, 3, radial_first_eigenvalue_numeric(model, cfg).lam,
                                 24.0 * kappa, 1e-6))
        except SolverError as exc:
            out.append(failed(name, 3, exc))
    try:
        g1, g4 = sharpness_gap(2, 1.0, cfg), sharpness_gap(2, 4.0, cfg)
        out.append(rel_check("sharpness gap scales with kappa", 3, g4, 4 * g1, 1e-6))
    except SolverError as exc:
        out.append(failed("sharpness gap scales with kappa", 3, exc))
    return out


def complex_projective(cfg: SolverConfig = SolverConfig()) -> list:
    return _radial("complex_projective", (2, 3), 4, cfg)


# -- 5 ------------------------------------------------------------------------


def consensus_grid():
    """27 (kind, dim, kappa, D, singular) points; the last D at kappa = 1 is singular."""
    pts = []
    for kind, dim in CLASSES:
        for kappa in (0.0, 0.5, 1.0):
            ds = [0.5, 1.0, 2.0] if kappa < 1 else [0.5, 1.0, _sing_d(kind, dim, 1.0)]
            for i, D in enumerate(ds):
                pts.append((kind, dim, kappa, D, kappa == 1.0 and i == 2))
    return pts


def consensus(cfg: SolverConfig = SolverConfig()) -> list:
    out = []
    for kind, dim, kappa, D, sing in consensus_grid():
        name = f"shooting vs fd {kind} dim={dim} kappa={kappa} D={D:.6g}" + (
            " singular" if sing else "")
        try:
            p = neumann_problem(_geo(kind, dim, kappa, diameter=D), singular_limit=sing)
            a, b = solve_shooting(p, cfg).lam, solve_weighted_fd(p, cfg).lam
            tol = 1e-5 if sing else 1e-6
            out.append(rel_check(name, 5, a, b, tol))
        except SolverError as exc:
            out.append(failed(name, 5, exc))
    return out


# -- 6 ------------------------------------------------------------------------


def dense_grid_sup(A: float, B: float, step: float = 1e-4) -> float:
    """Independent sup of 4As(1-s) + Bs: grid maximum, then a bounded local polish.

    The grid covers the closure [0, 1]; the supremum over the open interval
    equals the maximum over its closure by continuity.
    """
    f = lambda s: 4 * A * s * (1 - s) + B * s
    s = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    i = int(np.argmax(f(s)))
    lo, hi = s[max(i - 1, 0)], s[min(i + 1, len(s) - 1)]
    best = minimize_scalar(lambda x: -f(x), bounds=(lo, hi), method="bounded",
                           options={"xatol": 1e-14})
    return max(float(f(s[i])), float(-best.fun))


def _dominance(kind, m, kappa, D, bound, cfg, gen=None):
    tag = f"a={gen[0]} b={gen[1]} " if gen else ""
    name = f"explicit <= numeric {kind} {tag}m={m} kappa={kappa} D={D:.6g}"
    try:
        if gen:
            p = generalized_problem(gen[0], gen[1], m, kappa, kappa, D)
        else:
            p = neumann_problem(_geo(kind, m, kappa, diameter=D))
        r = solve(p, cfg)
        return le_check(name, 6, bound, r.lam, r.error_bracket)
    except SolverError as exc:
        return failed(name, 6, exc)


def explicit_bounds(cfg: SolverConfig = SolverConfig(), seed: int = 0) -> list:
    out = []
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        A = float(10 ** rng.uniform(-2, 2))
        B = float(rng.uniform(0, 8 * A))
        exact = cf.sup_interpolation(A, B)
        worst = max(worst, abs(dense_grid_sup(A, B) - exact) / exact)
    out.append(le_check("closed form vs dense s-grid (100 random pairs)", 6, worst, 1e-10))

    for m in (2, 3, 4):
        for kappa in (0.0, 0.25, 1.0):
            sd = _sing_d("quaternion_kahler", m, kappa)
            for D in (0.5, 1.0, 0.9 * sd if math.isfinite(sd) else 4.0):
                out.append(_dominance("quaternion_kahler", m, kappa, D,
                                      cf.explicit_bound_qk(m, kappa, D), cfg))
                out.append(_dominance("kahler", m, kappa, D,
                                      cf.explicit_bound_kahler(m, kappa, kappa, D), cfg))
                B_gen = cf.explicit_bound_generalized(2, 3, m, kappa, kappa, D)
                out.append(bool_check(f"(2,3) specialization m={m} kappa={kappa} D={D:.6g}", 6,
                                      B_gen == cf.explicit_bound_qk(m, kappa, D)))
                out.append(bool_check(f"(1,1) specialization m={m} kappa={kappa} D={D:.6g}", 6,
                                      cf.explicit_bound_generalized(1, 1, m, kappa, kappa, D)
                                      == cf.explicit_bound_kahler(m, kappa, kappa, D)))
    for a, b in ((1, 2), (3, 1)):
        for m in (2, 3):
            for kappa in (0.25, 1.0):
                sd = 2 * generalized_problem(a, b, m, kappa, kappa, 1.0).drift.t_max
                for D in (1.0, 0.9 * sd):
                    out.append(_dominance("generalized", m, kappa, D,
                                          cf.explicit_bound_generalized(a, b, m, kappa, kappa, D),
                                          cfg, gen=(a, b)))
    t = np.linspace(-0.45, 0.45, 91)
    for m in (2, 3):
        qk = geometry_drift(_geo("quaternion_kahler", m, 1.0))
        g23 = generalized_problem(2, 3, m, 1.0, 1.0, 1.0).drift
        out.append(le_check(f"(2,3) drift equals qk drift m={m}", 6,
                            float(np.max(np.abs(qk(t) - g23(t)))), 1e-15))
        ka = geometry_drift(_geo("kahler", m, 1.0, kappa2=0.5))
        g11 = generalized_problem(1, 1, m, 1.0, 0.5, 1.0).drift
        out.append(le_check(f"(1,1) drift equals kahler drift m={m}", 6,
                            float(np.max(np.abs(ka(t) - g11(t)))), 1e-15))
    return out


# -- 7 ------------------------------------------------------------------------


def monotonicity(cfg: SolverConfig = SolverConfig()) -> list:
    out = []
    for kind, dim in CLASSES:
        sd = _sing_d(kind, dim, 1.0)
        grid = np.linspace(0.3, 0.95 * sd, 8)
        name = f"lambda decreasing in D {kind} dim={dim} kappa=1"
        try:
            lams = [solve(neumann_problem(_geo(kind, dim, 1.0, diameter=float(D))), cfg).lam
                    for D in grid]
            steps = np.diff(lams)
            out.append(bool_check(name, 7, np.all(steps < 0), measured=float(np.max(steps)),
                                  expected=0.0, note="largest consecutive difference"))
        except SolverError as exc:
            out.append(failed(name, 7, exc))
        name = f"lambda nondecreasing in kappa {kind} dim={dim} D=1"
        try:
            res = [solve(neumann_problem(_geo(kind, dim, float(k), diameter=1.0)), cfg)
                   for k in np.linspace(0.0, 1.0, 6)]
            worst = min(r2.lam - r1.lam + r1.error_bracket + r2.error_bracket
                        for r1, r2 in zip(res, res[1:]))
            out.append(bool_check(name, 7, worst >= 0, measured=worst, expected=0.0,
                                  note="smallest consecutive difference plus brackets"))
        except SolverError as exc:
            out.append(failed(name, 7, exc))
    return out


# -- 8 ------------------------------------------------------------------------


FLOW_GEOMETRIES = (("riemannian", 2), ("riemannian", 3), ("riemannian", 4), ("kahler", 2),
                   ("kahler", 3), ("quaternion_kahler", 2), ("quaternion_kahler", 3))


def flow_grid(full: bool = False):
    """(kind, dim, kappa, D) combinations; 12 by default, 28 with ``full``."""
    pts = [(k, d, kappa, D) for k, d in FLOW_GEOMETRIES for kappa in (0.0, 0.5)
           for D in (1.0, 2.0)]
    if full:
        return pts
    picks = (("riemannian", 2), ("kahler", 3), ("quaternion_kahler", 2))
    return [p for p in pts if (p[0], p[1]) in picks]


def flat_decay_errors(levels=(50, 100, 200), D: float = 1.0, T: float = 0.05):
    """Sup-norm error against exp(-pi^2 t / D^2) sin(pi s / D) with h and dt halved together."""
    L = D / 2
    drift = geometry_drift(_geo("quaternion_kahler", 2, 0.0))
    errs = []
    for n in levels:
        dt = T / (n // 2)
        traj = evolve(lambda s: np.sin(math.pi * s / D), FlowCoefficients.heat(), drift, L, T,
                      nodes=n, dt=dt, record=1)
        exact = math.exp(-PI2 * traj.times[-1] / D ** 2) * np.sin(math.pi * traj.grid / D)
        errs.append(float(np.max(np.abs(traj.profiles[-1] - exact))))
    return errs


def flow(cfg: SolverConfig = SolverConfig(), full: bool = False) -> list:
    out = []
    heat = FlowCoefficients.heat()
    for kind, dim, kappa, D in flow_grid(full):
        name = f"decay rate {kind} dim={dim} kappa={kappa} D={D}"
        try:
            p = neumann_problem(_geo(kind, dim, kappa, diameter=D))
            rep = decay_rate(heat, p, reference_lambda=solve(p, cfg).lam)
            out.append(rel_check(name, 8, rep.rate, rep.reference_lambda, 0.01))
            scale = float(rep.details.get("sup_norm_increase", 0.0))
            out.append(le_check(f"sup norm nonincreasing {kind} dim={dim} kappa={kappa} D={D}",
                                8, scale, 0.0, 1e-12))
            out.append(bool_check(f"monotone profile kept {kind} dim={dim} kappa={kappa} D={D}",
                                  8, rep.details["min_slope"] >= -1e-8,
                                  measured=rep.details["min_slope"], expected=0.0))
        except SolverError as exc:
            out.append(failed(name, 8, exc))
    errs = flat_decay_errors()
    ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
    for i, r in enumerate(ratios):
        out.append(Check(f"flat decay error ratio under halving #{i + 1}", 8, r, 3.5, None,
                         bool(r >= 3.5), "ge"))
    bracket = abs(errs[-2] - errs[-1])
    out.append(le_check("flat decay error within scheme bracket", 8, errs[-1], bracket,
                        note="finest error vs difference of the last two levels"))
    out.extend(_eigenfunction_invariance(cfg))
    return out


def _eigenfunction_invariance(cfg):
    name = "log-derivative equals lambda from eigenfunction start"
    try:
        p = neumann_problem(_geo("riemannian", 3, 1.0, diameter=3.0))
        r = solve(p, cfg)
        phi = eigenfunction_path(r.t, r.phi, 0.0)
        traj = evolve(lambda s: phi(s, 0.0), FlowCoefficients.heat(), p.drift, p.length,
                      10.0 / r.lam, nodes=400)
        t, nrm = traj.step_times, traj.sup_norms
        rates = -np.diff(np.log(nrm)) / np.diff(t)
        worst = float(np.max(np.abs(rates[1:] - r.lam)) / r.lam)
        return [le_check(name, 8, worst, 0.005)]
    except SolverError as exc:
        return [failed(name, 8, exc)]


# -- 9 ------------------------------------------------------------------------


COMPARISON_CASES = (("quaternion_kahler", 2, 1.0, 1.0), ("riemannian", 3, 1.0, 3.0),
                    ("kahler", 2, 0.5, 1.0))


def comparison(cfg: SolverConfig = SolverConfig()) -> list:
    out = []
    heat = FlowCoefficients.heat()
    # the certificate differentiates a spline through the samples twice
    cfg = replace(cfg, n_samples=max(cfg.n_samples, 4001))
    for kind, dim, kappa, D in COMPARISON_CASES:
        tag = f"{kind} dim={dim} kappa={kappa} D={D}"
        try:
            p = neumann_problem(_geo(kind, dim, kappa, diameter=D))
            r = solve(p, cfg)
        except SolverError as exc:
            out.append(failed(f"comparison setup {tag}", 9, exc))
            continue
        phi0 = eigenfunction_path(r.t, r.phi, 0.0)
        sub = lambda s, f=phi0: f(s, 0.0)
        horizon = 10.0 / r.lam
        for label, lam_t in (("1.1 x exact solution", r.lam), ("decay 0.9 lambda", 0.9 * r.lam)):
            name = f"domination {label} {tag}"
            try:
                ok = comparison_test(heat, p.drift, p.length, sub,
                                     eigenfunction_path(r.t, r.phi, lam_t, 1.1), horizon)
                out.append(bool_check(name, 9, ok))
            except CertificateError as exc:
                out.append(Check(name, 9, None, None, None, False, "certificate", str(exc)))
        name = f"corrupted certificate rejected {tag}"
        try:
            verdict = comparison_test(heat, p.drift, p.length, sub,
                                      eigenfunction_path(r.t, r.phi, 1.1 * r.lam, 1.1), horizon)
            out.append(bool_check(name, 9, False, note=f"returned verdict {verdict}"))
        except CertificateError as exc:
            out.append(bool_check(name, 9, True, note=str(exc)))
    return out


# -- 10 -----------------------------------------------------------------------


REFLECTION_CASES = (("riemannian", 3, 1.0, 0.6), ("riemannian", 4, 0.0, 1.0),
                    ("kahler", 2, 0.5, 0.5), ("kahler", 3, 1.0, 0.3),
                    ("quaternion_kahler", 2, 1.0, 0.4), ("quaternion_kahler", 3, 0.25, 0.8))


def reflection_values(kind, dim, kappa, R, cfg=SolverConfig()):
    """(Dirichlet lambda at R with convexity 0, Neumann mu at D = 2R, Neumann mu at D = R)."""
    g = _geo(kind, dim, kappa, inradius=R, convexity=0.0)
    lam = solve(dirichlet_problem(g), cfg).lam
    mu2 = solve(neumann_problem(_geo(kind, dim, kappa, diameter=2 * R)), cfg).lam
    mu1 = solve(neumann_problem(_geo(kind, dim, kappa, diameter=R)), cfg).lam
    return lam, mu2, mu1


def reflection(cfg: SolverConfig = SolverConfig()) -> list:
    out = []
    for kind, dim, kappa, R in REFLECTION_CASES:
        tag = f"{kind} dim={dim} kappa={kappa} R={R}"
        try:
            lam, mu2, mu1 = reflection_values(kind, dim, kappa, R, cfg)
            out.append(rel_check(f"dirichlet(R) = neumann(D=2R) {tag}", 10, lam, mu2, 1e-6))
            out.append(report(f"neumann(D=R) {tag}", 10, mu1,
                              "literal remark reading; differs from dirichlet(R), not asserted"))
        except SolverError as exc:
            out.append(failed(f"reflection {tag}", 10, exc))
    return out


# -- registry -----------------------------------------------------------------


SUITES: dict = {
    "flat": (1, flat_anchor),
    "sphere": (2, sphere),
    "quaternionic": (3, quaternionic),
    "complex-projective": (4, complex_projective),
    "consensus": (5, consensus),
    "explicit-bounds": (6, explicit_bounds),
    "monotonicity": (7, monotonicity),
    "flow": (8, flow),
    "comparison": (9, comparison),
    "reflection": (10, reflection),
}

ALIASES = {"model-spaces": ("sphere", "quaternionic", "complex-projective")}


def resolve_suites(only=None) -> list:
    """Suite names selected by ``only`` (names, aliases or criterion numbers)."""
    if not only:
        return list(SUITES)
    by_number = {str(num): name for name, (num, _) in SUITES.items()}
    picked = []
    for token in only:
        token = token.strip()
        names = ALIASES.get(token) or ((by_number[token],) if token in by_number else
                                       ((token,) if token in SUITES else None))
        if names is None:
            raise KeyError(f"unknown suite {token!r}; choose from "
                           f"{', '.join(list(SUITES) + list(ALIASES))}")
        picked.extend(n for n in names if n not in picked)
    return sorted(picked, key=lambda n: SUITES[n][0])


def run_suites(names, cfg: SolverConfig = SolverConfig(), seed: int = 0,
               progress: Optional[Callable] = None) -> list:
    checks = []
    for name in names:
        _, fn = SUITES[name]
        got = fn(cfg, seed=seed) if name == "explicit-bounds" else fn(cfg)
        if progress:
            progress(name, got)
        checks.extend(got)
    return checks


def criterion_passed(checks, criterion: int) -> bool:
    rows = [c for c in checks if c.criterion == criterion]
    return bool(rows) and all(c.passed is not False for c in rows)
