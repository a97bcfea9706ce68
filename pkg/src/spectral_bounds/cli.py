"""Command-line front end.

    spectral-bounds bound qk --m 2 --kappa 1 --diameter 1 --output json
    spectral-bounds sweep riemannian --n 3 --kappa 1 --param D --start 0.5 --stop 3
    spectral-bounds heat kahler --m 2 --kappa 0.5 --diameter 1 --trajectory traj.csv
    spectral-bounds validate --only model-spaces

Exit codes: 0 ok, 1 validation failure, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import closed_forms as cf
from . import model_spaces
from .eigensolver import SOLVERS, SolverConfig, default_workers
from .errors import DomainError, InvalidGeometryError, SolverError
from .heat_flow import FlowCoefficients, decay_rate
from .models import GeometryInput, dirichlet_problem, neumann_problem, singular_diameter
from . import validation

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

CLASS_CHOICES = ("riemannian", "kahler", "qk", "quaternion_kahler")
METHOD_NAMES = {"shooting": "shooting", "fd": "fd", "both": "consensus"}


class UsageError(Exception):
    pass


# -- argument parsing ---------------------------------------------------------


def _geometry_args(p, extent=True):
    p.add_argument("cls", metavar="class", choices=CLASS_CHOICES,
                   help="riemannian, kahler or qk")
    p.add_argument("--n", type=int, help="real dimension (riemannian)")
    p.add_argument("--m", type=int, help="complex or quaternionic dimension (kahler, qk)")
    p.add_argument("--kappa", type=float, help="curvature parameter")
    p.add_argument("--kappa1", type=float, help="holomorphic curvature bound (kahler)")
    p.add_argument("--kappa2", type=float, help="orthogonal Ricci bound (kahler)")
    if extent:
        p.add_argument("--diameter", type=float)


def _solver_args(p):
    p.add_argument("--method", choices=tuple(METHOD_NAMES), default="both")
    p.add_argument("--rel-tol", type=float, default=SolverConfig.rel_tol)
    p.add_argument("--nodes", type=int, default=SolverConfig.base_nodes,
                   help="coarsest finite-difference mesh (intervals)")


def _output_args(p, formats=("table", "json", "csv")):
    p.add_argument("--output", choices=formats, default="table")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectral-bounds",
                                     description="First-eigenvalue comparison bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="comparison eigenvalue and explicit bound")
    _geometry_args(b)
    b.add_argument("--inradius", type=float)
    b.add_argument("--lambda", dest="convexity", type=float,
                   help="boundary convexity (second fundamental form lower bound)")
    b.add_argument("--dirichlet", action="store_true",
                   help="Dirichlet problem on [0, inradius]")
    b.add_argument("--singular-limit", action="store_true",
                   help="extent sits exactly at the drift singularity")
    _solver_args(b)
    _output_args(b)

    s = sub.add_parser("sweep", help="eigenvalue curve over D or kappa")
    _geometry_args(s)
    s.add_argument("--param", choices=("D", "kappa"), default="D")
    s.add_argument("--start", type=float, required=True)
    s.add_argument("--stop", type=float)
    s.add_argument("--points", type=int, default=8)
    s.add_argument("--to-singular-limit", action="store_true",
                   help="D sweep: end exactly at the singular diameter")
    _solver_args(s)
    _output_args(s)

    h = sub.add_parser("heat", help="decay rate of the one-dimensional flow")
    _geometry_args(h)
    h.add_argument("--preset", choices=("heat", "p_flow", "graphical_mcf"), default="heat")
    h.add_argument("--p", type=float, default=3.0, help="exponent for p_flow")
    h.add_argument("--horizon", type=float, help="default 10 / lambda")
    h.add_argument("--flow-nodes", type=int, default=200)
    h.add_argument("--dt", type=float)
    h.add_argument("--trajectory", help="CSV dump with columns t, s, omega")
    _solver_args(h)
    _output_args(h)

    v = sub.add_parser("validate", help="run the oracle and invariant suite")
    v.add_argument("--only", help="comma-separated suites, aliases or criterion numbers")
    v.add_argument("--inject-fault", choices=("weight-exponent",), help=argparse.SUPPRESS)
    _output_args(v)
    return parser


# -- helpers ------------------------------------------------------------------


def _kind(cls):
    return "quaternion_kahler" if cls in ("qk", "quaternion_kahler") else cls


def geometry_from_args(a, **extent) -> GeometryInput:
    kind = _kind(a.cls)
    if kind == "riemannian":
        if a.n is None or a.m is not None:
            raise UsageError("riemannian needs --n (and not --m)")
        dim = a.n
    else:
        if a.m is None or a.n is not None:
            raise UsageError(f"{a.cls} needs --m (and not --n)")
        dim = a.m
    k1, k2 = a.kappa1, a.kappa2
    if kind == "kahler":
        if a.kappa is not None and (k1 is not None or k2 is not None):
            raise UsageError("give either --kappa or --kappa1/--kappa2")
        if a.kappa is not None:
            k1 = k2 = a.kappa
        if k1 is None or k2 is None:
            raise UsageError("kahler needs --kappa or both --kappa1 and --kappa2")
        return GeometryInput(kind, dim, k1, kappa2=k2, **extent)
    if k1 is not None or k2 is not None:
        raise UsageError("--kappa1/--kappa2 apply to the kahler class only")
    if a.kappa is None:
        raise UsageError("--kappa is required")
    return GeometryInput(kind, dim, a.kappa, **extent)


def solver_config(a) -> SolverConfig:
    try:
        return SolverConfig(rel_tol=a.rel_tol, base_nodes=a.nodes)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def explicit_bound(g: GeometryInput, diameter):
    """Closed-form bound where its hypotheses hold, else None."""
    if diameter is None or g.kind == "riemannian":
        return None
    if g.kind == "kahler":
        k1, k2 = g.curvatures
        if k1 < 0 or k2 < 0:
            return None
        return cf.explicit_bound_kahler(g.dim, k1, k2, diameter)
    if g.kappa < 0:
        return None
    return cf.explicit_bound_qk(g.dim, g.kappa, diameter)


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v)
                    for v in row])
    return buf.getvalue()


def _table(pairs) -> str:
    width = max(len(k) for k, _ in pairs)
    return "".join(f"{k.ljust(width)}  {_fmt(v)}\n" for k, v in pairs)


def _fmt(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _emit(text, a):
    if a.out:
        with open(a.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands -----------------------------------------------------------------


def bound_report(a) -> dict:
    cfg = solver_config(a)
    if a.dirichlet:
        if a.inradius is None or a.convexity is None:
            raise UsageError("--dirichlet requires --inradius and --lambda")
        if a.diameter is not None:
            raise UsageError("--dirichlet takes --inradius, not --diameter")
        g = geometry_from_args(a, inradius=a.inradius, convexity=a.convexity)
        problem = dirichlet_problem(g, singular_limit=a.singular_limit)
        # zero convexity: the half-interval problem of a Neumann problem on [-R, R]
        explicit = explicit_bound(g, 2 * a.inradius) if a.convexity == 0 else None
    else:
        if a.diameter is None:
            raise UsageError("--diameter is required (or --dirichlet with --inradius)")
        if a.inradius is not None or a.convexity is not None:
            raise UsageError("--inradius/--lambda need --dirichlet")
        g = geometry_from_args(a, diameter=a.diameter)
        problem = neumann_problem(g, singular_limit=a.singular_limit)
        explicit = explicit_bound(g, a.diameter)
    res = SOLVERS[a.method](problem, cfg)
    results = {
        "lambda": _num(res.lam),
        "bracket": _num(res.error_bracket),
        "explicit_bound": _num(explicit),
        "method": METHOD_NAMES[a.method],
        "singular_limit": bool(problem.singular_limit),
    }
    checks = []
    if explicit is not None:
        ok = explicit <= res.lam + res.error_bracket
        checks.append({"name": "explicit <= numeric", "measured": _num(explicit),
                       "expected": _num(res.lam), "tol": _num(res.error_bracket),
                       "passed": bool(ok)})
    inputs = {"class": g.kind, "dim": g.dim, "kappa": g.kappa,
              "kappa2": g.kappa2, "diameter": g.diameter, "inradius": g.inradius,
              "convexity": g.convexity, "dirichlet": bool(a.dirichlet),
              "singular_limit": bool(a.singular_limit), "method": a.method,
              "rel_tol": a.rel_tol, "nodes": a.nodes, "seed": a.seed}
    return {"command": "bound", "inputs": inputs, "results": results, "checks": checks}


def cmd_bound(a) -> int:
    doc = bound_report(a)
    r = doc["results"]
    if a.output == "json":
        text = _json(doc)
    elif a.output == "csv":
        keys = ("lambda", "bracket", "explicit_bound", "method", "singular_limit")
        text = _csv(keys, [[r[k] for k in keys]])
    else:
        pairs = [(k, r[k]) for k in ("lambda", "bracket", "explicit_bound", "method",
                                     "singular_limit")]
        pairs += [(c["name"], "yes" if c["passed"] else "NO") for c in doc["checks"]]
        text = _table(pairs)
    _emit(text, a)
    return EXIT_OK


def _sweep_point(job):
    g, param, value, sing, method, cfg = job
    try:
        if param == "D":
            g = g.with_extent(diameter=value)
        else:
            g = g.with_kappa(value)
        res = SOLVERS[method](neumann_problem(g, singular_limit=sing), cfg)
        return {"param": value, "lambda": res.lam, "bracket": res.error_bracket,
                "explicit_bound": _num(explicit_bound(g, g.diameter)),
                "singular_limit": sing, "error": None}
    except (SolverError, DomainError, InvalidGeometryError) as exc:
        return {"param": value, "lambda": None, "bracket": None, "explicit_bound": None,
                "singular_limit": sing, "error": f"{type(exc).__name__}: {exc}"}


def sweep_grid(a, g):
    if a.points < 2:
        raise UsageError("--points must be at least 2")
    if a.param == "D":
        stop = a.stop
        if a.to_singular_limit:
            stop = singular_diameter(g)
            if not math.isfinite(stop):
                raise UsageError("this geometry has no singular diameter")
        if stop is None:
            raise UsageError("--stop is required")
        grid = [float(x) for x in np.linspace(a.start, stop, a.points)]
        flags = [False] * len(grid)
        if a.to_singular_limit:
            flags[-1] = True
        return grid, flags
    if a.to_singular_limit:
        raise UsageError("--to-singular-limit applies to D sweeps")
    if a.stop is None:
        raise UsageError("--stop is required")
    if g.diameter is None:
        raise UsageError("a kappa sweep needs --diameter")
    grid = [float(x) for x in np.linspace(a.start, a.stop, a.points)]
    return grid, [False] * len(grid)


def sweep_rows(a) -> tuple:
    cfg = solver_config(a)
    if a.param == "D" and a.diameter is not None:
        raise UsageError("a D sweep takes its diameters from --start/--stop")
    g = geometry_from_args(a, diameter=a.diameter)
    grid, flags = sweep_grid(a, g)
    jobs = [(g, a.param, v, f, a.method, cfg) for v, f in zip(grid, flags)]
    workers = default_workers()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    rows.sort(key=lambda r: r["param"])
    inputs = {"class": g.kind, "dim": g.dim, "kappa": g.kappa, "kappa2": g.kappa2,
              "diameter": g.diameter, "param": a.param, "start": a.start,
              "stop": grid[-1], "points": a.points, "method": a.method,
              "rel_tol": a.rel_tol, "nodes": a.nodes, "seed": a.seed}
    return inputs, rows


SWEEP_COLUMNS = ("param", "lambda", "bracket", "explicit_bound", "singular_limit", "error")


def cmd_sweep(a) -> int:
    inputs, rows = sweep_rows(a)
    ok = sum(r["error"] is None for r in rows)
    if a.output == "json":
        text = _json({"command": "sweep", "inputs": inputs, "results": rows,
                      "checks": [{"name": "points succeeded", "measured": ok,
                                  "expected": len(rows), "passed": ok >= 0.9 * len(rows)}]})
    elif a.output == "csv":
        text = _csv(SWEEP_COLUMNS, [[r[c] for c in SWEEP_COLUMNS] for r in rows])
    else:
        lines = ["  ".join(f"{c:>16}" for c in SWEEP_COLUMNS[:-1])]
        for r in rows:
            lines.append("  ".join(f"{_fmt(r[c]):>16}" for c in SWEEP_COLUMNS[:-1])
                         + (f"  {r['error']}" if r["error"] else ""))
        text = "\n".join(lines) + "\n"
    _emit(text, a)
    return EXIT_OK if ok >= 0.9 * len(rows) else EXIT_NUMERIC


def cmd_heat(a) -> int:
    cfg = solver_config(a)
    if a.diameter is None:
        raise UsageError("--diameter is required")
    g = geometry_from_args(a, diameter=a.diameter)
    problem = neumann_problem(g)
    if a.preset == "heat":
        coeffs = FlowCoefficients.heat()
    elif a.preset == "p_flow":
        if not a.p > 1:
            raise UsageError("--p must exceed 1")
        coeffs = FlowCoefficients.p_flow(a.p)
    else:
        coeffs = FlowCoefficients.graphical_mcf()
    lam = SOLVERS[a.method](problem, cfg).lam
    rep = decay_rate(coeffs, problem, horizon=a.horizon, nodes=a.flow_nodes, dt=a.dt,
                     reference_lambda=lam, trajectory_csv=a.trajectory)
    results = {"rate": rep.rate, "reference_lambda": rep.reference_lambda,
               "relative_error": rep.relative_error, "window": list(rep.window),
               "r_squared": rep.r_squared, "preset": a.preset}
    checks = []
    if a.preset == "heat":
        checks.append({"name": "decay rate matches lambda", "measured": rep.rate,
                       "expected": rep.reference_lambda, "tol": 0.01,
                       "passed": rep.relative_error <= 0.01})
    if a.output == "json":
        inputs = {"class": g.kind, "dim": g.dim, "kappa": g.kappa, "kappa2": g.kappa2,
                  "diameter": g.diameter, "preset": a.preset,
                  "p": a.p if a.preset == "p_flow" else None, "horizon": a.horizon,
                  "flow_nodes": a.flow_nodes, "dt": a.dt, "seed": a.seed}
        text = _json({"command": "heat", "inputs": inputs, "results": results,
                      "checks": checks})
    elif a.output == "csv":
        keys = ("rate", "reference_lambda", "relative_error", "r_squared", "preset")
        text = _csv(keys, [[results[k] for k in keys]])
    else:
        text = _table([(k, results[k]) for k in ("rate", "reference_lambda", "relative_error",
                                                 "r_squared", "preset")])
    _emit(text, a)
    return EXIT_OK if all(c["passed"] for c in checks) else EXIT_VALIDATION


def cmd_validate(a) -> int:
    try:
        names = validation.resolve_suites(a.only.split(",") if a.only else None)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc
    saved = model_spaces._WEIGHT_EXPONENT_OFFSET
    if a.inject_fault == "weight-exponent":
        model_spaces._WEIGHT_EXPONENT_OFFSET = 1
    try:
        checks = validation.run_suites(names, seed=a.seed)
    finally:
        model_spaces._WEIGHT_EXPONENT_OFFSET = saved
    failures = [c for c in checks if c.passed is False]
    criteria = sorted({c.criterion for c in checks})
    summary = [{"criterion": k, "passed": validation.criterion_passed(checks, k)}
               for k in criteria]
    if a.output == "json":
        text = _json({"command": "validate",
                      "inputs": {"only": names, "seed": a.seed,
                                 "fault": a.inject_fault},
                      "results": {"criteria": summary, "failures": len(failures),
                                  "checks": len(checks)},
                      "checks": [c.to_dict() for c in checks]})
    elif a.output == "csv":
        text = _csv(("criterion", "name", "measured", "expected", "tol", "relation", "passed"),
                    [[c.criterion, c.name, _num(c.measured), _num(c.expected), _num(c.tol),
                      c.relation, "" if c.passed is None else c.passed] for c in checks])
    else:
        lines = []
        for c in checks:
            tag = "INFO" if c.passed is None else ("PASS" if c.passed else "FAIL")
            lines.append(f"[{tag}] {c.criterion:>2}  {c.name}: measured={_fmt(_num(c.measured))}"
                         f" expected={_fmt(_num(c.expected))} tol={_fmt(_num(c.tol))}"
                         + (f"  ({c.note})" if c.note and tag != "PASS" else ""))
        lines.append("")
        for s in summary:
            lines.append(f"criterion {s['criterion']:>2}: {'PASS' if s['passed'] else 'FAIL'}")
        lines.append(f"{len(checks)} checks, {len(failures)} failed")
        if failures:
            lines.append("failing checks:")
            lines.extend(f"  - {c.name}" for c in failures)
        text = "\n".join(lines) + "\n"
    _emit(text, a)
    return EXIT_VALIDATION if failures else EXIT_OK


COMMANDS = {"bound": cmd_bound, "sweep": cmd_sweep, "heat": cmd_heat,
            "validate": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        return COMMANDS[a.command](a)
    except (UsageError, InvalidGeometryError, DomainError) as exc:
        print(f"spectral-bounds {a.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, ValueError) as exc:
        print(f"spectral-bounds {a.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
