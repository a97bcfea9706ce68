"""Comparison eigenvalue at the HP^m diameter against 8(m+1) and the explicit bound.

    python3 scripts/sharpness_table.py --max-m 6 --out sharpness.csv
"""

import argparse
import csv
import math
import sys

from spectral_bounds import (GeometryInput, RadialModel, explicit_bound_qk, neumann_problem,
                             radial_first_eigenvalue_numeric, solve)


def rows(max_m, kappa):
    d = math.pi / (2 * math.sqrt(kappa))
    for m in range(2, max_m + 1):
        r = solve(neumann_problem(GeometryInput("qk", m, kappa, diameter=d), singular_limit=True))
        model = 8 * (m + 1) * kappa
        radial = radial_first_eigenvalue_numeric(RadialModel("quaternionic_projective", m, kappa))
        yield {"m": m, "kappa": kappa, "diameter": d, "comparison_lambda": r.lam,
               "bracket": r.error_bracket, "model_eigenvalue": model,
               "radial_numeric": radial.lam, "gap": model - r.lam,
               "explicit_bound": explicit_bound_qk(m, kappa, d)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-m", type=int, default=6)
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--out")
    a = ap.parse_args()
    data = list(rows(a.max_m, a.kappa))
    fh = open(a.out, "w", newline="") if a.out else sys.stdout
    w = csv.DictWriter(fh, fieldnames=list(data[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(data)
    if a.out:
        fh.close()


if __name__ == "__main__":
    main()
