"""Eigenvalue curves in D for the three classes, up to the singular diameter.

    python3 scripts/monotonicity_sweep.py --kappa 1 --points 12 --out curves.csv
"""

import argparse
import csv
import math
import sys

import numpy as np

from spectral_bounds import GeometryInput, eigenvalue_curve
from spectral_bounds.cli import explicit_bound
from spectral_bounds.models import singular_diameter

GEOMETRIES = (("riemannian", 3), ("riemannian", 5), ("kahler", 2), ("kahler", 3),
              ("quaternion_kahler", 2), ("quaternion_kahler", 3))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=12)
    ap.add_argument("--d-min", type=float, default=0.3)
    ap.add_argument("--d-max", type=float, default=4.0, help="used when no singular diameter")
    ap.add_argument("--out")
    a = ap.parse_args()
    fh = open(a.out, "w", newline="") if a.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["class", "dim", "kappa", "D", "lambda", "bracket", "explicit_bound",
                "singular_limit"])
    for kind, dim in GEOMETRIES:
        g = GeometryInput(kind, dim, a.kappa)
        top = singular_diameter(g)
        grid = np.linspace(a.d_min, top if math.isfinite(top) else a.d_max, a.points)
        lams = []
        for D, r in eigenvalue_curve(g, grid):
            lams.append(r.lam)
            w.writerow([kind, dim, a.kappa, repr(D), repr(r.lam), repr(r.error_bracket),
                        explicit_bound(g, D), r.singular_limit])
        if any(b >= a_ for a_, b in zip(lams, lams[1:])):
            print(f"warning: {kind} dim={dim} curve not strictly decreasing", file=sys.stderr)
    if a.out:
        fh.close()


if __name__ == "__main__":
    main()
