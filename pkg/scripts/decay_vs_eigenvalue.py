"""Heat-flow decay rates against consensus eigenvalues on the full drift grid.

    python3 scripts/decay_vs_eigenvalue.py --out decay.csv
"""

import argparse
import csv
import sys

from spectral_bounds import FlowCoefficients, GeometryInput, decay_rate, neumann_problem, solve
from spectral_bounds.validation import flat_decay_errors, flow_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=200)
    ap.add_argument("--out")
    a = ap.parse_args()
    fh = open(a.out, "w", newline="") if a.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["class", "dim", "kappa", "D", "lambda", "rate", "relative_error", "r_squared"])
    worst = 0.0
    for kind, dim, kappa, D in flow_grid(full=True):
        p = neumann_problem(GeometryInput(kind, dim, kappa, diameter=D))
        rep = decay_rate(FlowCoefficients.heat(), p, nodes=a.nodes,
                         reference_lambda=solve(p).lam)
        worst = max(worst, rep.relative_error)
        w.writerow([kind, dim, kappa, D, repr(rep.reference_lambda), repr(rep.rate),
                    repr(rep.relative_error), repr(rep.r_squared)])
    if a.out:
        fh.close()
    errs = flat_decay_errors()
    print(f"worst relative error {worst:.3e}; flat decay errors {errs} "
          f"(ratios {[errs[i] / errs[i + 1] for i in range(len(errs) - 1)]})", file=sys.stderr)


if __name__ == "__main__":
    main()
