#!/usr/bin/env python3
"""Sweep a (beta, rho) grid at fixed dimension and tabulate the phase point.

Writes CSV (beta, rho, regime, alpha, rho_c, condensate_fraction,
free_energy, chi) to stdout or --output; plot-ready columnar data.
"""

import argparse
import csv
import sys

import numpy as np

from cyclegas.thermo import SystemParams, solve_alpha


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--beta-min", type=float, default=0.02)
    ap.add_argument("--beta-max", type=float, default=0.4)
    ap.add_argument("--rho-min", type=float, default=0.2)
    ap.add_argument("--rho-max", type=float, default=8.0)
    ap.add_argument("--grid", type=int, default=25, help="points per axis")
    ap.add_argument("--tol", type=float, default=1e-10)
    ap.add_argument("--output", default=None)
    args = ap.parse_args()

    out = open(args.output, "w", newline="") if args.output else sys.stdout
    writer = csv.writer(out)
    writer.writerow(
        ["beta", "rho", "regime", "alpha", "rho_c", "condensate_fraction", "free_energy", "chi"]
    )
    for beta in np.linspace(args.beta_min, args.beta_max, args.grid):
        for rho in np.linspace(args.rho_min, args.rho_max, args.grid):
            sol = solve_alpha(SystemParams(args.d, float(beta), float(rho)), args.tol)
            writer.writerow(
                [
                    f"{beta:.6g}",
                    f"{rho:.6g}",
                    sol.regime,
                    f"{sol.alpha:.12g}",
                    f"{sol.rho_c:.12g}",
                    f"{sol.condensate_fraction:.12g}",
                    f"{sol.free_energy:.12g}",
                    f"{sol.chi:.12g}",
                ]
            )
    if args.output:
        out.close()
        print(f"wrote {args.output}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
