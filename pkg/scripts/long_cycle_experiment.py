#!/usr/bin/env python3
"""Long-cycle mass across system sizes, condensed vs normal phase.

One split/merge chain per size; the condensed rows should sit near the
excess-density fraction (0.5 at rho = 2 rho_c), the normal rows near zero.
Cycle lengths above n^(2/3) count as long.
"""

import argparse
import math

from cyclegas.sampler import long_cycle_fraction_scan
from cyclegas.thermo import SystemParams, critical_density

BETA_UNIT = 1.0 / (4.0 * math.pi)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-list", default="500,2000,8000")
    ap.add_argument("--steps", type=int, default=2_000_000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--rho-multipliers", default="2.0,0.5",
                    help="densities as multiples of rho_c")
    args = ap.parse_args()
    n_list = [int(tok) for tok in args.n_list.split(",")]
    rho_c = critical_density(3, BETA_UNIT)

    print("rho_over_rho_c,n,fraction,stderr")
    for mult in (float(tok) for tok in args.rho_multipliers.split(",")):
        rows = long_cycle_fraction_scan(
            SystemParams(3, BETA_UNIT, mult * rho_c),
            n_list,
            steps=args.steps,
            seed=args.seed,
        )
        for r in rows:
            print(f"{mult:.3g},{r.n},{r.fraction:.6f},{r.stderr:.6f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
