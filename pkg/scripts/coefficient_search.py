"""Random search over the series coefficients C_i.

Nothing guarantees that some choice of C drives (x, y) to the origin; this
script only ranks random draws by the worst final planar distance over a
handful of remapped starting points.

    python scripts/coefficient_search.py --draws 20 --seed 0
"""

import argparse
import math

import numpy as np

from givp.analysis import sweep_initial_conditions
from givp.integrate import IntegratorConfig
from givp.unicycle import BesselControllerParams

STARTS = [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (-1.0, -1.0, 0.0), (0.5, -0.5, 1.0)]


def score(C, integ):
    table = sweep_initial_conditions(STARTS, BesselControllerParams(N=len(C), C=C), True, integ)
    worst = 0.0
    for row in table.rows:
        if row.verdict.classification == "diverged":
            return math.inf
        worst = max(worst, row.verdict.final_norm)
    return worst


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--draws", type=int, default=20)
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1e-3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--t-end", type=float, default=10.0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    integ = IntegratorConfig(method="rk45_adaptive", t_end=args.t_end)
    results = []
    for _ in range(args.draws):
        C = (rng.normal(size=args.N) * args.scale).tolist()
        results.append((score(C, integ), C))
    results.sort(key=lambda r: r[0])
    for s, C in results[:5]:
        print(f"{s:12.6g}  C = {[round(c, 6) for c in C]}")


if __name__ == "__main__":
    main()
