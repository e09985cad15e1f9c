"""Optimal cost at the push-up point as the distance budget grows.

Bisection is only sound when a larger total demand never lowers the optimal
cost among the candidates.  The first part traces the probe curve on both
bundled networks.  The second part shows where that breaks on the triangle:
a negative demand at bus 2 is an injection that congests the lines, so a
vector with smaller total demand can cost more.
"""

import numpy as np

from dp_bilevel import instance, solve_follower
from dp_bilevel.harness import RunConfig, monotonicity_violations, prepare, probe_rows


def curve(case, d_tilde, grid):
    setup = prepare(RunConfig(case=case, beta_pct=1.0, delta_grid=grid))
    rows = probe_rows(setup, np.asarray(d_tilde), grid)
    print(f"{case}, d~ = {d_tilde}, band {tuple(round(b, 4) for b in setup.inst.band)}")
    for r in rows:
        cost = "infeasible" if r["status"] != "feasible" else f"{r['follower_cost']:.4f}"
        print(f"  delta {r['delta']:8.4f}  cost {cost}")
    print(f"  violations: {monotonicity_violations(rows) or 'none'}\n")


def main():
    grid = list(np.geomspace(1e-3, 1.0, 10))
    curve("onebus-2gen", [0.3], grid)
    curve("tri-3bus", [0.25, 0.1], grid)

    tri = prepare(RunConfig(case="tri-3bus", beta=0.01)).network
    inst = instance(tri, 1.0, 0.1)
    for d in ([-0.6, 0.8], [0.0, 0.3]):
        print(f"tri-3bus demands {d}: total {sum(d):.1f}, "
              f"optimal cost {solve_follower(inst, d).objective:.3f}")


if __name__ == "__main__":
    main()
