"""Step through one release on the one-bus, two-generator network.

The noisy demand is pinned at 0.3 p.u. while the target cost is 0.5, so the
cheapest dispatch (cost 0.3) sits far below the band [0.495, 0.505].  The
script shows what each stage does: the fast path declines, the high point
relaxation keeps 0.3 by dispatching the expensive unit, doubling brackets
the budget and bisection closes it.
"""

from dp_bilevel import PrivacyParams, instance, run_obfuscation
from dp_bilevel.fixtures import onebus_2gen


def main():
    net = onebus_2gen()
    f_tilde, beta = 0.5, 0.005
    inst = instance(net, f_tilde, beta)
    params = PrivacyParams(epsilon=1.0, alpha=0.1, beta=beta, eta=1e-3)
    run = run_obfuscation(inst, net.demands(), params, noise_override=[-0.2])
    res = run.result

    print(f"noisy demand        {run.d_tilde.values[0]:.4f}")
    print(f"HPR point           {run.d_hpr.values[0]:.4f}  optimal cost {run.metrics.hpr_cost:.4f}"
          f"  ({100 * run.metrics.cost_err_hpr:+.1f}% from target)")
    print("\ndoubling probes (delta, d_up, cost):")
    for p in res.doubling:
        print(f"  {p.delta:9.5f}  {p.d_up[0]:.4f}  {p.follower_cost:.4f}")
    print("\nbisection:")
    print("  iter   low       high      mid       cost     branch")
    for r in res.trace:
        print(f"  {r.iter:>4}  {r.delta_low:.5f}  {r.delta_high:.5f}  {r.delta_mid:.5f}"
              f"  {r.follower_cost:.4f}  {r.branch.value}")
    print(f"\nreleased demand     {res.d_star.values[0]:.4f}  cost {res.cost:.4f}"
          f"  ({100 * run.metrics.cost_err_bl:+.2f}%)")
    print(f"squared distance    {res.delta_star:.5f}  after {res.oracle_calls} push-up solves")


if __name__ == "__main__":
    main()
