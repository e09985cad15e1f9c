import math

import numpy as np
import pytest

from oracles import TriBusOracle, onebus_cost, onebus_cost_range
from dp_bilevel.core import DimensionError, FollowerStatus
from dp_bilevel.dcopf import (Bus, Generator, Line, Network, NetworkError, build_follower,
                              build_hpr, build_pushup, instance, proxy_m, solve_follower,
                              split_leader_solution)
from dp_bilevel.fixtures import onebus_2gen, tri_3bus
from dp_bilevel.solver import Sense, solve


@pytest.mark.parametrize("d, cost, dispatch", [(0.5, 0.5, (0.5, 0.0)), (1.5, 2.0, (1.0, 0.5))])
def test_onebus_follower(onebus_inst, d, cost, dispatch):
    res = solve_follower(onebus_inst, [d])
    assert res.status is FollowerStatus.OPTIMAL
    assert res.objective == pytest.approx(cost, abs=1e-7)
    assert res.objective == pytest.approx(float(onebus_cost(d)), abs=1e-7)
    np.testing.assert_allclose(res.dispatch, dispatch, atol=1e-7)


def test_onebus_follower_over_capacity(onebus_inst):
    assert solve_follower(onebus_inst, [2.5]).status is FollowerStatus.INFEASIBLE


def test_follower_dimension_check(onebus_inst):
    with pytest.raises(DimensionError):
        build_follower(onebus_inst, [0.1, 0.2])


def test_tri_follower_matches_vertex_oracle():
    inst = instance(tri_3bus(), 1.0, 0.1)
    oracle = TriBusOracle()
    rng = np.random.default_rng(4)
    pts = rng.uniform(-0.6, 1.4, size=(60, 2))
    expected = oracle.cost(pts)
    for d, ref in zip(pts, expected):
        res = solve_follower(inst, d)
        if math.isinf(ref):
            assert res.status is FollowerStatus.INFEASIBLE
        else:
            assert res.objective == pytest.approx(ref, abs=1e-6)


def test_demand_only_in_balance_rhs(onebus_inst):
    inst = instance(tri_3bus(), 1.0, 0.1)
    a = build_follower(inst, [0.1, 0.2])
    b = build_follower(inst, [0.7, -0.3])
    for name in ("c", "Q", "A_eq", "A_in", "b_in", "lb", "ub"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))
    assert not np.array_equal(a.b_eq, b.b_eq)


def test_slack_angle_pinned():
    inst = instance(tri_3bus(), 1.0, 0.1)
    p = build_follower(inst, [0.3, 0.3])
    theta_slack = len(inst.network.generators) + inst.network.bus_index[1]
    assert p.lb[theta_slack] == p.ub[theta_slack] == 0.0


@pytest.mark.parametrize("d_tilde, d_h, dist", [(0.3, 0.3, 0.0), (0.1, 0.245, 0.021025),
                                                (0.5, 0.5, 0.0)])
def test_hpr_examples(onebus_inst, d_tilde, d_h, dist):
    sol = solve(build_hpr(onebus_inst, [d_tilde]))
    assert sol.optimal
    d, p, _ = split_leader_solution(onebus_inst, sol.x)
    assert d[0] == pytest.approx(d_h, abs=1e-6)
    assert sol.objective == pytest.approx(dist, abs=1e-7)
    # the dispatch reaches the band, which the cheapest dispatch may not
    assert 0.49 - 1e-7 <= p @ [1.0, 2.0] <= 0.51 + 1e-7
    lo, hi = onebus_cost_range(d[0])
    assert lo - 1e-7 <= 0.51 and hi + 1e-7 >= 0.49


def test_hpr_infeasible_when_band_out_of_reach():
    inst = instance(onebus_2gen(), 10.0, 0.01)
    assert solve(build_hpr(inst, [0.3])).status.value == "infeasible"


@pytest.mark.parametrize("delta, d_up", [(0.01, 0.4), (0.04, 0.5), (0.0, 0.3)])
def test_pushup_examples(onebus_inst, delta, d_up):
    p = build_pushup(onebus_inst, [0.3], delta)
    assert p.sense is Sense.MAXIMIZE
    sol = solve(p)
    assert sol.optimal
    d, _, _ = split_leader_solution(onebus_inst, sol.x)
    assert d[0] == pytest.approx(d_up, abs=1e-6)


def test_pushup_capped_by_band(onebus_inst):
    # cost of d is at least d, so d cannot exceed the band top 0.51
    d, _, _ = split_leader_solution(onebus_inst, solve(build_pushup(onebus_inst, [0.3], 1.0)).x)
    assert d[0] == pytest.approx(0.51, abs=1e-6)


def test_pushup_negative_delta(onebus_inst):
    with pytest.raises(ValueError):
        build_pushup(onebus_inst, [0.3], -1e-3)


def test_demand_bounds_box_leader_space():
    inst = instance(tri_3bus(), 0.6, 0.006, demand_bounds=(0.0, np.inf))
    p = build_hpr(inst, [-0.2, 0.5])
    np.testing.assert_array_equal(p.lb[:2], [0.0, 0.0])
    d, _, _ = split_leader_solution(inst, solve(p).x)
    assert np.all(d >= -1e-8)


def test_proxy_m():
    assert proxy_m([1, 2, 3]) == 6
    assert proxy_m([]) == 0
    assert proxy_m([0.3]) == pytest.approx(0.3)


def test_follower_monotone_uncongested():
    inst = instance(onebus_2gen(), 1.0, 0.1)
    rng = np.random.default_rng(2)
    for _ in range(20):
        a, b = np.sort(rng.uniform(0, 2, 2))
        assert solve_follower(inst, [b]).objective >= solve_follower(inst, [a]).objective - 1e-8


def test_network_validation():
    gens = [Generator(1, 1.0, 0.0, 1.0)]
    with pytest.raises(NetworkError, match="slack"):
        Network(100.0, [Bus(1), Bus(2)], gens, [Line(1, 2, 10.0)])
    with pytest.raises(NetworkError, match="island"):
        Network(100.0, [Bus(1, slack=True), Bus(2)], gens, [])
    with pytest.raises(NetworkError, match="negative"):
        Network(100.0, [Bus(1, slack=True)], [Generator(1, -1.0, 0.0, 1.0)], [])
    with pytest.raises(NetworkError, match="p_min"):
        Network(100.0, [Bus(1, slack=True)], [Generator(1, 1.0, 2.0, 1.0)], [])
    with pytest.raises(NetworkError, match="flow limit"):
        Network(100.0, [Bus(1, slack=True), Bus(2)], gens, [Line(1, 2, 10.0, 0.0)])


def test_with_demands():
    net = tri_3bus().with_demands([0.1, 0.4])
    np.testing.assert_array_equal(net.demands().values, [0.1, 0.4])
    with pytest.raises(DimensionError):
        tri_3bus().with_demands([0.1])
