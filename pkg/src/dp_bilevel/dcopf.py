"""DC optimal power flow with linear generation cost, and the programs built on it.

Variable layout of every generated program::

    follower        [p_g (n_gen), theta (n_bus)]
    HPR / push-up   [d (n_demand), p_g (n_gen), theta (n_bus)]

All quantities are per unit.  The slack angle is pinned to zero through
equal lower and upper bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .core import CostSource, CostTarget, DemandVector, DimensionError, FollowerResult, FollowerStatus, Role
from .solver import Ball, ConvexProgram, Sense, Status, solve


class NetworkError(ValueError):
    pass


@dataclass(frozen=True)
class Bus:
    id: int
    demand: float = 0.0  # p.u.
    slack: bool = False

    @property
    def has_demand(self) -> bool:
        return self.demand != 0.0


@dataclass(frozen=True)
class Generator:
    bus: int
    cost_c1: float  # $ per p.u.
    p_min: float
    p_max: float
    cost_c0: float = 0.0


@dataclass(frozen=True)
class Line:
    from_bus: int
    to_bus: int
    susceptance: float
    flow_limit: float = math.inf


@dataclass(frozen=True)
class Network:
    base_mva: float
    buses: tuple
    generators: tuple
    lines: tuple

    def __post_init__(self):
        object.__setattr__(self, "buses", tuple(self.buses))
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "lines", tuple(self.lines))
        if not self.base_mva > 0:
            raise NetworkError("base_mva must be positive")
        ids = [b.id for b in self.buses]
        if len(set(ids)) != len(ids):
            raise NetworkError("duplicate bus ids")
        slack = [b.id for b in self.buses if b.slack]
        if len(slack) != 1:
            raise NetworkError(f"expected exactly one slack bus, found {len(slack)}")
        known = set(ids)
        for g in self.generators:
            if g.bus not in known:
                raise NetworkError(f"generator at unknown bus {g.bus}")
            if g.p_min > g.p_max:
                raise NetworkError(f"generator at bus {g.bus}: p_min > p_max")
            if g.cost_c1 < 0:
                raise NetworkError(f"generator at bus {g.bus}: negative linear cost")
        for ln in self.lines:
            if ln.from_bus not in known or ln.to_bus not in known:
                raise NetworkError(f"line {ln.from_bus}-{ln.to_bus} touches an unknown bus")
            if not ln.flow_limit > 0:
                raise NetworkError(f"line {ln.from_bus}-{ln.to_bus}: flow limit must be positive")
        if not self.is_connected():
            raise NetworkError("network is not a single island")

    @property
    def slack_bus(self) -> int:
        return next(b.id for b in self.buses if b.slack)

    @property
    def bus_index(self) -> dict:
        return {b.id: i for i, b in enumerate(self.buses)}

    @property
    def demand_buses(self) -> list:
        """Indices (into ``buses``) of the demand-bearing buses."""
        return [i for i, b in enumerate(self.buses) if b.has_demand]

    def demands(self) -> DemandVector:
        return DemandVector([self.buses[i].demand for i in self.demand_buses], Role.ORIGINAL)

    def with_demands(self, d) -> "Network":
        """Copy with the demand-bearing buses set to ``d`` (other buses untouched)."""
        values = np.asarray(getattr(d, "values", d), dtype=float)
        idx = self.demand_buses
        if values.size != len(idx):
            raise DimensionError(f"expected {len(idx)} demands, got {values.size}")
        buses = list(self.buses)
        for k, i in enumerate(idx):
            buses[i] = Bus(buses[i].id, float(values[k]), buses[i].slack)
        return Network(self.base_mva, buses, self.generators, self.lines)

    def is_connected(self) -> bool:
        n = len(self.buses)
        if n <= 1:
            return True
        pos = self.bus_index
        rows = [pos[ln.from_bus] for ln in self.lines]
        cols = [pos[ln.to_bus] for ln in self.lines]
        graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        count, _ = connected_components(graph, directed=False)
        return count == 1

    def max_cost(self) -> float:
        return sum(g.cost_c1 * g.p_max + g.cost_c0 for g in self.generators)


@dataclass(frozen=True)
class DcOpfInstance:
    network: Network
    cost_target: CostTarget
    beta: float
    demand_bounds: Optional[tuple] = None

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")

    @property
    def f_tilde(self) -> float:
        return self.cost_target.f_tilde

    @property
    def band(self) -> tuple:
        return self.f_tilde - self.beta, self.f_tilde + self.beta

    @property
    def n_demand(self) -> int:
        return len(self.network.demand_buses)


def _check_demands(inst: DcOpfInstance, d) -> np.ndarray:
    values = np.asarray(getattr(d, "values", d), dtype=float).reshape(-1)
    if values.size != inst.n_demand:
        raise DimensionError(f"expected {inst.n_demand} demands, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise ValueError("demands must be finite")
    return values


class _Blocks:
    """Constraint blocks shared by the three programs, over columns [p, theta]."""

    def __init__(self, net: Network):
        pos = net.bus_index
        nb, ng = len(net.buses), len(net.generators)
        self.nb, self.ng = nb, ng
        gen_inc = np.zeros((nb, ng))
        for k, g in enumerate(net.generators):
            gen_inc[pos[g.bus], k] = 1.0
        B = np.zeros((nb, nb))
        flow_rows, limits = [], []
        for ln in net.lines:
            i, j = pos[ln.from_bus], pos[ln.to_bus]
            e = np.zeros(nb)
            e[i], e[j] = 1.0, -1.0
            B += ln.susceptance * np.outer(e, e)
            if math.isfinite(ln.flow_limit):
                flow_rows.append(ln.susceptance * e)
                limits.append(ln.flow_limit)
        # bus balance: generation - outgoing flows = demand
        self.balance = np.hstack([gen_inc, -B])
        flows = np.array(flow_rows).reshape(-1, nb)
        self.flow = np.vstack([np.hstack([np.zeros((len(limits), ng)), flows]),
                               np.hstack([np.zeros((len(limits), ng)), -flows])])
        self.flow_rhs = np.concatenate([limits, limits])
        self.c1 = np.array([g.cost_c1 for g in net.generators], dtype=float)
        self.c0 = float(sum(g.cost_c0 for g in net.generators))
        self.lb = np.concatenate([[g.p_min for g in net.generators], np.full(nb, -np.inf)])
        self.ub = np.concatenate([[g.p_max for g in net.generators], np.full(nb, np.inf)])
        s = pos[net.slack_bus]
        self.lb[ng + s] = self.ub[ng + s] = 0.0
        self.demand_cols = np.zeros((nb, len(net.demand_buses)))
        for k, i in enumerate(net.demand_buses):
            self.demand_cols[i, k] = 1.0


def build_follower(inst: DcOpfInstance, d) -> ConvexProgram:
    """The follower O(d): least-cost dispatch for fixed demands ``d``."""
    values = _check_demands(inst, d)
    blk = _Blocks(inst.network)
    return ConvexProgram(
        c=np.concatenate([blk.c1, np.zeros(blk.nb)]),
        A_eq=blk.balance, b_eq=blk.demand_cols @ values,
        A_in=blk.flow, b_in=blk.flow_rhs,
        lb=blk.lb, ub=blk.ub, offset=blk.c0, name="follower",
    )


def _leader_space(inst: DcOpfInstance):
    """Shared constraints of HPR and push-up over [d, p, theta]: balance, flows, cost band."""
    blk = _Blocks(inst.network)
    nd = inst.n_demand
    A_eq = np.hstack([-blk.demand_cols, blk.balance])
    cost_row = np.concatenate([np.zeros(nd), blk.c1, np.zeros(blk.nb)])
    lo, hi = inst.band
    A_in = np.vstack([np.hstack([np.zeros((blk.flow.shape[0], nd)), blk.flow]), cost_row, -cost_row])
    b_in = np.concatenate([blk.flow_rhs, [hi - blk.c0, -(lo - blk.c0)]])
    d_lo, d_hi = inst.demand_bounds if inst.demand_bounds is not None else (-np.inf, np.inf)
    lb = np.concatenate([np.full(nd, d_lo, dtype=float), blk.lb])
    ub = np.concatenate([np.full(nd, d_hi, dtype=float), blk.ub])
    return blk, A_eq, np.zeros(blk.nb), A_in, b_in, lb, ub


def build_hpr(inst: DcOpfInstance, d_tilde) -> ConvexProgram:
    """High point relaxation: nearest demands admitting *some* dispatch inside the cost band."""
    dt = _check_demands(inst, d_tilde)
    blk, A_eq, b_eq, A_in, b_in, lb, ub = _leader_space(inst)
    nd, nv = dt.size, dt.size + blk.ng + blk.nb
    Q = np.zeros((nv, nv))
    Q[:nd, :nd] = 2.0 * np.eye(nd)
    c = np.zeros(nv)
    c[:nd] = -2.0 * dt
    return ConvexProgram(c=c, Q=Q, A_eq=A_eq, b_eq=b_eq, A_in=A_in, b_in=b_in,
                         lb=lb, ub=ub, offset=float(dt @ dt), name="hpr")


def build_pushup(inst: DcOpfInstance, d_tilde, delta: float) -> ConvexProgram:
    """Push-up program: maximise total demand within squared distance ``delta`` of d_tilde."""
    if not delta >= 0:
        raise ValueError("delta must be non-negative")
    dt = _check_demands(inst, d_tilde)
    blk, A_eq, b_eq, A_in, b_in, lb, ub = _leader_space(inst)
    nd, nv = dt.size, dt.size + blk.ng + blk.nb
    c = np.zeros(nv)
    c[:nd] = 1.0
    ball = None
    if delta > 0:
        ball = Ball(np.arange(nd), dt, delta)
    else:
        lb[:nd] = ub[:nd] = dt
    return ConvexProgram(c=c, A_eq=A_eq, b_eq=b_eq, A_in=A_in, b_in=b_in, lb=lb, ub=ub,
                         ball=ball, sense=Sense.MAXIMIZE, name="pushup")


def proxy_m(d) -> float:
    """Monotone proxy of the follower cost: total demand."""
    return float(np.sum(np.asarray(getattr(d, "values", d), dtype=float)))


def solve_follower(inst: DcOpfInstance, d) -> FollowerResult:
    sol = solve(build_follower(inst, d))
    if sol.status is Status.OPTIMAL:
        ng = len(inst.network.generators)
        return FollowerResult(FollowerStatus.OPTIMAL, sol.objective, sol.x[:ng])
    if sol.status is Status.INFEASIBLE:
        return FollowerResult(FollowerStatus.INFEASIBLE)
    return FollowerResult(FollowerStatus.NUMERIC_FAILURE)


def split_leader_solution(inst: DcOpfInstance, x) -> tuple:
    """(d, p, theta) views of an HPR / push-up solution vector."""
    nd, ng = inst.n_demand, len(inst.network.generators)
    return x[:nd], x[nd:nd + ng], x[nd + ng:]


def instance(network: Network, f_tilde: float, beta: float, *,
             demand_bounds: Optional[Sequence[float]] = None, private: bool = False) -> DcOpfInstance:
    source = CostSource.PRIVATE_ESTIMATE if private else CostSource.PUBLIC
    bounds = tuple(demand_bounds) if demand_bounds is not None else None
    return DcOpfInstance(network, CostTarget(float(f_tilde), source), float(beta), bounds)
