"""Bilevel post-processing of a noisy demand vector.

The released vector is the point closest to the noisy demands whose optimal
dispatch cost lies in the band ``[f_tilde - beta, f_tilde + beta]``.  It is
found by bisection on the squared distance budget ``delta``: each probe
maximises total demand inside the ball of radius ``sqrt(delta)`` (the
push-up program) and checks whether the optimal cost at that point reaches
the lower edge of the band.  When the follower cost grows with total demand,
a passing probe certifies a feasible release and a failing probe certifies
that none exists within the ball.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .core import (DemandVector, DistanceBudget, FollowerResult, FollowerStatus, NoiselessInput,
                   PrivacyParams, Role, l2sq_distance, theorem2_ratio)
from .dcopf import (DcOpfInstance, build_follower, build_hpr, build_pushup, proxy_m,
                    split_leader_solution)
from .dp import LaplaceNoise, obfuscate_demands
from .solver import ConvexProgram, Status, dump_program, solve

log = logging.getLogger(__name__)

CERTIFICATE_TOL = 1e-9  # slack on the lower band edge when testing a probe


class BilevelStatus(enum.Enum):
    CONVERGED = "converged"
    FAST_PATH = "fast_path"
    ORACLE_CAP_HIT = "oracle_cap_hit"
    INFEASIBLE = "infeasible"


class Branch(enum.Enum):
    UPPER_UPDATED = "upper_updated"
    LOWER_UPDATED = "lower_updated"
    PUSHUP_INFEASIBLE = "pushup_infeasible"


class SolverFailure(RuntimeError):
    """A subproblem ended without an optimality or infeasibility verdict."""


class BilevelInfeasible(RuntimeError):
    """No demand vector admits a dispatch inside the cost band."""


class OracleCapHit(RuntimeError):
    """The push-up call budget ran out."""


class _CapReached(Exception):
    pass


@dataclass(frozen=True)
class Probe:
    """One push-up solve at budget ``delta`` and the follower solve at its argmax."""

    delta: float
    feasible: bool
    d_up: Optional[np.ndarray] = None
    delta_up: float = math.nan
    pushup_m: float = math.nan
    follower_cost: float = math.nan

    def certifies(self, inst: DcOpfInstance) -> bool:
        return self.feasible and self.follower_cost >= inst.band[0] - CERTIFICATE_TOL


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    delta_low: float
    delta_high: float
    delta_mid: float
    delta_up: float
    pushup_objective: float
    follower_cost: float
    branch: Branch
    d_up: Optional[np.ndarray] = None


@dataclass
class BilevelResult:
    status: BilevelStatus
    d_star: Optional[DemandVector]
    delta_star: float
    cost: float
    trace: list = field(default_factory=list)
    oracle_calls: int = 0
    hpr_distance_sq: float = math.nan
    bounds: Optional[DistanceBudget] = None
    doubling: list = field(default_factory=list)  # Probe per doubling step
    solver_seconds: float = 0.0

    @property
    def released(self) -> bool:
        return self.status in (BilevelStatus.CONVERGED, BilevelStatus.FAST_PATH)


class Oracle:
    """Counts push-up solves against the cap, times every solver call and can dump programs."""

    def __init__(self, inst: DcOpfInstance, d_tilde, max_calls: int = 3000, dump_dir=None):
        self.inst = inst
        self.d_tilde = np.asarray(getattr(d_tilde, "values", d_tilde), dtype=float)
        self.max_calls = int(max_calls)
        self.calls = 0
        self.seconds = 0.0
        self.dump_dir = Path(dump_dir) if dump_dir is not None else None
        self._dumped = 0

    def _solve(self, program: ConvexProgram):
        if self.dump_dir is not None:
            self.dump_dir.mkdir(parents=True, exist_ok=True)
            dump_program(program, self.dump_dir / f"{self._dumped:04d}_{program.name}.txt")
            self._dumped += 1
        t0 = time.perf_counter()
        sol = solve(program)
        self.seconds += time.perf_counter() - t0
        return sol

    def follower(self, d) -> FollowerResult:
        sol = self._solve(build_follower(self.inst, d))
        if sol.status is Status.OPTIMAL:
            ng = len(self.inst.network.generators)
            return FollowerResult(FollowerStatus.OPTIMAL, sol.objective, sol.x[:ng])
        if sol.status is Status.INFEASIBLE:
            return FollowerResult(FollowerStatus.INFEASIBLE)
        return FollowerResult(FollowerStatus.NUMERIC_FAILURE)

    def hpr(self):
        """(d_h, squared distance) or None when the cost band is unreachable."""
        sol = self._solve(build_hpr(self.inst, self.d_tilde))
        if sol.status is Status.INFEASIBLE:
            return None
        if not sol.optimal:
            raise SolverFailure(f"HPR ended with status {sol.status.value}")
        d_h, _, _ = split_leader_solution(self.inst, sol.x)
        return d_h.copy(), l2sq_distance(d_h, self.d_tilde)

    def pushup(self, delta: float) -> Probe:
        if self.calls >= self.max_calls:
            raise _CapReached
        self.calls += 1
        sol = self._solve(build_pushup(self.inst, self.d_tilde, delta))
        if sol.status is Status.INFEASIBLE:
            return Probe(delta, False)
        if not sol.optimal:
            raise SolverFailure(f"push-up at delta={delta:g} ended with status {sol.status.value}")
        d_up, _, _ = split_leader_solution(self.inst, sol.x)
        d_up = d_up.copy()
        fol = self.follower(d_up)
        if not fol.optimal:
            # d_up comes with a feasible dispatch, so this is a numerical problem
            raise SolverFailure(f"follower at push-up point ended with status {fol.status.value}")
        return Probe(delta, True, d_up, l2sq_distance(d_up, self.d_tilde), proxy_m(d_up),
                     fol.objective)


    def pushup_at_hpr(self, d_h, delta_h: float) -> Probe:
        """Push-up at exactly the HPR distance, where the feasible set is the single point d_h.

        Solving that program numerically is degenerate (no strictly feasible
        point, unbounded multipliers), so the known answer is used instead.
        Counted as a push-up call all the same.
        """
        if self.calls >= self.max_calls:
            raise _CapReached
        self.calls += 1
        fol = self.follower(d_h)
        if not fol.optimal:
            raise SolverFailure(f"follower at the HPR point ended with status {fol.status.value}")
        return Probe(delta_h, True, np.array(d_h, dtype=float), delta_h, proxy_m(d_h), fol.objective)


def _values(d) -> np.ndarray:
    return np.asarray(getattr(d, "values", d), dtype=float).reshape(-1)


def fast_path(inst: DcOpfInstance, d_tilde, oracle: Optional[Oracle] = None) -> Optional[BilevelResult]:
    """Release ``d_tilde`` unchanged when its optimal cost is already inside the band."""
    oracle = oracle or Oracle(inst, d_tilde)
    fol = oracle.follower(_values(d_tilde))
    if fol.status is FollowerStatus.NUMERIC_FAILURE:
        raise SolverFailure("follower at the noisy demands failed numerically")
    lo, hi = inst.band
    if fol.optimal and lo <= fol.objective <= hi:
        return BilevelResult(BilevelStatus.FAST_PATH, DemandVector(_values(d_tilde), Role.RELEASED),
                             0.0, fol.objective, oracle_calls=oracle.calls, hpr_distance_sq=0.0,
                             solver_seconds=oracle.seconds)
    return None


@dataclass
class _Start:
    """Outcome of bound initialisation: the bracket plus the certified probe at its top."""

    status: BilevelStatus
    bounds: Optional[DistanceBudget] = None
    incumbent: Optional[Probe] = None
    hpr_point: Optional[np.ndarray] = None
    hpr_distance_sq: float = math.nan
    doubling: list = field(default_factory=list)


def _initialise(oracle: Oracle, eta: float) -> _Start:
    found = oracle.hpr()
    if found is None:
        return _Start(BilevelStatus.INFEASIBLE)
    d_h, delta_low = found
    start = _Start(BilevelStatus.INFEASIBLE, hpr_point=d_h, hpr_distance_sq=delta_low)
    delta = max(delta_low, eta)
    while True:
        try:
            if delta == delta_low:
                probe = oracle.pushup_at_hpr(d_h, delta_low)
            else:
                probe = oracle.pushup(delta)
        except _CapReached:
            start.status = BilevelStatus.ORACLE_CAP_HIT
            return start
        start.doubling.append(probe)
        log.debug("doubling: delta=%.6g feasible=%s cost=%s", delta, probe.feasible,
                  probe.follower_cost)
        if probe.certifies(oracle.inst):
            start.status = BilevelStatus.CONVERGED
            start.bounds = DistanceBudget(delta_low, delta)
            start.incumbent = probe
            return start
        if probe.feasible and probe.delta_up < delta * (1.0 - 1e-6) - 1e-9:
            # the ball no longer binds: a larger budget cannot raise total demand further
            return start
        delta *= 2.0


def init_bounds(inst: DcOpfInstance, d_tilde, params: Optional[PrivacyParams] = None, *,
                eta: Optional[float] = None, max_oracle_calls: Optional[int] = None) -> DistanceBudget:
    """Bracket for the bisection: HPR distance below, first certified doubling step above.

    Raises ``BilevelInfeasible`` when HPR is infeasible and ``OracleCapHit``
    when the doubling phase exhausts the call budget.
    """
    eta = eta if eta is not None else (params.eta if params else 1e-3)
    cap = max_oracle_calls if max_oracle_calls is not None else (params.max_oracle_calls if params else 3000)
    start = _initialise(Oracle(inst, d_tilde, cap), eta)
    if start.status is BilevelStatus.ORACLE_CAP_HIT:
        raise OracleCapHit("call budget exhausted while doubling the upper bound")
    if start.status is BilevelStatus.INFEASIBLE:
        raise BilevelInfeasible("no demand vector reaches the cost band")
    return start.bounds


def _bisect(oracle: Oracle, bounds: DistanceBudget, incumbent: Probe, eta: float) -> tuple:
    """Returns (status, incumbent probe, final bounds, trace)."""
    inst = oracle.inst
    low, high = bounds.delta_low, bounds.delta_high
    trace = []
    status = BilevelStatus.CONVERGED
    k = 0
    while high - low > eta:
        mid = 0.5 * (low + high)
        try:
            probe = oracle.pushup(mid)
        except _CapReached:
            status = BilevelStatus.ORACLE_CAP_HIT
            break
        if probe.certifies(inst):
            branch = Branch.UPPER_UPDATED
            incumbent = probe
            # the certified point may sit strictly inside the ball
            high = min(probe.delta_up, mid)
            low = min(low, high)
        else:
            branch = Branch.LOWER_UPDATED if probe.feasible else Branch.PUSHUP_INFEASIBLE
            low = mid
        trace.append(IterationRecord(k, low, high, mid, probe.delta_up, probe.pushup_m,
                                     probe.follower_cost, branch, probe.d_up))
        log.debug("iter %d: [%.6g, %.6g] %s", k, low, high, branch.value)
        k += 1
    return status, incumbent, DistanceBudget(low, high), trace


def blm_search(inst: DcOpfInstance, d_tilde, bounds: DistanceBudget, params: PrivacyParams, *,
               incumbent: Optional[Probe] = None, oracle: Optional[Oracle] = None) -> BilevelResult:
    """Bisection on the squared distance budget between ``bounds``.

    ``incumbent`` is the certified probe at ``bounds.delta_high``; without
    one the top of the bracket is probed first (one extra call).
    """
    oracle = oracle or Oracle(inst, d_tilde, params.max_oracle_calls)
    if incumbent is None:
        try:
            incumbent = oracle.pushup(bounds.delta_high)
        except _CapReached:
            return BilevelResult(BilevelStatus.ORACLE_CAP_HIT, None, math.nan, math.nan,
                                 oracle_calls=oracle.calls, bounds=bounds)
        if not incumbent.certifies(inst):
            raise ValueError("the upper end of the bracket does not certify a feasible release")
    status, best, final, trace = _bisect(oracle, bounds, incumbent, params.eta)
    return BilevelResult(status, DemandVector(best.d_up, Role.RELEASED), best.delta_up,
                         best.follower_cost, trace=trace, oracle_calls=oracle.calls,
                         bounds=final, solver_seconds=oracle.seconds)


def solve_bilevel(inst: DcOpfInstance, d_tilde, params: PrivacyParams, *, dump_dir=None,
                  skip_fast_path: bool = False) -> tuple:
    """Fast path, then bracket and bisect.  Returns (result, HPR point or None)."""
    oracle = Oracle(inst, d_tilde, params.max_oracle_calls, dump_dir)
    if not skip_fast_path:
        quick = fast_path(inst, d_tilde, oracle)
        if quick is not None:
            return quick, None
    start = _initialise(oracle, params.eta)
    if start.status is not BilevelStatus.CONVERGED:
        result = BilevelResult(start.status, None, math.nan, math.nan, oracle_calls=oracle.calls,
                               hpr_distance_sq=start.hpr_distance_sq, doubling=start.doubling,
                               solver_seconds=oracle.seconds)
        return result, start.hpr_point
    result = blm_search(inst, d_tilde, start.bounds, params, incumbent=start.incumbent, oracle=oracle)
    result.hpr_distance_sq = start.hpr_distance_sq
    result.doubling = start.doubling
    result.solver_seconds = oracle.seconds
    return result, start.hpr_point


@dataclass(frozen=True)
class ObfuscationMetrics:
    """Distances are plain L2; the ``norm_`` variants divide by ||d_orig||."""

    dist_laplace: float
    dist_hpr: float
    dist_bl: float
    norm_dist_laplace: float
    norm_dist_hpr: float
    norm_dist_bl: float
    thm2_ratio: Optional[float]
    cost_err_bl: float  # (O(d*) - f_tilde) / f_tilde
    cost_err_hpr: float  # (O(d_h) - f_tilde) / f_tilde
    hpr_cost: float
    oracle_calls: int
    solver_seconds: float


@dataclass
class ObfuscationRun:
    d_orig: DemandVector
    d_tilde: DemandVector
    d_hpr: Optional[DemandVector]
    result: BilevelResult
    metrics: ObfuscationMetrics


def _dist(a, b) -> float:
    return math.sqrt(l2sq_distance(a, b)) if a is not None and b is not None else math.nan


def run_obfuscation(inst: DcOpfInstance, d_orig, params: PrivacyParams, *, seed: Optional[int] = None,
                    noise_override=None, dump_dir=None) -> ObfuscationRun:
    """Noise the demands, then repair them through the bilevel model.

    ``noise_override`` replaces the Laplace draw with a fixed vector (a test
    hook; zeros give the noiseless pipeline).
    """
    d_orig = d_orig if isinstance(d_orig, DemandVector) else DemandVector(d_orig, Role.ORIGINAL)
    base = Oracle(inst, d_orig)
    if not base.follower(d_orig.values).optimal:
        raise BilevelInfeasible("the original demands admit no dispatch")
    if noise_override is not None:
        z = np.asarray(noise_override, dtype=float).reshape(-1)
        d_tilde = DemandVector(d_orig.values + z, Role.NOISY)
    else:
        d_tilde = obfuscate_demands(d_orig, params, LaplaceNoise.for_params(params, seed))

    result, d_h = solve_bilevel(inst, d_tilde, params, dump_dir=dump_dir)
    if result.status is BilevelStatus.FAST_PATH:
        d_h = d_tilde.values  # HPR would return the noisy point itself
    hpr_vec = DemandVector(d_h, Role.HPR_POINT) if d_h is not None else None

    f = inst.f_tilde
    hpr_cost = math.nan
    if hpr_vec is not None:
        fol = base.follower(hpr_vec.values)
        hpr_cost = fol.objective if fol.optimal else math.nan
    bl_cost = result.cost if result.released else math.nan
    scale = float(np.linalg.norm(d_orig.values))
    norm = (lambda v: v / scale) if scale > 0 else (lambda v: math.nan)
    ratio = None
    if result.released:
        try:
            ratio = theorem2_ratio(result.d_star, d_tilde, d_orig)
        except NoiselessInput:
            ratio = None
    dl, dh, db = _dist(d_tilde, d_orig), _dist(hpr_vec, d_orig), _dist(result.d_star, d_orig)
    rel = (lambda v: (v - f) / f) if f != 0 else (lambda v: math.nan)
    metrics = ObfuscationMetrics(dl, dh, db, norm(dl), norm(dh), norm(db), ratio, rel(bl_cost),
                                 rel(hpr_cost), hpr_cost, result.oracle_calls,
                                 result.solver_seconds + base.seconds)
    return ObfuscationRun(d_orig, d_tilde, hpr_vec, result, metrics)
