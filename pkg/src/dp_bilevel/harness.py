"""Run configuration, CSV reports and the commands behind the CLI.

Every CSV starts with the schema line ``# dp-bilevel v1`` followed by a
header row.  ``report.csv`` holds only quantities that are a pure function of
the configuration, so repeated benchmark runs produce identical bytes; wall
clock times go to ``timing.csv`` instead.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .bilevel import (BilevelInfeasible, BilevelStatus, Oracle, SolverFailure, _CapReached,
                      run_obfuscation)
from .core import DemandVector, PrivacyParams
from .dcopf import DcOpfInstance, Network, instance, solve_follower
from .dp import LaplaceNoise, obfuscate_demands
from .matpower import emit_matpower, load_case

log = logging.getLogger(__name__)

SCHEMA = "# dp-bilevel v1"
IN_BAND_TOL = 1e-9

EXIT_OK, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_CAP, EXIT_USAGE = 0, 2, 3, 4, 64

REPORT_COLUMNS = ["seed", "status", "oracle_calls", "cost_err_bl_pct", "cost_err_hpr_pct",
                  "dist_bl", "dist_hpr", "dist_laplace", "norm_dist_bl", "norm_dist_hpr",
                  "norm_dist_laplace", "thm2_ratio", "delta_star"]
SUMMARY_COLUMNS = ["statistic"] + REPORT_COLUMNS[2:]
TIMING_COLUMNS = ["seed", "wall_ms"]
TRACE_COLUMNS = ["iter", "delta_low", "delta_high", "delta_mid", "delta_up", "pushup_m",
                 "follower_cost", "branch"]
PROBE_COLUMNS = ["delta", "delta_up", "pushup_m", "follower_cost", "in_band", "status"]


class UsageError(ValueError):
    """Bad combination of options; maps to exit code 64."""


def configure_logging(env=None) -> None:
    """Diagnostics on stderr at the level named by ``DP_BILEVEL_LOG``."""
    env = os.environ if env is None else env
    name = env.get("DP_BILEVEL_LOG", "error").strip().lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if name not in levels:
        raise UsageError(f"DP_BILEVEL_LOG must be one of {sorted(levels)}, got {name!r}")
    logging.basicConfig(level=levels[name], stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s", force=True)


@dataclass
class RunConfig:
    case: str
    alpha: float = 0.1
    epsilon: float = 1.0
    beta: Optional[float] = None
    beta_pct: Optional[float] = None
    eta: float = 1e-3
    seed: int = 0
    runs: int = 50
    max_oracle_calls: int = 3000
    f_tilde: Optional[float] = None  # None: the optimal cost at the case's own demands
    delta_grid: Optional[Sequence[float]] = None
    d_tilde: Optional[Sequence[float]] = None  # probe only: fixed noisy vector
    output_dir: Path = Path(".")
    dump_dir: Optional[Path] = None
    demand_bounds: Optional[tuple] = None

    def __post_init__(self):
        if (self.beta is None) == (self.beta_pct is None):
            raise UsageError("give exactly one of beta and beta_pct")
        if int(self.runs) < 1:
            raise UsageError("runs must be at least 1")
        if self.delta_grid is not None:
            grid = list(self.delta_grid)
            if not grid:
                raise UsageError("delta grid is empty")
            if any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 0:
                raise UsageError("delta grid must be non-negative and strictly ascending")
        self.output_dir = Path(self.output_dir)

    def resolve_beta(self, f_tilde: float) -> float:
        if self.beta is not None:
            return float(self.beta)
        return float(self.beta_pct) * abs(f_tilde) / 100.0

    def params(self, beta: float, seed: int) -> PrivacyParams:
        try:
            return PrivacyParams(epsilon=self.epsilon, alpha=self.alpha, beta=beta, eta=self.eta,
                                 max_oracle_calls=self.max_oracle_calls, seed=seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


@dataclass
class Setup:
    """A loaded case with its target cost and cost band."""

    network: Network
    inst: DcOpfInstance
    d_orig: DemandVector
    f_tilde: float
    beta: float


def prepare(config: RunConfig) -> Setup:
    """Parse the case and fix f_tilde and beta.

    Raises the parser's errors (unreadable files included) and
    ``BilevelInfeasible`` when the case's own demands have no dispatch.
    """
    network = load_case(config.case)
    d_orig = network.demands()
    if config.f_tilde is None:
        base = instance(network, 0.0, 1.0)
        fol = solve_follower(base, d_orig)
        if not fol.optimal:
            raise BilevelInfeasible(f"the case's own demands give status {fol.status.value}")
        f_tilde = fol.objective
    else:
        f_tilde = float(config.f_tilde)
    beta = config.resolve_beta(f_tilde)
    if not beta > 0:
        raise UsageError(f"beta resolves to {beta}; it must be positive")
    inst = instance(network, f_tilde, beta, demand_bounds=config.demand_bounds,
                    private=config.f_tilde is not None)
    return Setup(network, inst, d_orig, f_tilde, beta)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, columns: Sequence[str], rows: Sequence[dict]) -> Path:
    path = Path(path)
    buf = io.StringIO()
    buf.write(SCHEMA + "\n")
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k)) for k in columns})
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())
    return path


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path) -> list:
    """Rows of a CSV written by this tool, with numbers and booleans converted."""
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != SCHEMA:
            raise ValueError(f"{path}: expected schema line {SCHEMA!r}, found {first!r}")
        return [{k: _parse_cell(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def _pct(v: float) -> float:
    return 100.0 * v if v is not None and math.isfinite(v) else math.nan


def trace_rows(result) -> list:
    return [{"iter": r.iter, "delta_low": r.delta_low, "delta_high": r.delta_high,
             "delta_mid": r.delta_mid, "delta_up": r.delta_up, "pushup_m": r.pushup_objective,
             "follower_cost": r.follower_cost, "branch": r.branch.value} for r in result.trace]


def report_row(seed: int, run) -> dict:
    m = run.metrics
    return {"seed": seed, "status": run.result.status.value, "oracle_calls": m.oracle_calls,
            "cost_err_bl_pct": _pct(m.cost_err_bl), "cost_err_hpr_pct": _pct(m.cost_err_hpr),
            "dist_bl": m.dist_bl, "dist_hpr": m.dist_hpr, "dist_laplace": m.dist_laplace,
            "norm_dist_bl": m.norm_dist_bl, "norm_dist_hpr": m.norm_dist_hpr,
            "norm_dist_laplace": m.norm_dist_laplace,
            "thm2_ratio": m.thm2_ratio if m.thm2_ratio is not None else math.nan,
            "delta_star": run.result.delta_star}


def failed_row(seed: int, status: str) -> dict:
    row = {k: math.nan for k in REPORT_COLUMNS}
    row.update(seed=seed, status=status, oracle_calls=0)
    return row


@dataclass
class BenchmarkReport:
    rows: list
    wall_ms: list = field(default_factory=list)

    def aggregates(self) -> list:
        """Mean and max of every numeric column, ignoring NaN entries."""
        out = []
        for stat, fn in (("mean", np.mean), ("max", np.max)):
            agg = {"statistic": stat}
            for col in SUMMARY_COLUMNS[1:]:
                vals = np.array([r[col] for r in self.rows], dtype=float)
                vals = vals[np.isfinite(vals)]
                agg[col] = float(fn(vals)) if vals.size else math.nan
            out.append(agg)
        return out

    def write(self, out_dir, extras: bool = True) -> Path:
        """report.csv, plus summary.csv and timing.csv when ``extras``."""
        out_dir = Path(out_dir)
        path = write_csv(out_dir / "report.csv", REPORT_COLUMNS, self.rows)
        if not extras:
            return path
        write_csv(out_dir / "summary.csv", SUMMARY_COLUMNS, self.aggregates())
        timing = [{"seed": r["seed"], "wall_ms": t} for r, t in zip(self.rows, self.wall_ms)]
        write_csv(out_dir / "timing.csv", TIMING_COLUMNS, timing)
        return path


def _run_one(setup: Setup, config: RunConfig, seed: int):
    params = config.params(setup.beta, seed)
    return run_obfuscation(setup.inst, setup.d_orig, params, seed=seed, dump_dir=config.dump_dir)


def cmd_solve(config: RunConfig, as_json: bool = False, stream=None) -> int:
    """Optimal dispatch at the case's own demands."""
    stream = stream or sys.stdout
    network = load_case(config.case)
    fol = solve_follower(instance(network, 0.0, 1.0), network.demands())
    payload = {"status": fol.status.value,
               "objective": fol.objective if fol.optimal else None,
               "dispatch": [float(p) for p in fol.dispatch] if fol.optimal else []}
    if as_json:
        stream.write(json.dumps(payload) + "\n")
    elif fol.optimal:
        stream.write(f"objective {fol.objective!r}\n")
        for g, p in zip(network.generators, fol.dispatch):
            stream.write(f"gen@bus{g.bus} {float(p)!r}\n")
    else:
        stream.write(f"status {fol.status.value}\n")
    if fol.optimal:
        return EXIT_OK
    return EXIT_INFEASIBLE if fol.status.value == "infeasible" else 1


def cmd_obfuscate(config: RunConfig, stream=None) -> int:
    """One release per seed: released case, trace and a report row."""
    stream = stream or sys.stdout
    setup = prepare(config)
    out = config.output_dir
    rows, wall, codes = [], [], []
    for i in range(int(config.runs)):
        seed = config.seed + i
        t0 = time.perf_counter()
        try:
            run = _run_one(setup, config, seed)
        except BilevelInfeasible:
            rows.append(failed_row(seed, BilevelStatus.INFEASIBLE.value))
            wall.append((time.perf_counter() - t0) * 1e3)
            codes.append(EXIT_INFEASIBLE)
            continue
        wall.append((time.perf_counter() - t0) * 1e3)
        res = run.result
        rows.append(report_row(seed, run))
        write_csv(out / f"trace_{seed}.csv", TRACE_COLUMNS, trace_rows(res))
        if res.released:
            released = setup.network.with_demands(res.d_star.values)
            (out / f"released_case_{seed}.m").write_text(
                emit_matpower(released, name=f"released_case_{seed}"))
            codes.append(EXIT_OK)
        else:
            codes.append(EXIT_CAP if res.status is BilevelStatus.ORACLE_CAP_HIT else EXIT_INFEASIBLE)
        stream.write(f"seed {seed}: {res.status.value}, delta* {res.delta_star!r}, "
                     f"cost {res.cost!r}, {res.oracle_calls} push-up calls\n")
    BenchmarkReport(rows, wall).write(out, extras=False)
    if EXIT_INFEASIBLE in codes:
        return EXIT_INFEASIBLE
    if EXIT_CAP in codes:
        return EXIT_CAP
    return EXIT_OK


def run_benchmark(config: RunConfig) -> BenchmarkReport:
    """Independent runs with seeds ``seed .. seed + runs - 1``; failures become rows."""
    setup = prepare(config)
    rows, wall = [], []
    for i in range(int(config.runs)):
        seed = config.seed + i
        t0 = time.perf_counter()
        try:
            rows.append(report_row(seed, _run_one(setup, config, seed)))
        except BilevelInfeasible:
            rows.append(failed_row(seed, BilevelStatus.INFEASIBLE.value))
        except SolverFailure as exc:
            log.error("seed %d: %s", seed, exc)
            rows.append(failed_row(seed, "solver_failure"))
        wall.append((time.perf_counter() - t0) * 1e3)
    return BenchmarkReport(rows, wall)


def cmd_benchmark(config: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    report = run_benchmark(config)
    path = report.write(config.output_dir)
    mean, mx = report.aggregates()
    stream.write(f"{len(report.rows)} runs -> {path}\n")
    for col in ("oracle_calls", "cost_err_bl_pct", "cost_err_hpr_pct", "norm_dist_bl",
                "norm_dist_laplace", "thm2_ratio"):
        stream.write(f"{col:>18}  mean {mean[col]:.6g}  max {mx[col]:.6g}\n")
    return EXIT_OK


def probe_rows(setup: Setup, d_tilde, grid: Sequence[float], dump_dir=None) -> list:
    """For each budget: push-up, then the optimal cost at its argmax."""
    oracle = Oracle(setup.inst, d_tilde, max_calls=len(grid) + 1, dump_dir=dump_dir)
    lo, hi = setup.inst.band
    rows = []
    for delta in grid:
        row = {"delta": float(delta), "delta_up": math.nan, "pushup_m": math.nan,
               "follower_cost": math.nan, "in_band": False}
        try:
            probe = oracle.pushup(float(delta))
        except (SolverFailure, _CapReached) as exc:
            log.error("probe at delta=%g failed: %s", delta, exc)
            row["status"] = "solver_failure"
            rows.append(row)
            continue
        if probe.feasible:
            cost = probe.follower_cost
            row.update(delta_up=probe.delta_up, pushup_m=probe.pushup_m, follower_cost=cost,
                       in_band=lo - IN_BAND_TOL <= cost <= hi + IN_BAND_TOL, status="feasible")
        else:
            row["status"] = "infeasible"
        rows.append(row)
    return rows


def monotonicity_violations(rows: Sequence[dict], tol: float = 1e-6) -> list:
    """Consecutive feasible (delta, delta') pairs where the cost drops by more than ``tol``."""
    feasible = [r for r in rows if r.get("status") == "feasible"]
    return [(a["delta"], b["delta"]) for a, b in zip(feasible, feasible[1:])
            if b["follower_cost"] < a["follower_cost"] - tol]


def probe_d_tilde(setup: Setup, config: RunConfig) -> np.ndarray:
    if config.d_tilde is not None:
        d = np.asarray(config.d_tilde, dtype=float)
        if d.size != setup.inst.n_demand:
            raise UsageError(f"--d-tilde needs {setup.inst.n_demand} values, got {d.size}")
        return d
    params = config.params(setup.beta, config.seed)
    return obfuscate_demands(setup.d_orig, params, LaplaceNoise.for_params(params)).values


def cmd_probe_monotonicity(config: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    if config.delta_grid is None:
        raise UsageError("probe-monotonicity needs --delta-grid")
    setup = prepare(config)
    d_tilde = probe_d_tilde(setup, config)
    rows = probe_rows(setup, d_tilde, config.delta_grid, config.dump_dir)
    path = write_csv(config.output_dir / "probe.csv", PROBE_COLUMNS, rows)
    stream.write(f"d_tilde {[float(v) for v in d_tilde]}, band {setup.inst.band}\n")
    for r in rows:
        stream.write(f"delta {r['delta']:<10g} {r['status']:<14} cost {r['follower_cost']:.6g}"
                     f"  in_band {r['in_band']}\n")
    for a, b in monotonicity_violations(rows):
        stream.write(f"monotonicity violated between delta={a!r} and delta={b!r}\n")
    stream.write(f"-> {path}\n")
    return EXIT_OK
