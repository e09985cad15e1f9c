"""Differentially private release of power demands, repaired by a bilevel model.

Noisy demands from the Laplace mechanism are post-processed into the nearest
vector whose optimal DC dispatch cost lies within ``beta`` of a target.
"""

from .core import (CostSource, CostTarget, DemandVector, DimensionError, DistanceBudget,
                   FollowerResult, FollowerStatus, NoiselessInput, PrivacyParams, Role,
                   l2sq_distance, theorem2_ratio)
from .dp import LaplaceNoise, adjacency_check, laplace_inverse_cdf, obfuscate_demands
from .solver import Ball, ConvexProgram, Feasibility, ProgramSolution, Sense, Status, check_feasible, solve
from .dcopf import (Bus, DcOpfInstance, Generator, Line, Network, NetworkError, build_follower,
                    build_hpr, build_pushup, instance, proxy_m, solve_follower)
from .bilevel import (BilevelInfeasible, BilevelResult, BilevelStatus, Branch, IterationRecord,
                      ObfuscationMetrics, ObfuscationRun, OracleCapHit, SolverFailure, blm_search,
                      fast_path, init_bounds, run_obfuscation, solve_bilevel)
from .matpower import emit_matpower, load_case, parse_matpower

__version__ = "0.1.0"
