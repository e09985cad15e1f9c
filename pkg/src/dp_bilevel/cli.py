"""Command line entry point: ``dp-bilevel {solve|obfuscate|benchmark|probe-monotonicity}``.

Exit codes: 0 success, 2 unreadable or malformed case, 3 infeasible,
4 push-up call budget exhausted, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bilevel import BilevelInfeasible, OracleCapHit
from .harness import (EXIT_CAP, EXIT_INFEASIBLE, EXIT_PARSE, EXIT_USAGE, RunConfig, UsageError,
                      cmd_benchmark, cmd_obfuscate, cmd_probe_monotonicity, cmd_solve,
                      configure_logging)
from .matpower import CaseParseError


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; 2 is taken by parse errors here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _pair(text: str) -> tuple:
    vals = _floats(text)
    if len(vals) != 2 or vals[0] > vals[1]:
        raise argparse.ArgumentTypeError("expected 'lo,hi' with lo <= hi")
    return tuple(vals)


def _common(p: argparse.ArgumentParser, *, privacy: bool, runs_default: int = 50):
    p.add_argument("--case", required=True,
                   help="MATPOWER .m file or a bundled case name (onebus-2gen, tri-3bus)")
    if not privacy:
        return
    p.add_argument("--alpha", type=float, default=0.1, help="indistinguishability level (p.u.)")
    p.add_argument("--epsilon", type=float, default=1.0)
    beta = p.add_mutually_exclusive_group(required=True)
    beta.add_argument("--beta", type=float, help="cost band half-width, absolute ($/h)")
    beta.add_argument("--beta-pct", type=float, help="cost band half-width, percent of f_tilde")
    p.add_argument("--eta", type=float, default=1e-3, help="bisection tolerance on delta")
    p.add_argument("--seed", type=int, default=0, help="base seed; run i uses seed + i")
    p.add_argument("--runs", type=int, default=runs_default)
    p.add_argument("--max-oracle-calls", type=int, default=3000)
    p.add_argument("--f-tilde", type=float, help="cost target (default: optimal cost of the case)")
    p.add_argument("--demand-bounds", type=_pair, metavar="LO,HI",
                   help="box on released demands, e.g. 0,inf")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--dump-lp", type=Path, metavar="DIR", help="write every subproblem to DIR")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dp-bilevel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="optimal dispatch at the case's own demands")
    _common(p, privacy=False)
    p.add_argument("--json", action="store_true", help="print one JSON object")

    p = sub.add_parser("obfuscate", help="release noisy demands repaired to the cost band")
    _common(p, privacy=True, runs_default=1)

    p = sub.add_parser("benchmark", help="seeded runs with per-run and aggregate statistics")
    _common(p, privacy=True)

    p = sub.add_parser("probe-monotonicity", help="push-up cost as a function of the budget")
    _common(p, privacy=True, runs_default=1)
    p.add_argument("--delta-grid", type=_floats, required=True, metavar="A,B,C")
    p.add_argument("--d-tilde", type=_floats, metavar="V1,V2,...",
                   help="noisy demands to probe around (default: one seeded Laplace draw)")
    return parser


def _config(args) -> RunConfig:
    if args.command == "solve":
        return RunConfig(case=args.case, beta=1.0)
    return RunConfig(case=args.case, alpha=args.alpha, epsilon=args.epsilon, beta=args.beta,
                     beta_pct=args.beta_pct, eta=args.eta, seed=args.seed, runs=args.runs,
                     max_oracle_calls=args.max_oracle_calls, f_tilde=args.f_tilde,
                     delta_grid=getattr(args, "delta_grid", None),
                     d_tilde=getattr(args, "d_tilde", None), output_dir=args.out,
                     dump_dir=args.dump_lp, demand_bounds=args.demand_bounds)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configure_logging()
        config = _config(args)
        if args.command == "solve":
            return cmd_solve(config, as_json=args.json)
        if args.command == "obfuscate":
            return cmd_obfuscate(config)
        if args.command == "benchmark":
            return cmd_benchmark(config)
        return cmd_probe_monotonicity(config)
    except UsageError as exc:
        print(f"dp-bilevel: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CaseParseError as exc:
        print(f"dp-bilevel: cannot read case: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BilevelInfeasible as exc:
        print(f"dp-bilevel: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OracleCapHit as exc:
        print(f"dp-bilevel: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
