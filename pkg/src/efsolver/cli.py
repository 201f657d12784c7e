"""Command line front end.

    efsolver solve FILE [--strategy S] [--epsilon R] [--kappa R]
                        [--max-splits N] [--time-budget SECS]
                        [--verify] [--json]
    efsolver bench [--json] [--time-budget SECS] [--max-splits N]

Exit codes for `solve`: 0 solution found, 1 infeasible, 2 budget
exhausted, 3 parse/validation error.  With --json, machine-readable
output is one JSON object per run, newline-delimited.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass

from .benchmarks import CORE_INSTANCES, load_benchmark
from .errors import EFSolverError, InvalidProblem, ParseError, UndeclaredVariable
from .heuristics import HeuristicConfig, Strategy
from .model import validate_problem
from .parsing import parse_problem
from .solver import Outcome, SolveConfig, SolveOutcome, VerifyStatus, solve

EXIT_SOLUTION = 0
EXIT_INFEASIBLE = 1
EXIT_BUDGET = 2
EXIT_INPUT = 3

_EXIT_BY_OUTCOME = {
    Outcome.SOLUTION: EXIT_SOLUTION,
    Outcome.INFEASIBLE: EXIT_INFEASIBLE,
    Outcome.BUDGET_EXHAUSTED: EXIT_BUDGET,
}


@dataclass
class RunReport:
    outcome: str
    x: list[float] | None
    splits: int
    rounds: int
    lp_solves: int
    wall_time_ms: float
    strategy: str
    epsilon: float
    verified: bool | None
    instance: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)


def make_report(result: SolveOutcome, cfg: SolveConfig,
                instance: str | None = None) -> RunReport:
    verified = None
    if result.verification is not None:
        verified = result.verification.status is VerifyStatus.VERIFIED
    return RunReport(
        outcome=result.outcome.value,
        x=[float(v) for v in result.x] if result.x is not None else None,
        splits=result.stats.splits,
        rounds=result.stats.rounds,
        lp_solves=result.stats.lp_solves,
        wall_time_ms=result.stats.wall_time * 1000.0,
        strategy=cfg.heuristic.strategy.value,
        epsilon=cfg.heuristic.epsilon,
        verified=verified,
        instance=instance,
    )


def _solve_config(args) -> SolveConfig:
    return SolveConfig(
        heuristic=HeuristicConfig(
            epsilon=args.epsilon,
            aging_kappa=args.kappa,
            strategy=Strategy.from_name(args.strategy),
        ),
        max_splits=args.max_splits,
        time_budget=args.time_budget,
        verify=getattr(args, "verify", False),
    )


def cmd_solve(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        problem = parse_problem(text)
        violations = validate_problem(problem)
        if violations:
            for v in violations:
                print(f"error: {v}", file=sys.stderr)
            return EXIT_INPUT
        cfg = _solve_config(args)
        result = solve(problem, cfg)
    except (ParseError, UndeclaredVariable, InvalidProblem) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    report = make_report(result, cfg)
    if args.json:
        print(report.to_json())
    else:
        _print_human(problem, result, report)
    return _EXIT_BY_OUTCOME[result.outcome]


def _print_human(problem, result: SolveOutcome, report: RunReport) -> None:
    print(f"outcome: {report.outcome}")
    if result.x is not None:
        assign = ", ".join(f"{n} = {v:.12g}"
                           for n, v in zip(problem.x_vars, result.x))
        print(f"x: {assign}")
    if result.reason:
        print(f"reason: {result.reason}")
    if result.witness_id is not None:
        print(f"witness branch: {result.witness_id}")
    print(f"splits: {report.splits}   lp solves: {report.lp_solves}   "
          f"time: {report.wall_time_ms:.1f} ms")
    if report.verified is not None:
        print(f"verified: {'yes' if report.verified else 'NO'}")


def cmd_bench(args) -> int:
    strategies = (Strategy.ROUND_ROBIN, Strategy.SPLIT_WORST, Strategy.SPLIT_ALL)
    reports: dict[str, dict[str, RunReport]] = {}
    for name in args.instances:
        problem = load_benchmark(name)
        reports[name] = {}
        for strategy in strategies:
            cfg = SolveConfig(
                heuristic=HeuristicConfig(epsilon=args.epsilon, strategy=strategy),
                max_splits=args.max_splits,
                time_budget=args.time_budget,
            )
            result = solve(problem, cfg)
            report = make_report(result, cfg, instance=name)
            reports[name][strategy.value] = report
            if args.json:
                print(report.to_json(), flush=True)
    if not args.json:
        _print_bench_table(reports, strategies)
    return 0


def _print_bench_table(reports, strategies) -> None:
    header = f"{'':10}" + "".join(f"{s.value:>24}" for s in strategies)
    sub = f"{'instance':10}" + "".join(f"{'splits':>14}{'time':>10}" for _ in strategies)
    print(header)
    print(sub)
    for name, per_strategy in reports.items():
        cells = []
        for s in strategies:
            rep = per_strategy[s.value]
            if rep.outcome != Outcome.SOLUTION.value:
                cells.append(f"{'-':>14}{'-':>10}")
                continue
            count = (f"{rep.splits}/{rep.rounds}r" if s is Strategy.SPLIT_ALL
                     else str(rep.splits))
            cells.append(f"{count:>14}{rep.wall_time_ms / 1000:>9.3f}s")
        print(f"{name:10}" + "".join(cells))
    print("\nsplit-all cells show box-splits/iterations; '-' marks runs that "
          "did not finish\nwithin the split/time budget.")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="efsolver",
        description="Solve exists-forall constraints over boxed universal "
                    "variables by interval evaluation, LP relaxation and "
                    "residual-driven box splitting.")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve one problem file")
    ps.add_argument("file")
    ps.add_argument("--strategy", default="split-all",
                    choices=[s.value for s in Strategy])
    ps.add_argument("--epsilon", type=float, default=1e-3)
    ps.add_argument("--kappa", type=float, default=0.1)
    ps.add_argument("--max-splits", type=int, default=10_000)
    ps.add_argument("--time-budget", type=float, default=120.0)
    ps.add_argument("--verify", action="store_true",
                    help="run the independent interval verifier on the result")
    ps.add_argument("--json", action="store_true")
    ps.set_defaults(func=cmd_solve)

    pb = sub.add_parser("bench", help="run the bundled benchmark suite")
    pb.add_argument("--json", action="store_true")
    pb.add_argument("--time-budget", type=float, default=120.0)
    pb.add_argument("--max-splits", type=int, default=5_000)
    pb.add_argument("--epsilon", type=float, default=1e-3)
    pb.add_argument("--instances", nargs="+", default=list(CORE_INSTANCES),
                    choices=list(CORE_INSTANCES))
    pb.set_defaults(func=cmd_bench)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EFSolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
