"""Bundled benchmark problems.

A-D are the polynomial certificate-search instances run by `efsolver
bench`; the eq_* files are small synthetic instances exercising the
equality path (two solvable, one with contradictory equalities).
"""

from importlib import resources

from ..model import Problem
from ..parsing import parse_problem

CORE_INSTANCES = ("A", "B", "C", "D")
EQUALITY_INSTANCES = ("eq_pinned", "eq_guarded", "eq_conflict")


def benchmark_names() -> tuple[str, ...]:
    return CORE_INSTANCES + EQUALITY_INSTANCES


def benchmark_text(name: str) -> str:
    if name not in benchmark_names():
        raise KeyError(f"unknown benchmark {name!r}")
    return resources.files(__name__).joinpath(f"{name}.efp").read_text("utf-8")


def load_benchmark(name: str) -> Problem:
    return parse_problem(benchmark_text(name))
