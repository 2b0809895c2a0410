"""Name -> runner registry covering the GSA variants and the flat baselines."""
from __future__ import annotations

from typing import Callable

from ..baselines import BASELINES
from ..benchmarks import Problem
from ..core import VARIANTS, make_variant, run_gsa
from ..evaluation import RunRecord

Runner = Callable[[Problem, int, int], RunRecord]


def _gsa_runner(name: str) -> Runner:
    def run(problem: Problem, budget: int, seed: int) -> RunRecord:
        return run_gsa(problem, make_variant(name, budget=budget), seed)
    return run


ALGORITHMS: dict[str, Runner] = {name: _gsa_runner(name) for name in VARIANTS}
ALGORITHMS.update(BASELINES)


def run_algorithm(name: str, problem: Problem, budget: int, seed: int) -> RunRecord:
    return ALGORITHMS[name](problem, budget, seed)
