"""Budgeted evaluation gateway and the per-run record shared by all algorithms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .assembly import AssemblyMode, assemble
from .benchmarks import Problem
from .genome import Bundle


class BudgetExhausted(Exception):
    """Raised by :class:`Evaluator` when a call would exceed the budget."""


@dataclass
class RunRecord:
    algorithm: str
    best_fitness_trace: list[tuple[int, float]]
    final_best_bundle: Bundle | None
    final_best_fitness: float
    evaluations_used: int
    seed: int
    budget: int
    generations: int = 0
    info: dict = field(default_factory=dict)


class Evaluator:
    """Every fitness evaluation of a run goes through here.

    Counts calls against ``budget`` (raising :class:`BudgetExhausted` once it
    is spent), returns the *observed* fitness, and tracks the best-so-far
    *true* fitness with its bundle.  With an assembly ``mode``, assembly-aware
    problems are scored on the assembled phenotype.
    """

    def __init__(self, problem: Problem, budget: int, noise_rng: np.random.Generator,
                 mode: AssemblyMode | None = None):
        self.problem = problem
        self.budget = int(budget)
        self.noise_rng = noise_rng
        self.used = 0
        self.best = math.inf
        self.best_bundle: Bundle | None = None
        self.trace: list[tuple[int, float]] = []
        self._pheno = mode is not None and problem.assembly_aware
        self._mode = mode
        self._noisy = problem.noise is not None and problem.noise.scale > 0

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    def __call__(self, bundle: Bundle) -> float:
        if self.used >= self.budget:
            raise BudgetExhausted
        self.used += 1
        problem = self.problem
        if self._pheno:
            true = problem.evaluate_pheno(bundle, assemble(bundle, self._mode, problem.specs))
        else:
            true = problem.fn(bundle)
        if true < self.best:
            self.best = true
            self.best_bundle = bundle
            self.trace.append((self.used, true))
        if self._noisy:
            return problem.observe(true, self.noise_rng)
        return true

    def record(self, algorithm: str, seed: int, generations: int = 0, **info) -> RunRecord:
        return RunRecord(
            algorithm=algorithm,
            best_fitness_trace=list(self.trace),
            final_best_bundle=self.best_bundle,
            final_best_fitness=self.best,
            evaluations_used=self.used,
            seed=seed,
            budget=self.budget,
            generations=generations,
            info=info,
        )


def run_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (algorithm, observation-noise) generators for one run."""
    algo, noise = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(algo), np.random.default_rng(noise)
