"""Flat baselines: every one searches the :func:`~gsa.benchmarks.flatten`
encoding and therefore fails with
:class:`~gsa.benchmarks.EncoderUnsupportedFamily` on Complex or Embedding
families, before the first evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .benchmarks import FlattenedEncoding, Problem, flatten
from .evaluation import BudgetExhausted, Evaluator, RunRecord, run_streams
from .genome import GeneFamilyKind

K = GeneFamilyKind

POP_SIZE = 50


@dataclass(frozen=True)
class EAParams:
    pop_size: int = POP_SIZE
    tournament: int = 3
    crossover_rate: float = 0.9
    mutation_sigma: float = 0.2  # fraction of each slot's range
    mutation_rate: float | None = None  # default 1/D
    elitism: int = 1


@dataclass(frozen=True)
class DEParams:
    pop_size: int = POP_SIZE
    f: float = 0.5
    cr: float = 0.9


@dataclass(frozen=True)
class MVGAParams:
    pop_size: int = POP_SIZE
    tournament: int = 2
    crossover_rate: float = 0.9
    mutation_rate: float | None = None  # default 1/D
    real_sigma: float = 0.1
    elitism: int = 1


def _setup(problem: Problem, budget: int, seed: int):
    enc = flatten(problem)  # raises before anything is evaluated
    rng, noise_rng = run_streams(seed)
    ev = Evaluator(problem, budget, noise_rng)
    return enc, rng, ev


def random_flattened(problem: Problem, budget: int, seed: int) -> RunRecord:
    enc, rng, ev = _setup(problem, budget, seed)
    span = enc.upper - enc.lower
    try:
        while True:
            ev(enc.decode(enc.lower + rng.random(enc.size) * span))
    except BudgetExhausted:
        pass
    return ev.record("RANDOM_FLATTENED", seed)


def flattened_de(problem: Problem, budget: int, seed: int, params: DEParams = DEParams()) -> RunRecord:
    """DE/rand/1/bin with greedy one-to-one replacement, clamped to the box."""
    enc, rng, ev = _setup(problem, budget, seed)
    n, d = params.pop_size, enc.size
    lo, hi = enc.lower, enc.upper
    x = lo + rng.random((n, d)) * (hi - lo)
    gens = 0
    try:
        fit = np.array([ev(enc.decode(row)) for row in x])
        while True:
            for i in range(n):
                r0, r1, r2 = rng.choice(n - 1, size=3, replace=False)
                r0 += r0 >= i
                r1 += r1 >= i
                r2 += r2 >= i
                mutant = x[r0] + params.f * (x[r1] - x[r2])
                mask = rng.random(d) < params.cr
                mask[rng.integers(d)] = True
                trial = np.clip(np.where(mask, mutant, x[i]), lo, hi)
                ft = ev(enc.decode(trial))
                if ft <= fit[i]:
                    x[i], fit[i] = trial, ft
            gens += 1
    except BudgetExhausted:
        pass
    return ev.record("FLATTENED_DE", seed, generations=gens)


class _EAState:
    """Generational EA over a real box: tournament selection, single-point
    crossover, per-coordinate Gaussian mutation, elitism.

    ``evaluate`` maps a vector of this box to fitness, so the same state
    serves the flat EA and the cooperative-coevolution subcomponents.
    """

    def __init__(self, lo, hi, evaluate, params: EAParams, rng, init=None):
        self.lo, self.hi = lo, hi
        self.evaluate = evaluate
        self.p = params
        self.rng = rng
        n, d = params.pop_size, lo.shape[0]
        self.sigma = params.mutation_sigma * (hi - lo)
        self.rate = params.mutation_rate if params.mutation_rate is not None else 1.0 / d
        if init is None:
            self.x = lo + rng.random((n, d)) * (hi - lo)
        else:
            self.x = init
        self.fit = np.array([evaluate(row) for row in self.x])

    def _tournament(self) -> int:
        idx = self.rng.integers(self.p.pop_size, size=self.p.tournament)
        return int(idx[np.argmin(self.fit[idx])])

    def step(self):
        p, rng = self.p, self.rng
        n, d = self.x.shape
        order = np.argsort(self.fit, kind="stable")
        new_x = np.empty_like(self.x)
        new_fit = np.empty(n)
        ne = min(p.elitism, n)
        new_x[:ne] = self.x[order[:ne]]
        new_fit[:ne] = self.fit[order[:ne]]
        i = ne
        while i < n:
            a = self.x[self._tournament()].copy()
            b = self.x[self._tournament()].copy()
            if d > 1 and rng.random() < p.crossover_rate:
                cut = rng.integers(1, d)
                a[cut:], b[cut:] = b[cut:].copy(), a[cut:].copy()
            for child in (a, b):
                if i >= n:
                    break
                mask = rng.random(d) < self.rate
                if mask.any():
                    child = np.clip(child + mask * rng.normal(0.0, 1.0, d) * self.sigma, self.lo, self.hi)
                new_x[i] = child
                # a budget stop mid-generation discards the partial generation
                new_fit[i] = self.evaluate(child)
                i += 1
        self.x, self.fit = new_x, new_fit


def flattened_ea(problem: Problem, budget: int, seed: int, params: EAParams = EAParams()) -> RunRecord:
    enc, rng, ev = _setup(problem, budget, seed)
    gens = 0
    try:
        state = _EAState(enc.lower, enc.upper, lambda v: ev(enc.decode(v)), params, rng)
        while True:
            state.step()
            gens += 1
    except BudgetExhausted:
        pass
    return ev.record("FLATTENED_EA", seed, generations=gens)


def _snap(enc: FlattenedEncoding, x: np.ndarray) -> np.ndarray:
    """Project onto legal slot values (integers, 0/1, category centres)."""
    return enc.encode(enc.decode(x))


def mixed_variable_ga(problem: Problem, budget: int, seed: int, params: MVGAParams = MVGAParams()) -> RunRecord:
    """Slot-aware GA on the flat vector.

    Integer slots step by +-1, Boolean slots flip, categorical slots are
    resampled and real slots get Gaussian noise; tournament-2 selection,
    uniform crossover, elitism of one.
    """
    enc, rng, ev = _setup(problem, budget, seed)
    n, d = params.pop_size, enc.size
    lo, hi = enc.lower, enc.upper
    kinds = enc.slot_kinds()
    is_int = kinds == K.INTEGER
    is_bool = kinds == K.BOOLEAN
    is_cat = kinds == K.CATEGORICAL
    is_real = kinds == K.REAL
    n_cat = np.ones(d)
    for s, sl in zip(enc.specs, enc.slices):
        if s.kind is K.CATEGORICAL:
            n_cat[sl] = s.n_categories
    sigma = params.real_sigma * (hi - lo)
    rate = params.mutation_rate if params.mutation_rate is not None else 1.0 / d

    def mutate(v):
        mask = rng.random(d) < rate
        if not mask.any():
            return v
        v = v.copy()
        m = mask & is_int
        v[m] = np.clip(v[m] + np.where(rng.random(m.sum()) < 0.5, -1.0, 1.0), lo[m] + 0.5, hi[m] - 0.5)
        m = mask & is_bool
        v[m] = 1.0 - v[m]
        m = mask & is_cat
        v[m] = (rng.integers(0, n_cat[m]) + 0.5) / n_cat[m]
        m = mask & is_real
        v[m] = np.clip(v[m] + rng.normal(0.0, 1.0, m.sum()) * sigma[m], lo[m], hi[m])
        return v

    def tournament(fit):
        idx = rng.integers(n, size=params.tournament)
        return int(idx[np.argmin(fit[idx])])

    gens = 0
    try:
        x = np.array([_snap(enc, lo + rng.random(d) * (hi - lo)) for _ in range(n)])
        fit = np.array([ev(enc.decode(row)) for row in x])
        while True:
            order = np.argsort(fit, kind="stable")
            ne = min(params.elitism, n)
            new_x = np.empty_like(x)
            new_fit = np.empty(n)
            new_x[:ne], new_fit[:ne] = x[order[:ne]], fit[order[:ne]]
            for i in range(ne, n):
                a, b = x[tournament(fit)], x[tournament(fit)]
                if rng.random() < params.crossover_rate:
                    child = np.where(rng.random(d) < 0.5, a, b)
                else:
                    child = a.copy()
                child = mutate(child)
                new_x[i] = child
                new_fit[i] = ev(enc.decode(child))
            x, fit = new_x, new_fit
            gens += 1
    except BudgetExhausted:
        pass
    return ev.record("MIXED_VARIABLE_GA", seed, generations=gens)


def cooperative_coevolution(problem: Problem, budget: int, seed: int, groups: int | None = None,
                            inner_generations: int = 1, params: EAParams = EAParams()) -> RunRecord:
    """Random index grouping; each group runs the flat-EA loop in the
    context of the best full vector found so far, round-robin.

    ``groups`` defaults to the number of gene families.  With one group
    this is exactly :func:`flattened_ea`.
    """
    enc, rng, ev = _setup(problem, budget, seed)
    d = enc.size
    g = len(problem.specs) if groups is None else int(groups)
    g = max(1, min(g, d))
    if g == 1:
        parts = [np.arange(d)]
    else:
        parts = np.array_split(rng.permutation(d), g)
    context = None
    best_ctx = np.inf
    gens = 0
    try:
        if g == 1:
            state = _EAState(enc.lower, enc.upper, lambda v: ev(enc.decode(v)), params, rng)
            while True:
                state.step()
                gens += 1
        context = enc.lower + rng.random(d) * (enc.upper - enc.lower)
        best_ctx = ev(enc.decode(context))

        def evaluator_for(idx):
            def f(sub):
                nonlocal context, best_ctx
                full = context.copy()
                full[idx] = sub
                val = ev(enc.decode(full))
                if val < best_ctx:
                    best_ctx, context = val, full
                return val
            return f

        states = []
        for idx in parts:
            states.append(_EAState(enc.lower[idx], enc.upper[idx], evaluator_for(idx), params, rng))
        while True:
            for st in states:
                for _ in range(inner_generations):
                    st.step()
            gens += 1
    except BudgetExhausted:
        pass
    return ev.record("COOPERATIVE_COEVOLUTION", seed, generations=gens,
                     groups=[p.tolist() for p in parts])


BASELINES = {
    "RANDOM_FLATTENED": random_flattened,
    "FLATTENED_DE": flattened_de,
    "FLATTENED_EA": flattened_ea,
    "MIXED_VARIABLE_GA": mixed_variable_ga,
    "COOPERATIVE_COEVOLUTION": cooperative_coevolution,
}
