"""The Geno-Synthetic optimizer.

One engine, parameterized by :class:`GsaConfig`: a typed subpopulation per
gene family, index-aligned bundle formation, direct / elite-context /
ensemble-context credit, diversity-regularized (mu + mu) replacement, and
per-family update periods for asynchronous schedules.  The named variants
are produced by :func:`make_variant`.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .assembly import AssemblyMode
from .benchmarks import Problem
from .evaluation import BudgetExhausted, Evaluator, RunRecord, run_streams
from .genome import (
    Bundle,
    ContractViolation,
    GeneFamilyKind,
    GeneFamilySpec,
    SubGenome,
    pairwise_distances,
    random_subgenome,
)
from .operators import (
    DEFAULT_PARAMS,
    OperatorParams,
    de_offspring,
    generic_mutate_then_decode,
    native_operator,
)

log = logging.getLogger(__name__)

K = GeneFamilyKind


class ConfigurationError(ValueError):
    pass


class CreditScheme(enum.Enum):
    DIRECT = "direct"
    ELITE = "elite"
    ENSEMBLE = "ensemble"


class OperatorSet(enum.Enum):
    TYPE_NATIVE = "type_native"
    GENERIC = "generic"


ASYNC_PERIODS = {K.REAL: 1, K.INTEGER: 2, K.BOOLEAN: 4, K.CATEGORICAL: 4, K.COMPLEX: 4, K.EMBEDDING: 4}


@dataclass(frozen=True)
class GsaConfig:
    pop_size: int = 50
    credit: CreditScheme = CreditScheme.ENSEMBLE
    ensemble_size: int = 5
    assembly_mode: AssemblyMode = AssemblyMode.ACTIVE
    diversity_alpha: float = 0.7
    operators: OperatorSet = OperatorSet.TYPE_NATIVE
    periods: Mapping[GeneFamilyKind, int] | None = None  # None: synchronous
    budget: int = 5000
    params: OperatorParams = DEFAULT_PARAMS
    name: str = "GSA"

    def __post_init__(self):
        if self.pop_size < 4:
            raise ConfigurationError("pop_size must be >= 4")
        if self.ensemble_size < 1:
            raise ConfigurationError("ensemble_size must be >= 1")
        if not 0.0 < self.diversity_alpha <= 1.0:
            raise ConfigurationError("diversity_alpha must lie in (0, 1]")
        if self.periods is not None and any(p < 1 for p in self.periods.values()):
            raise ConfigurationError("update periods must be >= 1")

    def period(self, kind: GeneFamilyKind) -> int:
        if self.periods is None:
            return 1
        return int(self.periods.get(kind, 1))


_BASE = dict(credit=CreditScheme.ENSEMBLE, ensemble_size=5, operators=OperatorSet.TYPE_NATIVE,
             assembly_mode=AssemblyMode.ACTIVE, diversity_alpha=0.7, periods=None)

VARIANTS = {
    "GSA_FULL_ENSEMBLE": {},
    "GSA_DIRECT": dict(credit=CreditScheme.DIRECT),
    "GSA_ELITE_CONTEXT": dict(credit=CreditScheme.ELITE),
    "GSA_NO_DIVERSITY": dict(diversity_alpha=1.0),
    "GSA_GENERIC_OPERATORS": dict(operators=OperatorSet.GENERIC),
    "GSA_NO_ASSEMBLY": dict(assembly_mode=AssemblyMode.PASSIVE),
    "GSA_ASYNC": dict(periods=ASYNC_PERIODS),
    "GSA_ASYNC_DIRECT": dict(periods=ASYNC_PERIODS, credit=CreditScheme.DIRECT),
}


def make_variant(name: str, **overrides) -> GsaConfig:
    """Config for one of the named GSA variants; ``overrides`` (e.g. ``budget``)
    are applied on top."""
    try:
        delta = VARIANTS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown GSA variant {name!r}; valid names: {', '.join(VARIANTS)}") from None
    return GsaConfig(**{**_BASE, **delta, "name": name, **overrides})


@dataclass
class SubPopulation:
    members: list[SubGenome]
    credits: np.ndarray

    @property
    def elite_index(self) -> int:
        return int(np.argmin(self.credits))  # first minimum on ties

    @property
    def elite(self) -> SubGenome:
        return self.members[self.elite_index]


# -- credit assignment ---------------------------------------------------------

def credit_direct(bundle_fitnesses: Sequence[float], n_families: int) -> list[np.ndarray]:
    """Every participating subgenome inherits its bundle's fitness."""
    f = np.asarray(bundle_fitnesses, dtype=np.float64)
    return [f.copy() for _ in range(n_families)]


def credit_elite(k: int, candidates: Sequence[SubGenome], elites: Sequence[SubGenome],
                 evaluate) -> np.ndarray:
    """Score each candidate of family ``k`` inside the other families' elites."""
    ctx = Bundle._wrap(tuple(elites))
    return np.array([evaluate(ctx.replace(k, c)) for c in candidates])


def credit_ensemble(k: int, candidates: Sequence[SubGenome], pops: Sequence[Sequence[SubGenome]],
                    m: int, evaluate, rng: np.random.Generator) -> np.ndarray:
    """Mean fitness of each candidate over ``m`` contexts.

    Each context takes one uniformly drawn member from every other family;
    contexts are redrawn for every candidate.
    """
    n_fam = len(pops)
    out = np.empty(len(candidates))
    sizes = [len(p) for p in pops]
    for j, cand in enumerate(candidates):
        total = 0.0
        for _ in range(m):
            picks = [pops[q][rng.integers(sizes[q])] if q != k else cand for q in range(n_fam)]
            total += evaluate(Bundle._wrap(tuple(picks)))
        out[j] = total / m
    return out


# -- selection ------------------------------------------------------------------

def diversity_select(parents: SubPopulation, offspring: Sequence[SubGenome],
                     offspring_credits, alpha: float, spec: GeneFamilySpec) -> SubPopulation:
    """(mu + mu) replacement on a rank blend of credit and diversity.

    Score ``alpha*rank(credit) + (1-alpha)*rank(-mean distance to the pool)``;
    the ``mu`` lowest scores survive (ties to the lower pool index) and the
    best-credited individual always survives.  ``alpha == 1`` is plain
    truncation on credit.
    """
    n = len(parents.members)
    if len(offspring) != n:
        raise ContractViolation("need exactly one offspring per parent")
    pool = list(parents.members) + list(offspring)
    credits = np.concatenate([parents.credits, np.asarray(offspring_credits, dtype=np.float64)])
    elite = int(np.argmin(credits))
    if alpha >= 1.0:
        chosen = np.argsort(credits, kind="stable")[:n]
    else:
        spread = pairwise_distances(pool, spec).mean(axis=1)
        score = alpha * rankdata(credits) + (1.0 - alpha) * rankdata(-spread)
        chosen = np.argsort(score, kind="stable")[:n]
        if elite not in chosen:
            chosen[-1] = elite
    chosen = np.sort(chosen)
    return SubPopulation([pool[i] for i in chosen], credits[chosen])


# -- the engine -----------------------------------------------------------------

def _offspring(pop: SubPopulation, spec: GeneFamilySpec, config: GsaConfig, rng) -> list[SubGenome]:
    params = config.params
    if config.operators is OperatorSet.GENERIC:
        return [generic_mutate_then_decode(m, spec, params, rng) for m in pop.members]
    if spec.kind is K.REAL:
        return de_offspring(pop.members, pop.credits, spec, params, rng)
    op = native_operator(spec.kind)
    return [op(m, spec, params, rng) for m in pop.members]


def run_gsa(problem: Problem, config: GsaConfig, seed: int) -> RunRecord:
    """Optimize ``problem`` until ``config.budget`` evaluations are spent.

    Generation 0 evaluates ``pop_size`` index-aligned random bundles and
    credits every member directly.  Each later generation ``t`` updates the
    families whose period divides ``t``: one child per member, credit for
    the children, then :func:`diversity_select`.  Per-generation cost is
    ``pop_size`` (direct), ``pop_size * F`` (elite) or
    ``pop_size * F * (1 + M)`` (ensemble) for ``F`` updating families; with
    a single family, elite and ensemble collapse to direct.  A generation
    cut short by the budget is discarded.
    """
    specs = problem.specs
    n_fam = len(specs)
    n = config.pop_size
    if config.budget < n:
        raise ConfigurationError(f"budget {config.budget} is smaller than pop_size {n}")
    if config.operators is OperatorSet.TYPE_NATIVE:
        for s in specs:
            if s.kind is not K.REAL:
                native_operator(s.kind)
    rng, noise_rng = run_streams(seed)
    evaluate = Evaluator(problem, config.budget, noise_rng, config.assembly_mode)
    periods = [config.period(s.kind) for s in specs]

    pops: list[SubPopulation] = []
    members = [[random_subgenome(s, rng) for _ in range(n)] for s in specs]
    fitness = np.array([evaluate(Bundle._wrap(tuple(m[i] for m in members))) for i in range(n)])
    for k in range(n_fam):
        pops.append(SubPopulation(members[k], fitness.copy()))

    t = 0
    completed = 0
    updates = [0] * n_fam
    per_gen: list[int] = []
    try:
        while True:
            t += 1
            active = [k for k in range(n_fam) if t % periods[k] == 0]
            if not active:
                continue
            start = evaluate.used
            children = {k: _offspring(pops[k], specs[k], config, rng) for k in active}
            child_credit = _assign_credit(pops, children, config, evaluate, rng)
            for k in active:
                pops[k] = diversity_select(pops[k], children[k], child_credit[k],
                                           config.diversity_alpha, specs[k])
                updates[k] += 1
            completed = t
            per_gen.append(evaluate.used - start)
    except BudgetExhausted:
        pass

    return evaluate.record(config.name, seed, generations=completed,
                           family_updates=dict(zip((s.label for s in specs), updates)),
                           evals_per_generation=per_gen)


def _assign_credit(pops, children, config: GsaConfig, evaluate, rng) -> dict[int, np.ndarray]:
    n_fam = len(pops)
    n = config.pop_size
    scheme = config.credit
    if scheme is CreditScheme.DIRECT or n_fam == 1:
        bundles = [Bundle._wrap(tuple(children[k][i] if k in children else pops[k].members[i]
                                      for k in range(n_fam))) for i in range(n)]
        f = np.array([evaluate(b) for b in bundles])
        return {k: f for k in children}
    out = {}
    if scheme is CreditScheme.ELITE:
        elites = [p.elite for p in pops]
        for k, kids in children.items():
            out[k] = credit_elite(k, kids, elites, evaluate)
        return out
    members = [p.members for p in pops]
    for k, kids in children.items():
        # the assembled, index-aligned sweep; its values only feed the global elite
        for i in range(n):
            evaluate(Bundle._wrap(tuple(kids[i] if q == k else members[q][i] for q in range(n_fam))))
        out[k] = credit_ensemble(k, kids, members, config.ensemble_size, evaluate, rng)
    return out
