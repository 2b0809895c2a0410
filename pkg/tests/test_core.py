import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gsa.assembly import AssemblyMode, assemble
from gsa.benchmarks import onemax, typed_additive, typed_deceptive, typed_gated, typed_mix_gradient
from gsa.core import (
    ConfigurationError,
    CreditScheme,
    GsaConfig,
    OperatorSet,
    SubPopulation,
    VARIANTS,
    credit_direct,
    credit_elite,
    credit_ensemble,
    diversity_select,
    make_variant,
    run_gsa,
)
from gsa.genome import GeneFamilyKind as K, GeneFamilySpec, SubGenome, random_subgenome


class Counter:
    def __init__(self, fn):
        self.fn, self.calls = fn, 0

    def __call__(self, b):
        self.calls += 1
        return self.fn(b)


def test_variant_table():
    full = make_variant("GSA_FULL_ENSEMBLE")
    assert (full.credit, full.ensemble_size, full.operators, full.assembly_mode, full.diversity_alpha) == \
        (CreditScheme.ENSEMBLE, 5, OperatorSet.TYPE_NATIVE, AssemblyMode.ACTIVE, 0.7)
    na = make_variant("GSA_NO_ASSEMBLY")
    assert na.assembly_mode is AssemblyMode.PASSIVE
    assert na.credit is full.credit and na.diversity_alpha == full.diversity_alpha
    a = make_variant("GSA_ASYNC")
    assert a.credit is CreditScheme.ENSEMBLE and a.ensemble_size == 5
    assert [a.period(k) for k in (K.REAL, K.INTEGER, K.BOOLEAN, K.CATEGORICAL, K.COMPLEX, K.EMBEDDING)] == \
        [1, 2, 4, 4, 4, 4]
    assert make_variant("GSA_ASYNC_DIRECT").credit is CreditScheme.DIRECT
    assert make_variant("GSA_NO_DIVERSITY").diversity_alpha == 1.0
    assert make_variant("GSA_GENERIC_OPERATORS").operators is OperatorSet.GENERIC
    assert make_variant("GSA_ELITE_CONTEXT").credit is CreditScheme.ELITE
    assert len(VARIANTS) == 8
    with pytest.raises(ConfigurationError, match="GSA_FULL_ENSEMBLE"):
        make_variant("GSA_TYPO")


def test_config_validation():
    with pytest.raises(ConfigurationError):
        GsaConfig(diversity_alpha=0.0)
    with pytest.raises(ConfigurationError):
        GsaConfig(ensemble_size=0)
    with pytest.raises(ConfigurationError):
        run_gsa(onemax(10), GsaConfig(budget=10), 0)


def test_credit_direct_copies():
    credits = credit_direct([3, 1, 2], 3)
    assert len(credits) == 3
    for c in credits:
        np.testing.assert_array_equal(c, [3, 1, 2])
        assert SubPopulation([None] * 3, c).elite_index == 1
    assert SubPopulation([None] * 4, np.full(4, 2.5)).elite_index == 0


def test_credit_elite_cost_and_monotonicity():
    p = typed_additive(8, 0)
    rng = np.random.default_rng(0)
    elites = [random_subgenome(s, rng) for s in p.specs]
    kids = [random_subgenome(p.specs[0], rng) for _ in range(7)]
    ev = Counter(p.evaluate)
    credit = credit_elite(0, kids, elites, ev)
    assert ev.calls == 7
    # moving a Real member toward its target, contexts fixed, strictly lowers its credit
    t = p.targets[0].values
    closer = SubGenome(K.REAL, (kids[0].values + t) / 2)
    assert credit_elite(0, [closer], elites, ev)[0] < credit[0]


def test_credit_ensemble_cost_and_collapse():
    p = typed_additive(8, 1)
    rng = np.random.default_rng(1)
    pops = [[random_subgenome(s, rng) for _ in range(6)] for s in p.specs]
    kids = [random_subgenome(p.specs[2], rng) for _ in range(6)]
    ev = Counter(p.evaluate)
    credit_ensemble(2, kids, pops, 5, ev, rng)
    assert ev.calls == 30
    elites = [pop[0] for pop in pops]
    forced = credit_ensemble(2, kids, [[e] for e in elites], 1, p.evaluate, rng)
    np.testing.assert_array_equal(forced, credit_elite(2, kids, elites, p.evaluate))


def test_alpha_one_is_truncation():
    spec = GeneFamilySpec.real(3)
    rng = np.random.default_rng(0)
    parents = SubPopulation([random_subgenome(spec, rng) for _ in range(5)], rng.random(5))
    kids = [random_subgenome(spec, rng) for _ in range(5)]
    kc = rng.random(5)
    out = diversity_select(parents, kids, kc, 1.0, spec)
    pooled = np.concatenate([parents.credits, kc])
    assert sorted(out.credits) == sorted(np.sort(pooled)[:5])


def test_identical_pool_keeps_first_by_index():
    spec = GeneFamilySpec.boolean(4)
    same = SubGenome(K.BOOLEAN, [True, False, True, False])
    parents = SubPopulation([same] * 4, np.ones(4))
    out = diversity_select(parents, [same] * 4, np.ones(4), 0.7, spec)
    np.testing.assert_array_equal(out.credits, np.ones(4))
    assert all(m is same for m in out.members)
    out = diversity_select(SubPopulation([same] * 4, np.arange(4.0)), [same] * 4, np.arange(4.0) + 10, 0.7, spec)
    np.testing.assert_array_equal(out.credits, np.arange(4.0))


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 12), st.floats(0.01, 1.0), st.integers(0, 2**32 - 1))
def test_elite_always_survives(n, alpha, seed):
    spec = GeneFamilySpec.real(3)
    rng = np.random.default_rng(seed)
    parents = SubPopulation([random_subgenome(spec, rng) for _ in range(n)], rng.random(n))
    kids = [random_subgenome(spec, rng) for _ in range(n)]
    kc = rng.random(n)
    out = diversity_select(parents, kids, kc, alpha, spec)
    assert len(out.members) == n
    assert out.credits.min() == min(parents.credits.min(), kc.min())


def test_budget_equal_to_pop_size():
    p = typed_additive(8, 0)
    rec = run_gsa(p, make_variant("GSA_FULL_ENSEMBLE", budget=50), 0)
    assert rec.evaluations_used == 50 and rec.generations == 0
    assert rec.final_best_fitness == min(f for _, f in rec.best_fitness_trace)


@pytest.mark.parametrize("variant, per_gen", [
    ("GSA_FULL_ENSEMBLE", 1200),
    ("GSA_ELITE_CONTEXT", 200),
    ("GSA_DIRECT", 50),
])
def test_per_generation_accounting(variant, per_gen):
    rec = run_gsa(typed_additive(20, 0), make_variant(variant), 0)
    assert set(rec.info["evals_per_generation"]) == {per_gen}
    assert rec.generations == (5000 - 50) // per_gen
    assert rec.evaluations_used == min(5000, 50 + rec.generations * per_gen + per_gen)


@pytest.mark.parametrize("variant", ["GSA_FULL_ENSEMBLE", "GSA_ELITE_CONTEXT", "GSA_DIRECT"])
def test_single_family_collapses_to_direct(variant):
    rec = run_gsa(typed_mix_gradient(1, 24, 0), make_variant(variant), 0)
    assert set(rec.info["evals_per_generation"]) == {50}
    assert rec.generations == 99


def test_async_update_counts():
    rec = run_gsa(typed_additive(20, 0), make_variant("GSA_ASYNC_DIRECT"), 0)
    g = rec.generations
    assert rec.info["family_updates"] == {"R": g, "B": g // 4, "Z": g // 2, "C": g // 4}
    assert set(rec.info["evals_per_generation"]) == {50}


def test_async_ensemble_cost_tracks_active_families():
    rec = run_gsa(typed_additive(20, 0), make_variant("GSA_ASYNC"), 0)
    costs = rec.info["evals_per_generation"]
    # generation t updates R always, Z on even t, B and C on multiples of 4
    expected = [50 * 6 * (1 + (t % 2 == 0) + 2 * (t % 4 == 0)) for t in range(1, len(costs) + 1)]
    assert costs == expected


def test_run_on_all_six_families_and_generic():
    p = typed_mix_gradient(6, 24, 2)
    for v in ("GSA_FULL_ENSEMBLE", "GSA_GENERIC_OPERATORS", "GSA_DIRECT"):
        rec = run_gsa(p, make_variant(v, budget=1500), 2)
        assert rec.evaluations_used <= 1500
        assert np.isfinite(rec.final_best_fitness)


def test_trace_monotone_and_budget_respected():
    p = typed_gated(12, 0.5, True, rng=1)
    for v in VARIANTS:
        cfg = make_variant(v, budget=1300)
        rec = run_gsa(p, cfg, 4)
        idx = [i for i, _ in rec.best_fitness_trace]
        vals = [f for _, f in rec.best_fitness_trace]
        assert rec.evaluations_used <= 1300
        assert idx == sorted(idx) and all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] == rec.final_best_fitness
        ph = assemble(rec.final_best_bundle, cfg.assembly_mode, p.specs)
        assert rec.final_best_fitness == p.evaluate_pheno(rec.final_best_bundle, ph)


def test_replay_is_bitwise():
    p = typed_deceptive(None, 5)
    a = run_gsa(p, make_variant("GSA_FULL_ENSEMBLE", budget=2000), 77)
    b = run_gsa(typed_deceptive(None, 5), make_variant("GSA_FULL_ENSEMBLE", budget=2000), 77)
    assert a.best_fitness_trace == b.best_fitness_trace
    assert a.final_best_bundle == b.final_best_bundle
    c = run_gsa(p, make_variant("GSA_FULL_ENSEMBLE", budget=2000), 78)
    assert c.best_fitness_trace != a.best_fitness_trace


def test_noisy_run_reports_true_fitness():
    from gsa.benchmarks import typed_noisy
    p = typed_noisy(20, 0.5, rng=3)
    rec = run_gsa(p, make_variant("GSA_DIRECT", budget=1000), 3)
    assert rec.final_best_fitness == p.evaluate(rec.final_best_bundle)
