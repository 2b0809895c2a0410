"""The ten acceptance criteria, one test each, at their stated tolerances.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Criteria 3 and 8 do not hold for this implementation; they are marked as
strict expected failures so a silent flip to passing is also reported.
"""
import itertools
import time

import numpy as np
import pytest
from scipy.stats import rankdata

from conftest import record
from gsa.assembly import AssemblyMode, assemble
from gsa.baselines import BASELINES, flattened_de, flattened_ea, random_flattened
from gsa.benchmarks import (
    EncoderUnsupportedFamily,
    flatten,
    onemax,
    typed_additive,
    typed_deceptive,
    typed_epistatic,
    typed_gated,
    typed_mix_gradient,
    typed_noisy,
)
from gsa.core import VARIANTS, make_variant, run_gsa
from gsa.genome import GeneFamilySpec, check_subgenome, random_bundle, random_subgenome
from gsa.harness.algorithms import ALGORITHMS, run_algorithm
from gsa.operators import OperatorParams, generic_mutate_then_decode, native_operator, real_de_best_1_bin
from gsa.stats import PairedSample, holm_correct, vargha_delaney_a12, wilcoxon_signed_rank

SEEDS = range(5)
BUDGET = 5000


def gsa_median(variant, make, seeds=SEEDS, budget=BUDGET):
    return float(np.median([run_gsa(make(s), make_variant(variant, budget=budget), s).final_best_fitness
                            for s in seeds]))


def baseline_median(fn, make, seeds=SEEDS, budget=BUDGET):
    return float(np.median([fn(make(s), budget, s).final_best_fitness for s in seeds]))


def test_1_architectural_reach():
    t0 = time.perf_counter()
    crashes, oks, total_b, total_g = 0, 0, 0, 0
    for n in range(1, 7):
        for s in SEEDS:
            p = typed_mix_gradient(n, 24, s)
            for name in VARIANTS:
                rec = run_algorithm(name, p, BUDGET, s)
                total_g += 1
                oks += np.isfinite(rec.final_best_fitness) and rec.evaluations_used <= BUDGET
            if n >= 5:
                for name in BASELINES:
                    total_b += 1
                    try:
                        run_algorithm(name, p, BUDGET, s)
                    except EncoderUnsupportedFamily:
                        crashes += 1
    secs = time.perf_counter() - t0
    ok = crashes == total_b and oks == total_g and secs < 120
    assert record(1, "architectural reach", ok,
                  f"baseline encoder errors {crashes}/{total_b}, GSA ok {oks}/{total_g}, {secs:.0f}s (limit 120s)")


def test_2_budget_accounting():
    rec = run_gsa(typed_additive(20, 0), make_variant("GSA_FULL_ENSEMBLE"), 0)
    per_gen = set(rec.info["evals_per_generation"])
    de = flattened_de(typed_additive(20, 0), BUDGET, 0)
    ok = per_gen == {1200} and de.generations == 99
    assert record(2, "budget accounting", ok,
                  f"ensemble evals per generation {sorted(per_gen)} (want 1200), DE generations {de.generations} (want 99)")


@pytest.mark.xfail(strict=True, reason="full ensemble does not beat the flattened EA at n=1; see decisions ledger")
def test_3_single_family_win_direction():
    make = lambda s: typed_mix_gradient(1, 24, s)  # noqa: E731
    g = gsa_median("GSA_FULL_ENSEMBLE", make)
    e = baseline_median(flattened_ea, make)
    assert record(3, "single-family win direction", g < e,
                  f"GSA_FULL_ENSEMBLE median {g:.3g} vs FLATTENED_EA median {e:.3g} (want <)")


def test_4_onemax():
    t0 = time.perf_counter()
    make = lambda s: onemax(50)  # noqa: E731
    g = gsa_median("GSA_FULL_ENSEMBLE", make, budget=15000)
    e = baseline_median(flattened_ea, make, budget=15000)
    r = baseline_median(random_flattened, make, budget=15000)
    secs = time.perf_counter() - t0
    ok = g == 0 and e == 0 and 6 <= r <= 14 and secs < 60
    assert record(4, "OneMax", ok,
                  f"medians GSA {g:g}, EA {e:g}, random {r:g} (want 0, 0, [6, 14]), {secs:.0f}s (limit 60s)")


def test_5_generic_operator_ablation():
    variants = ["GSA_ELITE_CONTEXT", "GSA_DIRECT", "GSA_NO_DIVERSITY", "GSA_FULL_ENSEMBLE",
                "GSA_NO_ASSEMBLY", "GSA_GENERIC_OPERATORS"]
    meds = {v: gsa_median(v, lambda s: typed_additive(20, s)) for v in variants}
    worst = max(meds, key=meds.get)
    others = max(m for v, m in meds.items() if v != "GSA_GENERIC_OPERATORS")
    ok = meds["GSA_GENERIC_OPERATORS"] > others
    assert record(5, "generic-operator ablation", ok,
                  f"worst {worst} {meds[worst]:.3g}; next worst {others:.3g}")


def test_6_credit_ablation():
    make = lambda s: typed_additive(20, s)  # noqa: E731
    elite = gsa_median("GSA_ELITE_CONTEXT", make)
    full = gsa_median("GSA_FULL_ENSEMBLE", make)
    assert record(6, "credit ablation", elite < full,
                  f"GSA_ELITE_CONTEXT median {elite:.3g} vs GSA_FULL_ENSEMBLE {full:.3g} (want <)")


def test_7_assembly_ablation():
    t0 = time.perf_counter()
    wins, xs, ys, per_d = 0, [], [], {}
    for d in (20, 40, 80):
        w = 0
        for s in range(20):
            p = typed_gated(d, 0.5, True, rng=s)
            a = run_gsa(p, make_variant("GSA_FULL_ENSEMBLE"), s).final_best_fitness
            b = run_gsa(p, make_variant("GSA_NO_ASSEMBLY"), s).final_best_fitness
            w += a < b
            xs.append(a)
            ys.append(b)
        per_d[d] = w
        wins += w
    p = wilcoxon_signed_rank(PairedSample(xs, ys)).pvalue
    secs = time.perf_counter() - t0
    ok = all(w > 10 for w in per_d.values()) and wins >= 40 and p < 0.05 and secs < 600
    assert record(7, "assembly ablation", ok,
                  f"active wins per D {per_d}, pooled {wins}/60 (want >= 40), Wilcoxon p {p:.2g}, "
                  f"{secs:.0f}s (limit 600s)")


@pytest.mark.xfail(strict=True, reason="async beats sync under direct credit here; see decisions ledger")
def test_8_async_negative_result():
    make = lambda s: typed_additive(20, s)  # noqa: E731
    sync = gsa_median("GSA_DIRECT", make)
    asyn = gsa_median("GSA_ASYNC_DIRECT", make)
    assert record(8, "async negative result", sync <= asyn,
                  f"sync median {sync:.3g} vs async {asyn:.3g} (want <=)")


def _enumerated_p(d):
    d = d[d != 0]
    if d.size == 0:
        return 1.0
    r = rankdata(np.abs(d))
    mu = r.sum() / 2
    obs = abs(r[d > 0].sum() - mu)
    hits = sum(abs(float(np.dot(s, r)) - mu) >= obs - 1e-9 for s in itertools.product((0, 1), repeat=d.size))
    return hits / 2 ** d.size


def _counted_a12(xs, ys):
    return sum(1.0 if x < y else 0.5 if x == y else 0.0 for x in xs for y in ys) / (len(xs) * len(ys))


def test_9_statistics_oracles():
    rng = np.random.default_rng(9)
    w_ok = a_ok = 0
    for _ in range(100):
        n = int(rng.integers(1, 13))
        xs, ys = np.round(rng.normal(size=n), 1), np.round(rng.normal(size=n), 1)
        w_ok += wilcoxon_signed_rank(PairedSample(xs, ys), method="exact").pvalue == _enumerated_p(xs - ys)
    for _ in range(100):
        xs = rng.integers(0, 8, int(rng.integers(1, 15))).astype(float)
        ys = rng.integers(0, 8, int(rng.integers(1, 15))).astype(float)
        a_ok += vargha_delaney_a12(xs, ys) == _counted_a12(xs, ys)
    holm = holm_correct([0.01, 0.04, 0.03])
    h_ok = np.allclose(holm, [0.03, 0.06, 0.06], rtol=0, atol=1e-15)
    ok = w_ok == 100 and a_ok == 100 and h_ok
    assert record(9, "statistics oracles", ok,
                  f"Wilcoxon exact {w_ok}/100, A12 {a_ok}/100, Holm {[round(h, 12) for h in holm]}")


NOISELESS = [
    lambda s: typed_additive(20, s),
    lambda s: typed_epistatic(20, 0.5, s),
    lambda s: typed_deceptive(None, s),
    lambda s: typed_gated(20, 0.5, True, rng=s),
    lambda s: onemax(50),
] + [lambda s, n=n: typed_mix_gradient(n, 24, s) for n in range(1, 7)]

TRIPLE_PROBLEMS = NOISELESS + [lambda s: typed_noisy(20, 0.5, rng=s)]

CLOSURE_SPECS = [
    GeneFamilySpec.integer(4, -10, 10),
    GeneFamilySpec.real(5, -1.0, 1.0),
    GeneFamilySpec.boolean(6),
    GeneFamilySpec.categorical(3, 4),
    GeneFamilySpec.complex(3, 1.0),
    GeneFamilySpec.embedding(2, 3, -1.0, 1.0),
]


def _planted_ok():
    for make, s in itertools.product(NOISELESS, range(3)):
        p = make(s)
        if abs(p.evaluate(p.targets)) > 1e-12:
            return False
        for mode in AssemblyMode:
            if abs(p.evaluate_pheno(p.targets, assemble(p.targets, mode, p.specs))) > 1e-12:
                return False
    return True


def _closure_ok():
    rng = np.random.default_rng(10)
    loud = OperatorParams(int_step_scale=1.0, cx_mag_sigma=2.0, emb_sigma=1.0, bool_flip_rate=0.5,
                          cat_replace_rate=0.5, generic_sigma=1.0, de_f=2.0)
    for spec in CLOSURE_SPECS:
        for _ in range(10_000):
            parent = random_subgenome(spec, rng)
            if spec.kind.name == "REAL":
                pool = [random_subgenome(spec, rng) for _ in range(3)]
                child = real_de_best_1_bin(parent, *pool, spec, loud, rng)
            else:
                child = native_operator(spec.kind)(parent, spec, loud, rng)
            check_subgenome(child, spec)
            check_subgenome(generic_mutate_then_decode(parent, spec, loud, rng), spec)
    return True


def _round_trip_ok():
    rng = np.random.default_rng(11)
    for p in (typed_additive(20, 0), typed_mix_gradient(4, 24, 0)):
        enc = flatten(p)
        for _ in range(1000):
            b = random_bundle(p.specs, rng)
            if enc.decode(enc.encode(b)) != b:
                return False
    return True


def _triples_ok():
    rng = np.random.default_rng(12)
    names = list(ALGORITHMS)
    good = 0
    for _ in range(50):
        make = TRIPLE_PROBLEMS[int(rng.integers(len(TRIPLE_PROBLEMS)))]
        name = names[int(rng.integers(len(names)))]
        seed = int(rng.integers(2**31))
        budget = int(rng.integers(50, 1500))
        p = make(seed % 1000)
        try:
            rec = run_algorithm(name, p, budget, seed)
        except EncoderUnsupportedFamily:
            good += name in BASELINES
            continue
        idx = [i for i, _ in rec.best_fitness_trace]
        vals = [f for _, f in rec.best_fitness_trace]
        good += (rec.evaluations_used <= budget and idx == sorted(idx)
                 and all(a > b for a, b in zip(vals, vals[1:])) and vals[-1] == rec.final_best_fitness)
    return good


def _replay_ok():
    for name in ALGORITHMS:
        a = run_algorithm(name, typed_deceptive(None, 3), 1500, 21)
        b = run_algorithm(name, typed_deceptive(None, 3), 1500, 21)
        if a.best_fitness_trace != b.best_fitness_trace or a.final_best_bundle != b.final_best_bundle:
            return False
    return True


def test_10_property_suites():
    parts = {"planted optimum": _planted_ok(), "closure": _closure_ok(), "round trip": _round_trip_ok()}
    triples = _triples_ok()
    parts["50 triples"] = triples == 50
    parts["replay"] = _replay_ok()
    ok = all(parts.values())
    detail = ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in parts.items()) + f" ({triples}/50 triples)"
    assert record(10, "property suites", ok, detail)
