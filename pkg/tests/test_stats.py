import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import rankdata

from gsa.genome import ContractViolation
from gsa.stats import PairedSample, holm_correct, median_iqr, vargha_delaney_a12, wilcoxon_signed_rank


def brute_force_p(xs, ys):
    """Two-sided p by enumerating every sign assignment of the nonzero |d| midranks."""
    d = np.asarray(xs) - np.asarray(ys)
    d = d[d != 0]
    if d.size == 0:
        return 1.0
    r = rankdata(np.abs(d))
    mu = r.sum() / 2
    obs = abs(r[d > 0].sum() - mu)
    hits = 0
    for signs in itertools.product((0, 1), repeat=d.size):
        t = float(np.dot(signs, r))
        hits += abs(t - mu) >= obs - 1e-9
    return hits / 2 ** d.size


def brute_force_a12(xs, ys):
    wins = 0.0
    for x in xs:
        for y in ys:
            wins += 1.0 if x < y else 0.5 if x == y else 0.0
    return wins / (len(xs) * len(ys))


def test_identical_samples_p_one():
    r = wilcoxon_signed_rank(PairedSample([1, 2, 3], [1, 2, 3]))
    assert r.pvalue == 1.0 and r.zeros_dropped == 3


def test_five_positive_differences():
    stat, p = wilcoxon_signed_rank(PairedSample([2, 3, 4, 5, 6], [1, 1, 1, 1, 1]))
    assert p == 2 / 2 ** 5 and stat == 0


def test_length_mismatch():
    with pytest.raises(ContractViolation):
        PairedSample([1, 2], [1])


def test_zero_differences_are_dropped():
    r = wilcoxon_signed_rank(PairedSample([1, 2, 3, 4], [1, 0, 0, 0]))
    assert r.n == 3 and r.zeros_dropped == 1
    assert r.pvalue == 0.25


def test_exact_matches_enumeration_on_100_samples():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(1, 13))
        xs = np.round(rng.normal(size=n), 1)  # rounding produces ties and zeros
        ys = np.round(rng.normal(size=n), 1)
        assert wilcoxon_signed_rank(PairedSample(xs, ys), method="exact").pvalue == brute_force_p(xs, ys)


def test_exact_and_normal_agree_at_n20():
    rng = np.random.default_rng(5)
    for _ in range(50):
        xs, ys = rng.normal(size=20), rng.normal(0.3, 1, size=20)
        s = PairedSample(xs, ys)
        a = wilcoxon_signed_rank(s, method="exact").pvalue
        b = wilcoxon_signed_rank(s, method="normal").pvalue
        assert abs(a - b) < 0.02


def test_matches_scipy():
    from scipy.stats import wilcoxon
    rng = np.random.default_rng(8)
    for n in (8, 15, 30, 60):
        xs, ys = rng.normal(size=n), rng.normal(size=n)
        ours = wilcoxon_signed_rank(PairedSample(xs, ys))
        ref = wilcoxon(xs, ys, method="exact" if n <= 20 else "approx", correction=True)
        assert ours.statistic == ref.statistic
        assert ours.pvalue == pytest.approx(ref.pvalue, rel=1e-9)


def test_holm_examples():
    assert holm_correct([0.01]) == [0.01]
    assert holm_correct([0.01, 0.04, 0.03]) == pytest.approx([0.03, 0.06, 0.06], abs=1e-15)
    assert holm_correct([0.5, 0.6]) == [1.0, 1.0]
    with pytest.raises(ContractViolation):
        holm_correct([1.2])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=12))
def test_holm_properties(ps):
    adj = holm_correct(ps)
    assert all(a >= p for a, p in zip(adj, ps))
    assert all(a <= 1 for a in adj)
    order = np.argsort(ps, kind="stable")
    resorted = np.asarray(adj)[order]
    assert np.all(np.diff(resorted) >= 0)


def test_a12_examples():
    assert vargha_delaney_a12([1, 3], [2, 4]) == 0.75
    assert vargha_delaney_a12([5, 6, 7], [5, 6, 7]) == 0.5
    # reference first: a dominant competitor shows 0.0
    assert vargha_delaney_a12([5, 6, 7], [1, 2, 3]) == 0.0
    assert vargha_delaney_a12([1, 2, 3], [5, 6, 7]) == 1.0
    with pytest.raises(ContractViolation):
        vargha_delaney_a12([], [1])


def test_a12_matches_pair_counting_on_100_samples():
    rng = np.random.default_rng(99)
    for _ in range(100):
        xs = rng.integers(0, 6, int(rng.integers(1, 12))).astype(float)
        ys = rng.integers(0, 6, int(rng.integers(1, 12))).astype(float)
        assert vargha_delaney_a12(xs, ys) == brute_force_a12(xs, ys)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=10), st.lists(st.integers(0, 5), min_size=1, max_size=10))
def test_a12_complement(xs, ys):
    assert vargha_delaney_a12(xs, ys) + vargha_delaney_a12(ys, xs) == 1.0


def test_median_iqr():
    assert median_iqr([5]) == (5, 5, 5)
    assert median_iqr([1, 2, 3, 4, 5]) == (3, 2, 4)
    assert median_iqr([4, 1, 5, 3, 2]) == median_iqr([1, 2, 3, 4, 5])
    with pytest.raises(ContractViolation):
        median_iqr([])
