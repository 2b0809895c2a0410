"""Nonparametric summaries for comparing algorithms across seeds."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import norm, rankdata

from .genome import ContractViolation

EXACT_MAX_N = 20


@dataclass(frozen=True)
class PairedSample:
    """Two equal-length samples, paired by seed within a cell."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __init__(self, xs: Sequence[float], ys: Sequence[float]):
        xs, ys = tuple(float(v) for v in xs), tuple(float(v) for v in ys)
        if len(xs) != len(ys):
            raise ContractViolation(f"paired samples differ in length: {len(xs)} vs {len(ys)}")
        if not xs:
            raise ContractViolation("paired sample is empty")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __len__(self) -> int:
        return len(self.xs)

    def differences(self) -> np.ndarray:
        return np.asarray(self.xs) - np.asarray(self.ys)


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float  # min(W+, W-)
    pvalue: float
    n: int  # nonzero differences used
    zeros_dropped: int
    method: str  # "exact", "normal" or "degenerate"

    def __iter__(self):
        return iter((self.statistic, self.pvalue))


def _exact_upper_tail(ranks2: np.ndarray, t2: int) -> float:
    """P(T+ >= t2) under the symmetric sign null, on doubled (integer) ranks."""
    total = int(ranks2.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in ranks2:  # every doubled rank is >= 2
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[:-r]
        counts += shifted
    counts /= counts.sum()
    return float(counts[t2:].sum())


def wilcoxon_signed_rank(sample: PairedSample | tuple, method: str = "auto") -> WilcoxonResult:
    """Two-sided paired Wilcoxon signed-rank test.

    Zero differences are dropped.  ``method="auto"`` enumerates the exact
    null distribution (midranks for ties) when at most 20 differences
    remain, and otherwise uses the normal approximation with tie and
    continuity corrections.
    """
    if not isinstance(sample, PairedSample):
        sample = PairedSample(*sample)
    d = sample.differences()
    nz = d[d != 0]
    zeros = int(d.size - nz.size)
    n = int(nz.size)
    if n == 0:
        return WilcoxonResult(0.0, 1.0, 0, zeros, "degenerate")
    if method == "auto":
        method = "exact" if n <= EXACT_MAX_N else "normal"
    if method not in ("exact", "normal"):
        raise ValueError(f"unknown method {method!r}")

    ranks = rankdata(np.abs(nz))
    w_plus = float(ranks[nz > 0].sum())
    total = float(ranks.sum())
    w = min(w_plus, total - w_plus)

    if method == "exact":
        ranks2 = np.rint(2 * ranks).astype(np.int64)  # midranks are multiples of 1/2
        hi = int(round(2 * (total - w)))
        p = 2.0 * _exact_upper_tail(ranks2, hi)
    else:
        mean = n * (n + 1) / 4.0
        _, tie_counts = np.unique(ranks, return_counts=True)
        var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(tie_counts ** 3 - tie_counts) / 48.0
        if var <= 0:
            return WilcoxonResult(w, 1.0, n, zeros, method)
        z = (abs(w_plus - mean) - 0.5) / np.sqrt(var)
        p = 2.0 * float(norm.sf(max(z, 0.0)))
    return WilcoxonResult(w, min(1.0, p), n, zeros, method)


def holm_correct(pvalues: Sequence[float]) -> list[float]:
    """Holm step-down adjusted p-values, in the input order."""
    p = np.asarray(pvalues, dtype=np.float64)
    if p.size == 0:
        return []
    if np.any((p < 0) | (p > 1)):
        raise ContractViolation("p-values must lie in [0, 1]")
    m = p.size
    order = np.argsort(p, kind="stable")
    adj = np.maximum.accumulate(p[order] * (m - np.arange(m)))
    out = np.empty(m)
    out[order] = np.minimum(adj, 1.0)
    return out.tolist()


def vargha_delaney_a12(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Probability that an ``xs`` value is smaller than a ``ys`` value
    (ties count half).  Under minimization, above 0.5 favours ``xs``;
    with ``xs`` the reference, a dominant competitor shows 0.0."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.size == 0 or y.size == 0:
        raise ContractViolation("A12 needs two non-empty samples")
    less = np.sum(x[:, None] < y[None, :])
    ties = np.sum(x[:, None] == y[None, :])
    return float((less + 0.5 * ties) / (x.size * y.size))


def median_iqr(values: Sequence[float]) -> tuple[float, float, float]:
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ContractViolation("median of an empty sample")
    q1, med, q3 = np.quantile(v, [0.25, 0.5, 0.75])
    return float(med), float(q1), float(q3)
