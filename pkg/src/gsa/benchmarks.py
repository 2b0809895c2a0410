"""Synthetic typed benchmarks with planted optima at f = 0, and the
flattened encoding used by every flat baseline.

Every problem exposes ``evaluate(bundle)`` (assembly-agnostic) and
``evaluate_pheno(bundle, phenotype)``; only :func:`typed_gated` reads the
phenotype, the others ignore it.  Both return the noise-free value; noisy
problems add observation noise through :meth:`Problem.observe`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .assembly import Phenotype
from .genome import (
    Bundle,
    ContractViolation,
    GeneFamilyKind,
    GeneFamilySpec,
    SubGenome,
    distance_fn,
)

K = GeneFamilyKind

REAL_BOUNDS = (-1.0, 1.0)
INT_BOUNDS = (-10, 10)
ADDITIVE_CATEGORIES = 4
DECEPTIVE_CATEGORIES = 3
COMPLEX_CAP = 1.0
RASTRIGIN_A = 10.0


class EncoderUnsupportedFamily(Exception):
    """The flattened encoder cannot represent a gene family of this kind."""

    def __init__(self, kind: GeneFamilyKind):
        self.kind = kind
        super().__init__(f"flattened encoder cannot represent {kind.name} gene families")


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "gaussian"  # or "student_t"
    scale: float = 0.1
    df: float = 3.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "student_t"):
            raise ContractViolation(f"unknown noise model {self.kind!r}")
        if self.scale < 0:
            raise ContractViolation("noise scale must be non-negative")

    def draw(self, rng: np.random.Generator, size=None):
        if self.kind == "gaussian":
            return rng.normal(0.0, 1.0, size) * self.scale
        return rng.standard_t(self.df, size) * self.scale


@dataclass(eq=False)
class Problem:
    name: str
    specs: tuple[GeneFamilySpec, ...]
    targets: Bundle
    fn: Callable[[Bundle], float]
    pheno_fn: Callable[[Bundle, Phenotype], float] | None = None
    noise: NoiseModel | None = None
    rho: float | None = None
    params: dict = field(default_factory=dict)

    @property
    def assembly_aware(self) -> bool:
        return self.pheno_fn is not None

    @property
    def kinds(self) -> tuple[GeneFamilyKind, ...]:
        return tuple(s.kind for s in self.specs)

    @property
    def dims_label(self) -> str:
        return ";".join(f"{s.label}={s.size}" for s in self.specs)

    def evaluate(self, bundle: Bundle) -> float:
        return self.fn(bundle)

    def evaluate_pheno(self, bundle: Bundle, phenotype: Phenotype) -> float:
        if self.pheno_fn is None:
            return self.fn(bundle)
        return self.pheno_fn(bundle, phenotype)

    def observe(self, value: float, rng: np.random.Generator) -> float:
        """Observed fitness for a true ``value``: adds one noise draw, if any."""
        if self.noise is None or self.noise.scale == 0:
            return value
        return value + float(self.noise.draw(rng))


# -- helpers ----------------------------------------------------------------

def split_dims(total: int, n: int) -> list[int]:
    """Split ``total`` as evenly as possible, remainder to the earliest parts."""
    if n < 1 or total < n:
        raise ContractViolation(f"cannot split {total} coordinates over {n} families")
    q, r = divmod(total, n)
    return [q + (i < r) for i in range(n)]


def _resolve_dims(dims, labels: Sequence[str]) -> list[int]:
    if isinstance(dims, Mapping):
        out = [int(dims[lab]) for lab in labels]
    elif isinstance(dims, (int, np.integer)):
        out = split_dims(int(dims), len(labels))
    else:
        out = [int(d) for d in dims]
        if len(out) != len(labels):
            raise ContractViolation(f"expected {len(labels)} family dims, got {len(out)}")
    if any(d < 1 for d in out):
        raise ContractViolation("every family needs dim >= 1")
    return out


def _sg(kind, values) -> SubGenome:
    return SubGenome(kind, values)


def _sum_distances(specs):
    fns = [distance_fn(s) for s in specs]

    def total(parts, targets) -> float:
        out = 0.0
        for f, p, t in zip(fns, parts, targets):
            out += f(p.values, t.values)
        return out
    return total


def _additive_parts(dims, rng):
    """Specs and planted targets shared by the additive and epistatic problems.

    target_B is all-True, target_Z the zero vector, target_C category 0;
    only target_R is drawn from ``rng``.
    """
    d_r, d_b, d_z, d_c = _resolve_dims(dims, ("R", "B", "Z", "C"))
    specs = (
        GeneFamilySpec.real(d_r, *REAL_BOUNDS),
        GeneFamilySpec.boolean(d_b),
        GeneFamilySpec.integer(d_z, *INT_BOUNDS),
        GeneFamilySpec.categorical(d_c, ADDITIVE_CATEGORIES),
    )
    targets = Bundle((
        _sg(K.REAL, rng.uniform(*REAL_BOUNDS, d_r)),
        _sg(K.BOOLEAN, np.ones(d_b, dtype=bool)),
        _sg(K.INTEGER, np.zeros(d_z, dtype=np.int64)),
        _sg(K.CATEGORICAL, np.zeros(d_c, dtype=np.int64)),
    ))
    return specs, targets


# -- problems -----------------------------------------------------------------

def typed_additive(dims=20, rng=None) -> Problem:
    """Sum of per-family distances to the planted target; separable."""
    rng = np.random.default_rng(rng)
    specs, targets = _additive_parts(dims, rng)
    dist = _sum_distances(specs)
    tparts = targets.parts

    def f(bundle):
        return dist(bundle.parts, tparts)

    return Problem("typed_additive", specs, targets, f)


def typed_epistatic(dims=20, rho=0.5, rng=None) -> Problem:
    """Additive penalty mixed with a cross-type interaction term.

    In the interaction term the Boolean vector gates which Real coordinates
    are penalized, ``Z[0] mod dim_R`` cyclically rotates the Real target and
    ``C[0]`` shifts it by ``0.25 * range * C[0] / K``.
    """
    if not 0.0 <= rho <= 1.0:
        raise ContractViolation(f"rho must lie in [0, 1], got {rho}")
    rng = np.random.default_rng(rng)
    specs, targets = _additive_parts(dims, rng)
    dist = _sum_distances(specs)
    tparts = targets.parts
    s_r, _, _, s_c = specs
    t_r, t_b = tparts[0].values, tparts[1].values
    width = float(s_r.high[0] - s_r.low[0])
    delta = 0.25 * width
    n_cat = int(s_c.n_categories[0])
    d_r = s_r.dim

    def interaction(parts) -> float:
        r, b, z, c = (p.values for p in parts)
        target = np.roll(t_r, int(z[0]) % d_r) + delta * c[0] / n_cat
        gate = b if b.shape[0] == d_r else np.resize(b, d_r)
        e = (r - target) / width
        return float(np.sum(e * e, where=gate) / d_r + np.mean(b != t_b))

    def f(bundle):
        parts = bundle.parts
        out = 0.0
        if rho < 1.0:
            out += (1.0 - rho) * dist(parts, tparts)
        if rho > 0.0:
            out += rho * interaction(parts)
        return out

    p = Problem("typed_epistatic", specs, targets, f, rho=rho)
    p.params["interaction"] = interaction
    return p


def trap_block(u: int) -> float:
    """Deceptive 4-bit trap (minimization); ``u`` counts bits matching the plant.

    0 at ``u == 4``; otherwise ``0.2 + 0.6*u/3``, so the all-wrong block is
    a local optimum that pulls away from the planted one.
    """
    return 0.0 if u == 4 else 0.2 + 0.6 * u / 3.0


def _rastrigin(x, s):
    y = x - s
    return RASTRIGIN_A * y.shape[-1] + np.sum(y * y - RASTRIGIN_A * np.cos(2 * np.pi * y), axis=-1)


def typed_deceptive(dims=None, rng=None) -> Problem:
    """Boolean 4-bit traps + categorical choice of a shifted-Rastrigin Real landscape.

    ``C[0]`` picks one of three Real landscapes; only the planted category's
    landscape reaches 0, the others carry an extra offset of 0.5.  Each
    Rastrigin is normalized by its value at the box corner farthest from
    its shift.
    """
    rng = np.random.default_rng(rng)
    if dims is None:
        dims = {"R": 8, "B": 8, "C": 1}
    elif isinstance(dims, (int, np.integer)):
        d_b = 4 * max(1, int(dims) // 8)
        dims = {"R": max(1, int(dims) - d_b - 1), "B": d_b, "C": 1}
    d_r, d_b, d_c = _resolve_dims(dims, ("R", "B", "C"))
    if d_b % 4:
        raise ContractViolation(f"Boolean dim must be divisible by 4 for trap blocks, got {d_b}")
    lo, hi = REAL_BOUNDS
    specs = (
        GeneFamilySpec.real(d_r, lo, hi),
        GeneFamilySpec.boolean(d_b),
        GeneFamilySpec.categorical(d_c, DECEPTIVE_CATEGORIES),
    )
    mid, half = (lo + hi) / 2, (hi - lo) / 4
    shifts = rng.uniform(mid - half, mid + half, (DECEPTIVE_CATEGORIES, d_r))
    corner = np.where(shifts - lo > hi - shifts, lo, hi)
    norms = _rastrigin(corner, shifts)
    planted = int(rng.integers(DECEPTIVE_CATEGORIES))
    t_b = rng.random(d_b) < 0.5
    t_c = rng.integers(0, DECEPTIVE_CATEGORIES, d_c)
    t_c[0] = planted
    targets = Bundle((
        _sg(K.REAL, shifts[planted]),
        _sg(K.BOOLEAN, t_b),
        _sg(K.CATEGORICAL, t_c),
    ))
    trap_table = np.array([trap_block(u) for u in range(5)])
    n_blocks = d_b // 4

    def f(bundle):
        r, b, c = (p.values for p in bundle.parts)
        u = np.sum((b == t_b).reshape(n_blocks, 4), axis=1)
        trap = float(np.mean(trap_table[u]))
        cat = int(c[0])
        real = float(_rastrigin(r, shifts[cat]) / norms[cat]) + (0.0 if cat == planted else 0.5)
        rest = float(np.mean(c[1:] != t_c[1:])) if d_c > 1 else 0.0
        return trap + real + rest

    p = Problem("typed_deceptive", specs, targets, f)
    p.params.update(shifts=shifts, planted_category=planted, rastrigin_norms=norms)
    return p


def typed_noisy(dims=20, rho=0.5, noise: NoiseModel | None = None, rng=None) -> Problem:
    """Typed epistatic with additive observation noise (Gaussian σ=0.1 default)."""
    base = typed_epistatic(dims, rho, rng)
    base.name = "typed_noisy"
    base.noise = noise if noise is not None else NoiseModel()
    return base


MIX_ORDER = (K.REAL, K.BOOLEAN, K.INTEGER, K.CATEGORICAL, K.COMPLEX, K.EMBEDDING)


def typed_mix_gradient(n_families=6, total_dim=24, rng=None) -> Problem:
    """Additive distances over the first ``n_families`` of R, B, Z, C, Cx, E.

    The Embedding share ``m`` is laid out as 2 vectors of ``m // 2``
    coordinates (one vector when ``m == 1``).
    """
    if not 1 <= n_families <= 6:
        raise ContractViolation(f"n_families must lie in 1..6, got {n_families}")
    rng = np.random.default_rng(rng)
    shares = split_dims(total_dim, n_families)
    specs, targets = [], []
    for kind, d in zip(MIX_ORDER, shares):
        if kind is K.REAL:
            s = GeneFamilySpec.real(d, *REAL_BOUNDS)
            t = rng.uniform(*REAL_BOUNDS, d)
        elif kind is K.BOOLEAN:
            s, t = GeneFamilySpec.boolean(d), np.ones(d, dtype=bool)
        elif kind is K.INTEGER:
            s, t = GeneFamilySpec.integer(d, *INT_BOUNDS), np.zeros(d, dtype=np.int64)
        elif kind is K.CATEGORICAL:
            s, t = GeneFamilySpec.categorical(d, ADDITIVE_CATEGORIES), np.zeros(d, dtype=np.int64)
        elif kind is K.COMPLEX:
            s = GeneFamilySpec.complex(d, COMPLEX_CAP)
            t = COMPLEX_CAP * np.sqrt(rng.random(d)) * np.exp(1j * rng.uniform(-np.pi, np.pi, d))
        else:
            n_vec, width = (1, 1) if d == 1 else (2, d // 2)
            s = GeneFamilySpec.embedding(n_vec, width, *REAL_BOUNDS)
            t = rng.uniform(*REAL_BOUNDS, (n_vec, width))
        specs.append(s)
        targets.append(_sg(kind, t))
    specs = tuple(specs)
    targets = Bundle(targets)
    dist = _sum_distances(specs)
    tparts = targets.parts

    def f(bundle):
        return dist(bundle.parts, tparts)

    p = Problem("typed_mix_gradient", specs, targets, f)
    p.params["n_families"] = n_families
    return p


def typed_gated(dim=20, active_fraction=0.5, include_cx=True, cx_dim=2, rng=None) -> Problem:
    """Benchmark whose optimum needs Boolean gating of the Real vector.

    Fitness = Hamming(B, target_B)/dim
            + mean squared (range-normalized) error of R_effective at active positions
            + mean squared (range-normalized) R_effective at inactive positions
            + Complex distance to its target (when ``include_cx``).
    The assembly-agnostic path uses the raw Real vector as R_effective.
    """
    if not 0.0 < active_fraction < 1.0:
        raise ContractViolation("active_fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(rng)
    lo, hi = REAL_BOUNDS
    width = hi - lo
    n_active = int(round(active_fraction * dim))
    t_b = np.zeros(dim, dtype=bool)
    t_b[:n_active] = True
    rng.shuffle(t_b)
    t_r = np.where(t_b, rng.uniform(lo, hi, dim), 0.0)
    specs = [GeneFamilySpec.real(dim, lo, hi), GeneFamilySpec.boolean(dim)]
    targets = [_sg(K.REAL, t_r), _sg(K.BOOLEAN, t_b)]
    if include_cx:
        cx = GeneFamilySpec.complex(cx_dim, COMPLEX_CAP)
        specs.append(cx)
        targets.append(_sg(K.COMPLEX, COMPLEX_CAP * np.sqrt(rng.random(cx_dim))
                           * np.exp(1j * rng.uniform(-np.pi, np.pi, cx_dim))))
    specs = tuple(specs)
    targets = Bundle(targets)
    inactive = ~t_b
    has_active, has_inactive = bool(t_b.any()), bool(inactive.any())
    t_cx = targets.parts[2].values if include_cx else None
    cx_dist = distance_fn(specs[2]) if include_cx else None

    def score(bundle, r_eff) -> float:
        parts = bundle.parts
        e = (r_eff - t_r) / width
        sq = e * e
        out = float(np.mean(parts[1].values != t_b))
        if has_active:
            out += float(np.mean(sq[t_b]))
        if has_inactive:
            out += float(np.mean(sq[inactive]))  # target is 0 there
        if include_cx:
            out += cx_dist(parts[2].values, t_cx)
        return out

    def f(bundle):
        return score(bundle, bundle.parts[0].values)

    def f_pheno(bundle, phenotype):
        return score(bundle, phenotype.r_effective)

    p = Problem("typed_gated", specs, targets, f, pheno_fn=f_pheno)
    p.params.update(active_fraction=active_fraction, include_cx=include_cx)
    return p


def onemax(n=50) -> Problem:
    """Boolean-only; f = number of zero bits (the all-ones vector scores 0)."""
    if n < 1:
        raise ContractViolation("onemax needs n >= 1")
    specs = (GeneFamilySpec.boolean(n),)
    targets = Bundle((_sg(K.BOOLEAN, np.ones(n, dtype=bool)),))

    def f(bundle):
        return float(n - np.count_nonzero(bundle.parts[0].values))

    return Problem("onemax", specs, targets, f)


# -- flattened encoding ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FlattenedEncoding:
    """Real-vector view of a problem over {R, Z, B, C} families.

    Slots: Real direct; Integer one real per coordinate (round and clamp);
    Boolean one real in [0, 1] per bit (``>= 0.5`` is True); Categorical one
    real in [0, 1] per coordinate (``floor(x*K)`` clamped).
    """

    specs: tuple[GeneFamilySpec, ...]
    lower: np.ndarray
    upper: np.ndarray
    slices: tuple[slice, ...]

    @property
    def size(self) -> int:
        return self.lower.shape[0]

    def slot_kinds(self) -> np.ndarray:
        """Per-slot family kind, for slot-aware operators."""
        out = np.empty(self.size, dtype=object)
        for s, sl in zip(self.specs, self.slices):
            out[sl] = s.kind
        return out

    def decode(self, x: np.ndarray) -> Bundle:
        parts = []
        for s, sl in zip(self.specs, self.slices):
            v = x[sl]
            kind = s.kind
            if kind is K.REAL:
                val = np.clip(v, s.low, s.high)
            elif kind is K.INTEGER:
                val = np.clip(np.rint(v), s.low, s.high).astype(np.int64)
            elif kind is K.BOOLEAN:
                val = v >= 0.5
            else:
                val = np.clip(np.floor(v * s.n_categories), 0, s.n_categories - 1).astype(np.int64)
            parts.append(SubGenome._wrap(kind, val))
        return Bundle._wrap(tuple(parts))

    def encode(self, bundle: Bundle) -> np.ndarray:
        x = np.empty(self.size)
        for s, sl, p in zip(self.specs, self.slices, bundle.parts):
            kind = s.kind
            if kind is K.CATEGORICAL:
                x[sl] = (p.values + 0.5) / s.n_categories
            else:
                x[sl] = p.values.astype(np.float64)
        return x


def flatten(problem: Problem) -> FlattenedEncoding:
    """Build the flat encoding; raises :class:`EncoderUnsupportedFamily`
    for Complex or Embedding families before anything is evaluated."""
    lower, upper, slices = [], [], []
    pos = 0
    for s in problem.specs:
        kind = s.kind
        if kind in (K.COMPLEX, K.EMBEDDING):
            raise EncoderUnsupportedFamily(kind)
        if kind is K.REAL:
            lo, hi = s.low, s.high
        elif kind is K.INTEGER:
            lo, hi = s.low - 0.5, s.high + 0.5
        else:
            lo, hi = np.zeros(s.dim), np.ones(s.dim)
        lower.append(np.asarray(lo, dtype=np.float64))
        upper.append(np.asarray(hi, dtype=np.float64))
        slices.append(slice(pos, pos + s.dim))
        pos += s.dim
    return FlattenedEncoding(tuple(problem.specs), np.concatenate(lower), np.concatenate(upper), tuple(slices))


# -- registry -------------------------------------------------------------------

def _build_additive(dim, rng, **kw):
    return typed_additive(kw.get("dims", dim), rng)


def _build_epistatic(dim, rng, rho=0.5, **kw):
    return typed_epistatic(kw.get("dims", dim), rho, rng)


def _build_deceptive(dim, rng, **kw):
    return typed_deceptive(kw.get("dims", dim), rng)


def _build_noisy(dim, rng, rho=0.5, noise="gaussian", noise_scale=0.1, **kw):
    return typed_noisy(kw.get("dims", dim), rho, NoiseModel(noise, noise_scale), rng)


def _build_mix(dim, rng, n_families=6, **kw):
    return typed_mix_gradient(n_families, dim, rng)


def _build_gated(dim, rng, active_fraction=0.5, include_cx=True, cx_dim=2, **kw):
    return typed_gated(dim, active_fraction, include_cx, cx_dim, rng)


def _build_onemax(dim, rng, **kw):
    return onemax(dim)


BENCHMARKS: dict[str, Callable[..., Problem]] = {
    "typed_additive": _build_additive,
    "typed_epistatic": _build_epistatic,
    "typed_deceptive": _build_deceptive,
    "typed_noisy": _build_noisy,
    "typed_mix_gradient": _build_mix,
    "typed_gated": _build_gated,
    "onemax": _build_onemax,
}


def build_problem(name: str, dim, seed, **params) -> Problem:
    """Construct a registered benchmark; ``seed`` fixes its planted targets."""
    try:
        builder = BENCHMARKS[name]
    except KeyError:
        raise ContractViolation(
            f"unknown benchmark {name!r}; valid: {', '.join(sorted(BENCHMARKS))}") from None
    return builder(dim, np.random.default_rng(seed), **params)
