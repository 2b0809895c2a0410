"""Type-native variation operators, one per gene family, plus the generic
Gaussian-mutate-then-decode operator used by the generic-operator ablation.

All operators are pure functions of their inputs and the supplied
``numpy.random.Generator``; parents are never modified.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .genome import ContractViolation, GeneFamilyKind, GeneFamilySpec, SubGenome

log = logging.getLogger(__name__)

K = GeneFamilyKind


@dataclass(frozen=True)
class OperatorParams:
    """Rates and step sizes for the typed operators.

    ``bool_flip_rate`` and ``cat_replace_rate`` default to ``1/dim`` of the
    family being mutated.  Sigmas given as a fraction are scaled by the
    family's range (``int_step_scale``, ``emb_sigma`` for drift,
    ``generic_sigma``) or magnitude cap (``cx_mag_sigma``).
    """

    de_f: float = 0.5
    de_cr: float = 0.9
    int_step_scale: float = 0.1
    bool_flip_rate: float | None = None
    cat_replace_rate: float | None = None
    cx_mag_sigma: float = 0.1
    cx_phase_sigma: float = 0.2
    emb_sigma: float = 0.05
    generic_sigma: float = 0.1

    def __post_init__(self):
        for name in ("de_cr", "bool_flip_rate", "cat_replace_rate"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ContractViolation(f"{name} must lie in [0, 1], got {v}")
        for name in ("int_step_scale", "cx_mag_sigma", "cx_phase_sigma", "emb_sigma", "generic_sigma"):
            if getattr(self, name) < 0:
                raise ContractViolation(f"{name} must be non-negative")


DEFAULT_PARAMS = OperatorParams()


def _need(sg: SubGenome, kind: GeneFamilyKind):
    if sg.kind is not kind:
        raise ContractViolation(f"expected a {kind.name} subgenome, got {sg.kind.name}")


def real_de_best_1_bin(target, best, r1, r2, spec: GeneFamilySpec,
                       params: OperatorParams = DEFAULT_PARAMS, rng=None) -> SubGenome:
    """DE/best/1/bin: ``best + F*(r1 - r2)`` crossed with ``target``, clamped."""
    for sg in (target, best, r1, r2):
        _need(sg, K.REAL)
    t = target.values
    mutant = best.values + params.de_f * (r1.values - r2.values)
    mask = rng.random(t.shape[0]) < params.de_cr
    mask[rng.integers(t.shape[0])] = True
    child = np.where(mask, mutant, t)
    np.clip(child, spec.low, spec.high, out=child)
    return SubGenome._wrap(K.REAL, child)


def gaussian_jitter(target: SubGenome, spec: GeneFamilySpec, sigma: float, rng) -> SubGenome:
    """Fallback for DE when the population is too small to draw donors."""
    _need(target, K.REAL)
    child = target.values + rng.normal(0.0, 1.0, target.values.shape) * sigma * (spec.high - spec.low)
    np.clip(child, spec.low, spec.high, out=child)
    return SubGenome._wrap(K.REAL, child)


def integer_mutate(parent: SubGenome, spec: GeneFamilySpec,
                   params: OperatorParams = DEFAULT_PARAMS, rng=None) -> SubGenome:
    """Per-coordinate (rate 1/dim) symmetric geometric step, clamped.

    The step magnitude is geometric on {1, 2, ...} with mean
    ``int_step_scale * (high - low)`` (at least 1), so short moves dominate.
    """
    _need(parent, K.INTEGER)
    v = parent.values
    dim = v.shape[0]
    fire = rng.random(dim) < 1.0 / dim
    child = v.copy()
    if fire.any():
        rng_width = (spec.high - spec.low)[fire]
        mean = np.maximum(params.int_step_scale * rng_width, 1.0)
        mag = rng.geometric(1.0 / mean)
        sign = np.where(rng.random(mag.shape[0]) < 0.5, -1, 1)
        child[fire] = np.clip(v[fire] + sign * mag, spec.low[fire], spec.high[fire])
    return SubGenome._wrap(K.INTEGER, child)


def bool_flip(parent: SubGenome, spec: GeneFamilySpec,
              params: OperatorParams = DEFAULT_PARAMS, rng=None) -> SubGenome:
    _need(parent, K.BOOLEAN)
    v = parent.values
    rate = params.bool_flip_rate if params.bool_flip_rate is not None else 1.0 / v.shape[0]
    flips = rng.random(v.shape[0]) < rate
    return SubGenome._wrap(K.BOOLEAN, v ^ flips)


def cat_mutate(parent: SubGenome, spec: GeneFamilySpec,
               params: OperatorParams = DEFAULT_PARAMS, rng=None) -> SubGenome:
    """Replacement mutation: a firing coordinate moves to one of the other categories."""
    _need(parent, K.CATEGORICAL)
    v = parent.values
    rate = params.cat_replace_rate if params.cat_replace_rate is not None else 1.0 / v.shape[0]
    fire = rng.random(v.shape[0]) < rate
    child = v.copy()
    if fire.any():
        k = spec.n_categories[fire]
        offset = rng.integers(1, k)  # 1..k-1, never the current category
        child[fire] = (v[fire] + offset) % k
    return SubGenome._wrap(K.CATEGORICAL, child)


def _reflect(m: np.ndarray, cap: float) -> np.ndarray:
    # fold onto [0, cap] as a triangle wave
    m = np.abs(m) % (2.0 * cap)
    return np.where(m > cap, 2.0 * cap - m, m)


def complex_mutate(parent: SubGenome, spec: GeneFamilySpec,
                   params: OperatorParams = DEFAULT_PARAMS, rng=None) -> SubGenome:
    """Independent magnitude and phase jitter in polar form.

    The magnitude is reflected back into ``[0, cap]`` and the phase wraps.
    """
    _need(parent, K.COMPLEX)
    z = parent.values
    n = z.shape[0]
    mag = np.abs(z)
    phase = np.angle(z)
    dmag = rng.normal(0.0, 1.0, n) * (params.cx_mag_sigma * spec.cap)
    dphase = rng.normal(0.0, 1.0, n) * params.cx_phase_sigma
    if params.cx_mag_sigma > 0:
        mag = _reflect(mag + dmag, spec.cap)
    child = mag * np.exp(1j * (phase + dphase))
    return SubGenome._wrap(K.COMPLEX, child)


def embedding_mutate(parent: SubGenome, spec: GeneFamilySpec,
                     params: OperatorParams = DEFAULT_PARAMS, rng=None) -> SubGenome:
    """Per vector: norm-preserving rotation (p=0.5) or clamped coordinate drift.

    The rotation turns the vector by a Gaussian angle (``emb_sigma`` radians)
    toward a random orthogonal direction.  A rotation that is impossible
    (zero vector, width 1) or that would leave the coordinate box falls
    through to the drift move.
    """
    _need(parent, K.EMBEDDING)
    v = parent.values
    child = v.copy()
    drift_sigma = params.emb_sigma * (spec.high - spec.low)
    for j in range(v.shape[0]):
        vec = v[j]
        if rng.random() < 0.5:
            rotated = _rotate(vec, params.emb_sigma, rng)
            if rotated is not None and np.all((rotated >= spec.low) & (rotated <= spec.high)):
                child[j] = rotated
                continue
        child[j] = np.clip(vec + rng.normal(0.0, 1.0, vec.shape) * drift_sigma, spec.low, spec.high)
    return SubGenome._wrap(K.EMBEDDING, child)


def _rotate(vec: np.ndarray, sigma: float, rng) -> np.ndarray | None:
    norm = np.linalg.norm(vec)
    if norm == 0.0 or vec.shape[0] < 2:
        return None
    unit = vec / norm
    u = rng.normal(0.0, 1.0, vec.shape)
    w = u - np.dot(u, unit) * unit
    wn = np.linalg.norm(w)
    if wn == 0.0:
        return None
    w /= wn
    theta = rng.normal(0.0, sigma)
    out = norm * (np.cos(theta) * unit + np.sin(theta) * w)
    # cancel accumulated rounding so the norm is kept to ~1 ulp
    return out * (norm / np.linalg.norm(out))


# -- generic ablation -------------------------------------------------------

def encode_generic(sg: SubGenome, spec: GeneFamilySpec) -> np.ndarray:
    """Flatten a subgenome to reals: bools to 0/1, categories to their index,
    complex to (re, im) pairs, embeddings to their coordinates."""
    v = sg.values
    if sg.kind is K.COMPLEX:
        return np.column_stack([v.real, v.imag]).ravel()
    return v.astype(np.float64).ravel()


def _generic_ranges(spec: GeneFamilySpec) -> np.ndarray:
    kind = spec.kind
    if kind in (K.INTEGER, K.REAL):
        return (spec.high - spec.low).astype(np.float64)
    if kind is K.BOOLEAN:
        return np.ones(spec.dim)
    if kind is K.CATEGORICAL:
        return (spec.n_categories - 1).astype(np.float64)
    if kind is K.COMPLEX:
        return np.full(2 * spec.dim, 2.0 * spec.cap)
    return np.full(spec.size, spec.high - spec.low)


def decode_generic(x: np.ndarray, spec: GeneFamilySpec) -> SubGenome:
    kind = spec.kind
    if kind is K.BOOLEAN:
        return SubGenome._wrap(kind, x >= 0.5)
    if kind is K.INTEGER:
        return SubGenome._wrap(kind, np.clip(np.rint(x), spec.low, spec.high).astype(np.int64))
    if kind is K.CATEGORICAL:
        return SubGenome._wrap(kind, np.clip(np.rint(x), 0, spec.n_categories - 1).astype(np.int64))
    if kind is K.REAL:
        return SubGenome._wrap(kind, np.clip(x, spec.low, spec.high))
    if kind is K.COMPLEX:
        z = x[0::2] + 1j * x[1::2]
        mag = np.abs(z)
        over = mag > spec.cap
        if over.any():
            z[over] *= spec.cap / mag[over]
        return SubGenome._wrap(kind, z)
    return SubGenome._wrap(kind, np.clip(x.reshape(spec.shape), spec.low, spec.high))


def generic_mutate_then_decode(parent: SubGenome, spec: GeneFamilySpec,
                               params: OperatorParams = DEFAULT_PARAMS, rng=None,
                               noise: np.ndarray | None = None) -> SubGenome:
    """Gaussian noise on the flat real encoding, then decode back.

    ``noise`` (standard-normal draws, one per encoded slot) may be supplied
    to make the decode arithmetic explicit; otherwise it is drawn from ``rng``.
    """
    if parent.kind is not spec.kind:
        raise ContractViolation("kind mismatch")
    x = encode_generic(parent, spec)
    if noise is None:
        noise = rng.normal(0.0, 1.0, x.shape[0])
    x = x + noise * (params.generic_sigma * _generic_ranges(spec))
    return decode_generic(x, spec)


_NATIVE = {
    K.INTEGER: integer_mutate,
    K.BOOLEAN: bool_flip,
    K.CATEGORICAL: cat_mutate,
    K.COMPLEX: complex_mutate,
    K.EMBEDDING: embedding_mutate,
}


def native_operator(kind: GeneFamilyKind):
    """The single-parent type-native operator for ``kind`` (Real uses DE)."""
    try:
        return _NATIVE[kind]
    except KeyError:
        raise ContractViolation(f"{kind.name} has no single-parent operator; use DE") from None


def de_offspring(members, credits, spec: GeneFamilySpec, params: OperatorParams, rng) -> list[SubGenome]:
    """One DE/best/1/bin child per member; ``best`` is the lowest-credit member."""
    n = len(members)
    best = members[int(np.argmin(credits))]
    if n < 4:
        log.debug("population of %d too small for DE donors; using Gaussian jitter", n)
        return [gaussian_jitter(m, spec, params.generic_sigma, rng) for m in members]
    out = []
    for i, target in enumerate(members):
        r1, r2 = rng.choice(n - 1, size=2, replace=False)
        r1 += r1 >= i
        r2 += r2 >= i
        out.append(real_de_best_1_bin(target, best, members[r1], members[r2], spec, params, rng))
    return out
