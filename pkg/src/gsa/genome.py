"""Typed gene families, subgenome values and per-family distances.

A candidate is a :class:`Bundle`: one :class:`SubGenome` per declared
:class:`GeneFamilySpec`, in a fixed family order.  Values are stored as
read-only numpy arrays so genomes can be shared freely between runs.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class ContractViolation(ValueError):
    """Raised when a value does not conform to its declared family."""


class GeneFamilyKind(enum.Enum):
    INTEGER = "Z"
    REAL = "R"
    BOOLEAN = "B"
    CATEGORICAL = "C"
    COMPLEX = "Cx"
    EMBEDDING = "E"

    @property
    def tag(self) -> str:
        return self.value


_DTYPES = {
    GeneFamilyKind.INTEGER: np.int64,
    GeneFamilyKind.REAL: np.float64,
    GeneFamilyKind.BOOLEAN: np.bool_,
    GeneFamilyKind.CATEGORICAL: np.int64,
    GeneFamilyKind.COMPLEX: np.complex128,
    GeneFamilyKind.EMBEDDING: np.float64,
}


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class GeneFamilySpec:
    """Declaration of one gene family.

    ``low``/``high`` are per-coordinate bounds for Integer and Real families
    and the shared coordinate range for Embedding families.  ``n_categories``
    is the per-coordinate cardinality of a Categorical family, ``cap`` the
    magnitude cap of a Complex family and ``width`` the ambient dimension of
    each Embedding vector (``dim`` counts vectors).
    """

    kind: GeneFamilyKind
    dim: int
    low: np.ndarray | None = None
    high: np.ndarray | None = None
    n_categories: np.ndarray | None = None
    cap: float = 1.0
    width: int = 1
    label: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ContractViolation(f"dim must be >= 1, got {self.dim}")
        if not self.label:
            object.__setattr__(self, "label", self.kind.tag)
        kind = self.kind
        if kind in (GeneFamilyKind.INTEGER, GeneFamilyKind.REAL):
            dtype = np.int64 if kind is GeneFamilyKind.INTEGER else np.float64
            low = np.broadcast_to(np.asarray(self.low, dtype=dtype), (self.dim,)).copy()
            high = np.broadcast_to(np.asarray(self.high, dtype=dtype), (self.dim,)).copy()
            if np.any(low > high):
                raise ContractViolation(f"{self.label}: low > high")
            object.__setattr__(self, "low", _frozen(low))
            object.__setattr__(self, "high", _frozen(high))
        elif kind is GeneFamilyKind.EMBEDDING:
            if self.width < 1:
                raise ContractViolation("embedding width must be >= 1")
            low, high = float(self.low), float(self.high)
            if low > high:
                raise ContractViolation(f"{self.label}: low > high")
            object.__setattr__(self, "low", low)
            object.__setattr__(self, "high", high)
        elif kind is GeneFamilyKind.CATEGORICAL:
            k = np.broadcast_to(np.asarray(self.n_categories, dtype=np.int64), (self.dim,)).copy()
            if np.any(k < 2):
                raise ContractViolation(f"{self.label}: every coordinate needs >= 2 categories")
            object.__setattr__(self, "n_categories", _frozen(k))
        elif kind is GeneFamilyKind.COMPLEX:
            if not self.cap > 0:
                raise ContractViolation("complex magnitude cap must be positive")

    # convenience constructors
    @classmethod
    def integer(cls, dim, low=-10, high=10, label="Z"):
        return cls(GeneFamilyKind.INTEGER, dim, low=low, high=high, label=label)

    @classmethod
    def real(cls, dim, low=-1.0, high=1.0, label="R"):
        return cls(GeneFamilyKind.REAL, dim, low=low, high=high, label=label)

    @classmethod
    def boolean(cls, dim, label="B"):
        return cls(GeneFamilyKind.BOOLEAN, dim, label=label)

    @classmethod
    def categorical(cls, dim, n_categories=4, label="C"):
        return cls(GeneFamilyKind.CATEGORICAL, dim, n_categories=n_categories, label=label)

    @classmethod
    def complex(cls, dim, cap=1.0, label="Cx"):
        return cls(GeneFamilyKind.COMPLEX, dim, cap=cap, label=label)

    @classmethod
    def embedding(cls, dim, width, low=-1.0, high=1.0, label="E"):
        return cls(GeneFamilyKind.EMBEDDING, dim, low=low, high=high, width=width, label=label)

    @property
    def shape(self) -> tuple[int, ...]:
        if self.kind is GeneFamilyKind.EMBEDDING:
            return (self.dim, self.width)
        return (self.dim,)

    @property
    def size(self) -> int:
        """Number of scalar coordinates (complex genes count once)."""
        return self.dim * (self.width if self.kind is GeneFamilyKind.EMBEDDING else 1)


@dataclass(frozen=True, eq=False)
class SubGenome:
    """One individual's value for one gene family."""

    kind: GeneFamilyKind
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=_DTYPES[self.kind])
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def _wrap(cls, kind: GeneFamilyKind, values: np.ndarray) -> "SubGenome":
        # Hot-path constructor: caller guarantees dtype and ownership.
        obj = object.__new__(cls)
        values.flags.writeable = False
        object.__setattr__(obj, "kind", kind)
        object.__setattr__(obj, "values", values)
        return obj

    def __eq__(self, other):
        if not isinstance(other, SubGenome):
            return NotImplemented
        return self.kind is other.kind and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.kind, self.values.tobytes()))

    def __repr__(self):
        return f"SubGenome({self.kind.tag}, {self.values.tolist()!r})"


@dataclass(frozen=True, eq=False)
class Bundle:
    """An index-aligned tuple of subgenomes, one per family."""

    parts: tuple[SubGenome, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def __len__(self):
        return len(self.parts)

    def __getitem__(self, k: int) -> SubGenome:
        return self.parts[k]

    def __iter__(self):
        return iter(self.parts)

    def __eq__(self, other):
        if not isinstance(other, Bundle):
            return NotImplemented
        return len(self) == len(other) and all(a == b for a, b in zip(self.parts, other.parts))

    def __hash__(self):
        return hash(self.parts)

    def replace(self, k: int, part: SubGenome) -> "Bundle":
        parts = list(self.parts)
        parts[k] = part
        return Bundle._wrap(tuple(parts))

    @classmethod
    def _wrap(cls, parts: tuple) -> "Bundle":
        obj = object.__new__(cls)
        object.__setattr__(obj, "parts", parts)
        return obj


def check_subgenome(sg: SubGenome, spec: GeneFamilySpec) -> None:
    """Raise :class:`ContractViolation` unless ``sg`` lies inside ``spec``."""
    if sg.kind is not spec.kind:
        raise ContractViolation(f"kind mismatch: {sg.kind.name} vs {spec.kind.name}")
    v = sg.values
    if v.shape != spec.shape:
        raise ContractViolation(f"{spec.label}: shape {v.shape} != {spec.shape}")
    kind = spec.kind
    if kind in (GeneFamilyKind.INTEGER, GeneFamilyKind.REAL):
        ok = np.all((v >= spec.low) & (v <= spec.high))
    elif kind is GeneFamilyKind.CATEGORICAL:
        ok = np.all((v >= 0) & (v < spec.n_categories))
    elif kind is GeneFamilyKind.COMPLEX:
        ok = np.all(np.abs(v) <= spec.cap * (1 + 1e-12))
    elif kind is GeneFamilyKind.EMBEDDING:
        ok = np.all((v >= spec.low) & (v <= spec.high))
    else:
        ok = True
    if kind is not GeneFamilyKind.BOOLEAN and not np.all(np.isfinite(v)):
        ok = False
    if not ok:
        raise ContractViolation(f"{spec.label}: value out of bounds: {v!r}")


def check_bundle(bundle: Bundle, specs: Sequence[GeneFamilySpec]) -> None:
    if len(bundle) != len(specs):
        raise ContractViolation(f"bundle has {len(bundle)} parts, expected {len(specs)}")
    for part, spec in zip(bundle.parts, specs):
        check_subgenome(part, spec)


def random_subgenome(spec: GeneFamilySpec, rng: np.random.Generator) -> SubGenome:
    kind = spec.kind
    if kind is GeneFamilyKind.INTEGER:
        v = rng.integers(spec.low, spec.high, endpoint=True)
    elif kind is GeneFamilyKind.REAL:
        v = rng.uniform(spec.low, spec.high)
    elif kind is GeneFamilyKind.BOOLEAN:
        v = rng.random(spec.dim) < 0.5
    elif kind is GeneFamilyKind.CATEGORICAL:
        v = rng.integers(0, spec.n_categories)
    elif kind is GeneFamilyKind.COMPLEX:
        # uniform over the disk: radius ~ cap * sqrt(U)
        r = spec.cap * np.sqrt(rng.random(spec.dim))
        phi = rng.uniform(-np.pi, np.pi, spec.dim)
        v = r * np.exp(1j * phi)
    else:
        v = rng.uniform(spec.low, spec.high, size=spec.shape)
    return SubGenome._wrap(kind, np.asarray(v, dtype=_DTYPES[kind]))


def random_bundle(specs: Sequence[GeneFamilySpec], rng: np.random.Generator) -> Bundle:
    return Bundle._wrap(tuple(random_subgenome(s, rng) for s in specs))


def _cosine_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(1 - cos)/2 along the last axis; zero vectors have similarity 0."""
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    denom = na * nb
    dot = np.sum(a * b, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos = np.where(denom > 0, dot / np.where(denom > 0, denom, 1.0), 0.0)
    d = (1.0 - np.clip(cos, -1.0, 1.0)) / 2.0
    # identical vectors (including two zero vectors) are at distance 0
    same = np.all(a == b, axis=-1)
    return np.where(same, 0.0, d)


def _range_scale(spec: GeneFamilySpec) -> np.ndarray:
    width = (spec.high - spec.low).astype(np.float64)
    return np.where(width > 0, 1.0 / np.where(width > 0, width, 1.0), 0.0)


def family_distance(a: SubGenome, b: SubGenome, spec: GeneFamilySpec) -> float:
    """Distance in the family's native metric, normalized to [0, 1]."""
    if a.kind is not spec.kind or b.kind is not spec.kind:
        raise ContractViolation(
            f"kind mismatch: {a.kind.name}/{b.kind.name} under {spec.kind.name} family")
    return float(_distance_values(a.values, b.values, spec))


def _distance_values(a: np.ndarray, b: np.ndarray, spec: GeneFamilySpec):
    """Vectorized distance; leading axes of ``a``/``b`` broadcast."""
    kind = spec.kind
    if kind in (GeneFamilyKind.INTEGER, GeneFamilyKind.REAL):
        z = (a - b) * _range_scale(spec)
        return np.mean(z * z, axis=-1)
    if kind in (GeneFamilyKind.BOOLEAN, GeneFamilyKind.CATEGORICAL):
        return np.mean(a != b, axis=-1)
    if kind is GeneFamilyKind.COMPLEX:
        d = np.abs(a - b) ** 2
        return np.mean(d, axis=-1) / (2.0 * spec.cap) ** 2
    return np.mean(_cosine_distance(a, b), axis=-1)


def distance_fn(spec: GeneFamilySpec):
    """Scalar ``(a_values, b_values) -> float`` equal to
    :func:`family_distance`, specialised once per family for hot loops."""
    kind = spec.kind
    n = spec.dim
    if kind in (GeneFamilyKind.INTEGER, GeneFamilyKind.REAL):
        scale = _range_scale(spec)

        def f(a, b):
            z = (a - b) * scale
            return float(z @ z) / n
    elif kind in (GeneFamilyKind.BOOLEAN, GeneFamilyKind.CATEGORICAL):
        def f(a, b):
            return np.count_nonzero(a != b) / n
    elif kind is GeneFamilyKind.COMPLEX:
        norm = n * (2.0 * spec.cap) ** 2

        def f(a, b):
            d = a - b
            return float(d.real @ d.real + d.imag @ d.imag) / norm
    else:
        def f(a, b):
            dot = np.einsum("ij,ij->i", a, b)
            den = np.sqrt(np.einsum("ij,ij->i", a, a) * np.einsum("ij,ij->i", b, b))
            cos = np.divide(dot, den, out=np.zeros_like(dot), where=den > 0)
            d = (1.0 - np.clip(cos, -1.0, 1.0)) / 2.0
            d[(a == b).all(axis=1)] = 0.0
            return float(d.mean())
    return f


def pairwise_distances(members: Sequence[SubGenome], spec: GeneFamilySpec) -> np.ndarray:
    """Matrix of :func:`family_distance` between all pairs of ``members``."""
    stack = np.stack([m.values for m in members])
    return _distance_values(stack[:, None], stack[None, :], spec)
