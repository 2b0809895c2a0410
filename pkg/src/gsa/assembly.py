"""Phenotype assembly: turn a bundle into the candidate the objective sees."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .genome import Bundle, GeneFamilyKind, GeneFamilySpec

R_EFFECTIVE = "R_effective"

_EMPTY = np.zeros(0)
_EMPTY.flags.writeable = False


class AssemblyMode(enum.Enum):
    ACTIVE = "active"
    PASSIVE = "passive"


@dataclass(frozen=True, eq=False)
class Phenotype:
    """Assembled candidate.

    ``features`` maps each family label to its raw values, plus
    ``"R_effective"`` for the (possibly gated) real vector.
    """

    features: Mapping[str, np.ndarray]
    r_effective: np.ndarray
    source: Bundle


def _locate(bundle: Bundle, kind: GeneFamilyKind) -> int:
    for k, part in enumerate(bundle.parts):
        if part.kind is kind:
            return k
    return -1


def assemble(bundle: Bundle, mode: AssemblyMode,
             specs: Sequence[GeneFamilySpec] | None = None) -> Phenotype:
    """Build the phenotype of ``bundle``.

    Under ``ACTIVE`` the first Real family is gated by the first Boolean
    family: coordinate ``i`` is kept where ``B[i mod len(B)]`` is set and
    zeroed elsewhere.  ``PASSIVE`` passes the raw Real vector through.  All
    other families are exposed ungated under their labels (the kind tag if
    no specs are given).
    """
    parts = bundle.parts
    if specs is not None:
        labels = [s.label for s in specs]
    else:
        labels = [p.kind.tag for p in parts]
    features = {lab: p.values for lab, p in zip(labels, parts)}

    kr = _locate(bundle, GeneFamilyKind.REAL)
    if kr < 0:
        r_eff = _EMPTY
    else:
        r = parts[kr].values
        kb = _locate(bundle, GeneFamilyKind.BOOLEAN) if mode is AssemblyMode.ACTIVE else -1
        if kb < 0:
            r_eff = r
        else:
            gate = parts[kb].values
            if gate.shape[0] != r.shape[0]:
                gate = np.resize(gate, r.shape[0])  # gate bit i = B[i mod dim_B]
            r_eff = np.where(gate, r, 0.0)
            r_eff.flags.writeable = False
    features[R_EFFECTIVE] = r_eff
    return Phenotype(features, r_eff, bundle)
