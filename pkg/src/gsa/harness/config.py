"""Experiment-matrix configuration.

The file is TOML with two flat section kinds and no includes::

    [cell.<cell_id>]
    benchmark = "typed_additive"   # a name from `gsa list-benchmarks`
    dims = 20                      # int, or an inline table {R = 5, B = 5, Z = 5, C = 5}
    budget = 5000
    replicates = 5                 # optional, overrides the matrix value
    n_families = 3                 # any other key goes to the benchmark constructor

    [matrix.<matrix_id>]
    cells = ["<cell_id>", ...]
    algorithms = ["GSA_FULL_ENSEMBLE", "FLATTENED_DE"]
    replicates = 5                 # optional, default 5

Identifiers are bare TOML keys.  Cells may be shared between matrices.
"""
from __future__ import annotations

import inspect
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..benchmarks import BENCHMARKS
from .algorithms import ALGORITHMS

DEFAULT_REPLICATES = 5
_CELL_KEYS = {"benchmark", "dims", "budget", "replicates"}
_MATRIX_KEYS = {"cells", "algorithms", "replicates"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentCell:
    id: str
    benchmark: str
    dims: int | dict
    budget: int
    replicates: int
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Matrix:
    id: str
    algorithms: tuple[str, ...]
    cells: tuple[ExperimentCell, ...]


def _positive_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{what} must be a positive integer, got {value!r}")
    return value


def _benchmark_params(name: str) -> set[str]:
    sig = inspect.signature(BENCHMARKS[name])
    return {p for p in sig.parameters if p not in ("dim", "rng", "kw")}


def _parse_cell(cid: str, raw: dict, default_reps: int) -> ExperimentCell:
    where = f"cell {cid!r}"
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected a table")
    missing = {"benchmark", "dims", "budget"} - raw.keys()
    if missing:
        raise ConfigError(f"{where}: missing {', '.join(sorted(missing))}")
    bench = raw["benchmark"]
    if bench not in BENCHMARKS:
        raise ConfigError(f"{where}: unknown benchmark {bench!r}; valid: {', '.join(sorted(BENCHMARKS))}")
    dims = raw["dims"]
    if isinstance(dims, dict):
        dims = {k: _positive_int(v, f"{where}: dims.{k}") for k, v in dims.items()}
    else:
        dims = _positive_int(dims, f"{where}: dims")
    params = {k: v for k, v in raw.items() if k not in _CELL_KEYS}
    unknown = set(params) - _benchmark_params(bench)
    if unknown:
        raise ConfigError(f"{where}: {bench} takes no parameter(s) {', '.join(sorted(unknown))}")
    return ExperimentCell(
        id=cid,
        benchmark=bench,
        dims=dims,
        budget=_positive_int(raw["budget"], f"{where}: budget"),
        replicates=_positive_int(raw.get("replicates", default_reps), f"{where}: replicates"),
        params=params,
    )


def parse_config(text: str) -> dict[str, Matrix]:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"not valid TOML: {exc}") from None
    extra = set(doc) - {"cell", "matrix"}
    if extra:
        raise ConfigError(f"unknown top-level section(s): {', '.join(sorted(extra))}")
    cells_raw = doc.get("cell", {})
    matrices_raw = doc.get("matrix", {})
    if not matrices_raw:
        raise ConfigError("config defines no [matrix.<id>] section")

    out = {}
    for mid, m in matrices_raw.items():
        where = f"matrix {mid!r}"
        if not isinstance(m, dict):
            raise ConfigError(f"{where}: expected a table")
        unknown = set(m) - _MATRIX_KEYS
        if unknown:
            raise ConfigError(f"{where}: unknown key(s) {', '.join(sorted(unknown))}")
        reps = _positive_int(m.get("replicates", DEFAULT_REPLICATES), f"{where}: replicates")
        algos = m.get("algorithms")
        if not isinstance(algos, list) or not algos:
            raise ConfigError(f"{where}: algorithms must be a non-empty list")
        bad = [a for a in algos if a not in ALGORITHMS]
        if bad:
            raise ConfigError(f"{where}: unknown algorithm(s) {', '.join(map(str, bad))}; "
                              f"valid: {', '.join(ALGORITHMS)}")
        if len(set(algos)) != len(algos):
            raise ConfigError(f"{where}: duplicate algorithm names")
        cids = m.get("cells")
        if not isinstance(cids, list) or not cids:
            raise ConfigError(f"{where}: cells must be a non-empty list")
        cells = []
        for cid in cids:
            if cid not in cells_raw:
                raise ConfigError(f"{where}: undefined cell {cid!r}")
            cells.append(_parse_cell(cid, cells_raw[cid], reps))
        if len(set(cids)) != len(cids):
            raise ConfigError(f"{where}: duplicate cell ids")
        out[mid] = Matrix(mid, tuple(algos), tuple(cells))
    return out


def load_config(path) -> dict[str, Matrix]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
