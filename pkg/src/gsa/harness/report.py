"""Markdown report from a results CSV."""
from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from ..stats import PairedSample, holm_correct, median_iqr, vargha_delaney_a12, wilcoxon_signed_rank
from .config import ConfigError, Matrix
from .runner import COLUMNS, STATUS_ENCODER_ERROR, run_seed


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class Row:
    cell_id: str
    algorithm: str
    seed: int
    status: str
    fitness: float | None


def read_results(path, matrix_id: str | None = None) -> list[Row]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise ReportError(f"{path}: unexpected header {reader.fieldnames}")
        rows = []
        for r in reader:
            if matrix_id is not None and r["matrix_id"] != matrix_id:
                continue
            fit = float(r["final_fitness"]) if r["status"] != STATUS_ENCODER_ERROR else None
            rows.append(Row(r["cell_id"], r["algorithm"], int(r["seed"]), r["status"], fit))
    return rows


def _fmt(x: float) -> str:
    if x == 0:
        return "0"
    if 1e-3 <= abs(x) < 1e3:
        return f"{x:.3f}"
    return f"{x:.2e}"


def _replicate_index(matrix: Matrix) -> dict[tuple[str, str, int], int]:
    """Map (cell, algorithm, seed) back to the replicate that produced it."""
    return {(c.id, a, run_seed(matrix.id, c.id, a, r)): r
            for c in matrix.cells for a in matrix.algorithms for r in range(c.replicates)}


def _median_table(matrix: Matrix, by_cell) -> tuple[list[str], dict]:
    algos = [a for a in matrix.algorithms if any(by_cell[c.id].get(a) for c in matrix.cells)]
    lines = ["| cell | " + " | ".join(algos) + " |", "|---|" + "---|" * len(algos)]
    medians = {}
    for c in matrix.cells:
        cells = []
        stats = {}
        for a in algos:
            rows = by_cell[c.id].get(a, [])
            ok = [r.fitness for r in rows if r.status != STATUS_ENCODER_ERROR]
            stats[a] = median_iqr(ok) if ok else None
        medians[c.id] = {a: (s[0] if s else None) for a, s in stats.items()}
        finite = [s[0] for s in stats.values() if s is not None]
        best = min(finite) if finite else None
        for a in algos:
            s = stats[a]
            if s is None:
                cells.append("crash" if by_cell[c.id].get(a) else "")
                continue
            text = f"{_fmt(s[0])} [{_fmt(s[1])}, {_fmt(s[2])}]"
            cells.append(f"**{text}**" if s[0] == best else text)
        lines.append(f"| {c.id} | " + " | ".join(cells) + " |")
    return lines, medians


def _comparison_table(matrix: Matrix, rows: list[Row], reference: str) -> list[str]:
    rep = _replicate_index(matrix)
    value = {}
    for r in rows:
        key = (r.cell_id, r.algorithm, r.seed)
        if key in rep and r.fitness is not None:
            value[(r.cell_id, r.algorithm, rep[key])] = r.fitness
    others = [a for a in matrix.algorithms if a != reference]
    results = []
    for a in others:
        xs, ys = [], []
        for c in matrix.cells:
            for i in range(c.replicates):
                x, y = value.get((c.id, reference, i)), value.get((c.id, a, i))
                if x is not None and y is not None:
                    xs.append(x)
                    ys.append(y)
        if xs:
            w = wilcoxon_signed_rank(PairedSample(xs, ys))
            results.append((a, len(xs), w.statistic, w.pvalue, vargha_delaney_a12(xs, ys)))
    if not results:
        return ["_No paired comparisons available._"]
    adj = holm_correct([r[3] for r in results])
    lines = [f"| algorithm | pairs | W | p | p (Holm) | A12 vs {reference} |", "|---|---|---|---|---|---|"]
    for (a, n, w, p, a12), ph in zip(results, adj):
        lines.append(f"| {a} | {n} | {w:g} | {p:.3g} | {ph:.3g} | {a12:.3f} |")
    return lines


def _rank_table(matrix: Matrix, medians: dict) -> list[str]:
    algos = sorted({a for m in medians.values() for a in m})
    algos = [a for a in matrix.algorithms if a in algos]
    per_cell = []
    for c in matrix.cells:
        vals = np.array([medians[c.id].get(a) if medians[c.id].get(a) is not None else np.inf
                         for a in algos], dtype=np.float64)
        per_cell.append(rankdata(vals))  # crashed cells tie for the worst rank
    mean = np.mean(per_cell, axis=0)
    order = np.argsort(mean, kind="stable")
    lines = ["| algorithm | mean rank |", "|---|---|"]
    for i in order:
        lines.append(f"| {algos[i]} | {mean[i]:.2f} |")
    return lines


def build_report(results_path, matrix: Matrix, reference: str) -> str:
    rows = read_results(results_path, matrix.id)
    if not rows:
        raise ReportError(f"{results_path}: no rows for matrix {matrix.id!r}")
    present = {r.algorithm for r in rows}
    if reference not in present:
        raise ConfigError(f"reference algorithm {reference!r} has no results; present: {', '.join(sorted(present))}")
    by_cell: dict[str, dict[str, list[Row]]] = defaultdict(lambda: defaultdict(list))
    for r in rows:
        by_cell[r.cell_id][r.algorithm].append(r)

    out = [f"# Matrix `{matrix.id}`", ""]
    out += ["## Median final fitness [Q1, Q3]", "",
            "`crash` marks an algorithm whose every run ended in an encoder error; bold is the row best.", ""]
    table, medians = _median_table(matrix, by_cell)
    out += table + [""]
    out += [f"## Paired comparison against `{reference}`", "",
            "Pairs are (cell, replicate), pooled across cells; Wilcoxon signed-rank, "
            "Holm-corrected over the listed algorithms.  A12 is the probability that the "
            "reference is lower, so 0 means the listed algorithm always wins.", ""]
    if len(present) < 2:
        out += ["_Only one algorithm present; no comparisons._"]
    else:
        out += _comparison_table(matrix, rows, reference)
    out += ["", "## Mean rank across cells", "",
            "Ranked by cell median; crashed algorithms take the worst rank of the cell.", ""]
    out += _rank_table(matrix, medians)
    return "\n".join(out) + "\n"


def write_report(results_path, matrix: Matrix, reference: str, out_path) -> Path:
    text = build_report(results_path, matrix, reference)
    out = Path(out_path)
    out.write_text(text, encoding="utf-8")
    return out
