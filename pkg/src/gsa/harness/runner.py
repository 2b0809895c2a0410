"""Execute an experiment matrix and stream its rows to CSV."""
from __future__ import annotations

import csv
import hashlib
import io
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from ..benchmarks import EncoderUnsupportedFamily, build_problem
from .algorithms import run_algorithm
from .config import ExperimentCell, Matrix

log = logging.getLogger(__name__)

COLUMNS = ("matrix_id", "cell_id", "benchmark", "dims", "budget", "algorithm", "seed",
           "status", "final_fitness", "evaluations_used", "wall_ms")
STATUS_OK = "ok"
STATUS_ENCODER_ERROR = "encoder_error"


class HarnessIOError(OSError):
    pass


def stable_seed(*parts) -> int:
    """64-bit seed from a blake2b digest of the parts; independent of
    where a cell or algorithm sits in the config."""
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        h.update(str(p).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


def run_seed(matrix_id: str, cell_id: str, algorithm: str, replicate: int) -> int:
    return stable_seed("run", matrix_id, cell_id, algorithm, replicate)


def problem_seed(matrix_id: str, cell_id: str, replicate: int) -> int:
    """Shared by all algorithms of a replicate so they meet the same instance."""
    return stable_seed("problem", matrix_id, cell_id, replicate)


@dataclass(frozen=True)
class Task:
    matrix_id: str
    cell: ExperimentCell
    algorithm: str
    replicate: int

    @property
    def seed(self) -> int:
        return run_seed(self.matrix_id, self.cell.id, self.algorithm, self.replicate)


def tasks_for(matrix: Matrix) -> list[Task]:
    return [Task(matrix.id, cell, algo, r)
            for cell in matrix.cells
            for algo in matrix.algorithms
            for r in range(cell.replicates)]


def execute(task: Task) -> dict:
    cell = task.cell
    problem = build_problem(cell.benchmark, cell.dims,
                            problem_seed(task.matrix_id, cell.id, task.replicate), **cell.params)
    row = dict(matrix_id=task.matrix_id, cell_id=cell.id, benchmark=cell.benchmark,
               dims=problem.dims_label, budget=cell.budget, algorithm=task.algorithm,
               seed=task.seed)
    t0 = time.perf_counter()
    try:
        rec = run_algorithm(task.algorithm, problem, cell.budget, task.seed)
    except EncoderUnsupportedFamily:
        row.update(status=STATUS_ENCODER_ERROR, final_fitness="", evaluations_used=0)
    else:
        row.update(status=STATUS_OK, final_fitness=repr(float(rec.final_best_fitness)),
                   evaluations_used=rec.evaluations_used)
    row["wall_ms"] = int(round((time.perf_counter() - t0) * 1000))
    return row


def _line(values: Iterable) -> bytes:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(list(values))
    return buf.getvalue().encode("utf-8")


class RowWriter:
    """Single writer; each row goes out in one ``write`` on an append-only
    descriptor, so an interrupted run leaves only whole rows."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.marker = self.path.with_name(self.path.name + ".partial")
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            if self.marker.exists():
                self.marker.unlink()
            self.fd = os.open(self.path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC | os.O_APPEND, 0o644)
            self._write(_line(COLUMNS))
        except OSError as exc:
            self._mark(exc)

    def _write(self, data: bytes):
        n = os.write(self.fd, data)
        if n != len(data):
            raise OSError(f"short write to {self.path}")

    def _mark(self, exc: OSError):
        try:
            self.marker.write_text(f"incomplete: {exc}\n", encoding="utf-8")
        except OSError:
            pass
        raise HarnessIOError(f"writing {self.path} failed: {exc}") from exc

    def write(self, row: dict):
        try:
            self._write(_line(row[c] for c in COLUMNS))
        except OSError as exc:
            self._mark(exc)

    def close(self):
        os.close(self.fd)


def iter_rows(tasks: list[Task], workers: int) -> Iterator[dict]:
    """Rows in task order, whatever the completion order of the workers."""
    if workers <= 1:
        yield from map(execute, tasks)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(execute, tasks, chunksize=1)


def run_matrix(matrix: Matrix, out_dir, workers: int | None = None) -> Path:
    """Run every (cell, algorithm, replicate) of ``matrix`` into
    ``out_dir/<matrix id>.csv`` and return that path."""
    workers = workers or os.cpu_count() or 1
    tasks = tasks_for(matrix)
    path = Path(out_dir) / f"{matrix.id}.csv"
    writer = RowWriter(path)
    try:
        for i, row in enumerate(iter_rows(tasks, workers), 1):
            writer.write(row)
            log.info("%s %d/%d %s %s %s", matrix.id, i, len(tasks), row["cell_id"],
                     row["algorithm"], row["status"])
    finally:
        writer.close()
    return path
