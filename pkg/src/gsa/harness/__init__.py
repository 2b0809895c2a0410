from .algorithms import ALGORITHMS, run_algorithm
from .config import ConfigError, ExperimentCell, Matrix, load_config, parse_config
from .report import ReportError, build_report, write_report
from .runner import COLUMNS, execute, problem_seed, run_matrix, run_seed, tasks_for

__all__ = [
    "ALGORITHMS", "COLUMNS", "ConfigError", "ExperimentCell", "Matrix", "ReportError",
    "build_report", "execute", "load_config", "parse_config", "problem_seed", "run_algorithm",
    "run_matrix", "run_seed", "tasks_for", "write_report",
]
