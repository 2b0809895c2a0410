"""Typed-population evolutionary optimization over heterogeneous gene families."""
from .assembly import AssemblyMode, Phenotype, assemble
from .benchmarks import BENCHMARKS, EncoderUnsupportedFamily, Problem, build_problem, flatten
from .core import CreditScheme, GsaConfig, OperatorSet, VARIANTS, make_variant, run_gsa
from .evaluation import BudgetExhausted, RunRecord
from .genome import Bundle, ContractViolation, GeneFamilyKind, GeneFamilySpec, SubGenome

__all__ = [
    "AssemblyMode", "BENCHMARKS", "BudgetExhausted", "Bundle", "ContractViolation", "CreditScheme",
    "EncoderUnsupportedFamily", "GeneFamilyKind", "GeneFamilySpec", "GsaConfig", "OperatorSet",
    "Phenotype", "Problem", "RunRecord", "SubGenome", "VARIANTS", "assemble", "build_problem",
    "flatten", "make_variant", "run_gsa",
]
