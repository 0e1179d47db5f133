"""MOEA/D with Pascoletti-Serafini scalarization and adaptive multi-reference points."""

from ._backend import BACKEND
from .core import (
    Bounds,
    ContractError,
    Dominance,
    IdealNadir,
    Individual,
    ParameterError,
    dominates,
    nondominated_filter,
)
from .evolve import RunConfig, RunResult, algo_config, run
from .metrics import MetricResult, aggregate, hv_normalized, hypervolume, igd
from .problems import ProblemDef, UnsupportedProblemError, get_problem, reference_front
from .refpoints import generate_reference_points

__all__ = [
    "BACKEND",
    "Bounds",
    "ContractError",
    "Dominance",
    "IdealNadir",
    "Individual",
    "MetricResult",
    "ParameterError",
    "ProblemDef",
    "RunConfig",
    "RunResult",
    "UnsupportedProblemError",
    "aggregate",
    "algo_config",
    "dominates",
    "generate_reference_points",
    "get_problem",
    "hv_normalized",
    "hypervolume",
    "igd",
    "nondominated_filter",
    "reference_front",
    "run",
]

__version__ = "0.1.0"
