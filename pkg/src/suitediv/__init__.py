"""Diversity-aware multi-objective search over test suites for a synthetic app."""

from .engine import EngineConfig, Mechanisms, RunState, initialize, run, step
from .genotype import GenotypeConfig, TestSuite, max_possible_distance, random_suite, suite_distance
from .landscape import GenerationSnapshot, hypervolume, pareto_front, snapshot
from .sut import AppModel, EvaluatedIndividual, FitnessVector, evaluate, generate_app_model
from .variation import VariationConfig

__version__ = "0.1.0"

__all__ = [
    "AppModel",
    "EngineConfig",
    "EvaluatedIndividual",
    "FitnessVector",
    "GenerationSnapshot",
    "GenotypeConfig",
    "Mechanisms",
    "RunState",
    "TestSuite",
    "VariationConfig",
    "evaluate",
    "generate_app_model",
    "hypervolume",
    "initialize",
    "max_possible_distance",
    "pareto_front",
    "random_suite",
    "run",
    "snapshot",
    "step",
    "suite_distance",
]
