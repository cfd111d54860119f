"""Goal-seeking QUBO: find binary vectors whose objective meets an exact or interval target."""

__version__ = "0.1.0"

from .qubo_core import BitVector, QuboInstance, evaluate, parse_instance  # noqa: E402
from .tabu_search import SolverConfig, SolutionSet, run, run_parallel_targets  # noqa: E402
from .targets import Exact, Interval, WeightedMulti  # noqa: E402

__all__ = [
    "BitVector",
    "Exact",
    "Interval",
    "QuboInstance",
    "SolutionSet",
    "SolverConfig",
    "WeightedMulti",
    "evaluate",
    "parse_instance",
    "run",
    "run_parallel_targets",
]
