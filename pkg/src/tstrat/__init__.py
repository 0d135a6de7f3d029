"""Timed rewrite models with a strategy language and explicit-state analysis."""

from .analysis import Limits, Solution, run_command
from .bundled import builtin_model
from .model import Model, load_model
from .parser import parse_command, parse_strategy_pair
from .semantics import Interpreter, RunStats
from .timedomain import INF

__all__ = [
    "INF",
    "Interpreter",
    "Limits",
    "Model",
    "RunStats",
    "Solution",
    "builtin_model",
    "load_model",
    "parse_command",
    "parse_strategy_pair",
    "run_command",
]

__version__ = "0.1.0"
