"""Tabu search for job-shop scheduling with critical-block neighbourhoods."""

from .instance_io import (
    Instance,
    InstanceFormatError,
    KnownBounds,
    builtin_example,
    load_benchmark,
    load_instance,
    parse_orlib,
    parse_taillard,
)
from .neighborhood import Move, MoveKind, NeighborhoodKind, clip, generate, neighbors
from .schedule import CriticalBlock, CycleError, ScheduleData, Solution, evaluate, makespan
from .tabu_search import SearchConfig, SearchStats, run

__all__ = [
    "CriticalBlock", "CycleError", "Instance", "InstanceFormatError", "KnownBounds", "Move",
    "MoveKind", "NeighborhoodKind", "ScheduleData", "SearchConfig", "SearchStats", "Solution",
    "builtin_example", "clip", "evaluate", "generate", "load_benchmark", "load_instance",
    "makespan", "neighbors", "parse_orlib", "parse_taillard", "run",
]

__version__ = "0.1.0"
