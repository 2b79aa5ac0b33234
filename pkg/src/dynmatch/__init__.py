"""Fully dynamic maximal matching with constant amortized update time.

The engine maintains a maximal matching (hence a 2-approximate maximum
matching and 2-approximate vertex cover) of a graph on n fixed vertices
under arbitrary edge insertions and deletions, using a randomized leveled
edge orientation.  Companion modules provide independent oracles, workload
generation, cost instrumentation, and a CLI.
"""

from .core import DynGraph, GraphError, InvariantError, consistency_check
from .engine import (CAPPED, UNCAPPED, EngineConfig, MatchingEngine,
                     default_cap_sample_width, default_level_cap)
from .instrumentation import (EpochRecord, Metrics, duration_uniformity,
                              uninterrupted_duration)
from .oracle import NaiveMaintainer, PlainGraph, check_maximal, max_matching_size
from .workload import (Trace, TraceError, append_teardown, decode, encode,
                       gen_random, gen_skew_star, gen_sliding_window, generate)

__all__ = [
    "DynGraph", "GraphError", "InvariantError", "consistency_check",
    "CAPPED", "UNCAPPED", "EngineConfig", "MatchingEngine",
    "default_cap_sample_width", "default_level_cap",
    "EpochRecord", "Metrics", "duration_uniformity", "uninterrupted_duration",
    "NaiveMaintainer", "PlainGraph", "check_maximal", "max_matching_size",
    "Trace", "TraceError", "append_teardown", "decode", "encode",
    "gen_random", "gen_skew_star", "gen_sliding_window", "generate",
]
