"""Control network programming: a nondeterministic rule-network interpreter
with dynamic search control, plus a generic graph-search skeleton."""

from .dsl import ParseError, SourceProgram, load, parse, render
from .engine import (
    ControlOptions,
    ExecutionResult,
    ExecutionStats,
    PrimitiveRegistry,
    Solution,
    Step,
    attempt_order,
    core_registry,
    execute,
    run_chain,
)
from .errors import (
    CNError,
    ConfigurationError,
    InternalConsistencyError,
    NetworkError,
    ParseFailure,
    PrimitiveError,
    SetupError,
)
from .network import Arrow, ControlNetwork, Node, NodeKind, PrimitiveCall, Subnet, arrows_from, validate
from .rng import SplitMix64
from .search import CompleteState, SearchOutcome, Strategy, generic_search
from .search_network import network_search

__version__ = "0.1.0"

__all__ = [
    "Arrow", "CNError", "CompleteState", "ConfigurationError", "ControlNetwork", "ControlOptions",
    "ExecutionResult", "ExecutionStats", "InternalConsistencyError", "NetworkError", "Node", "NodeKind",
    "ParseError", "ParseFailure", "PrimitiveCall", "PrimitiveError", "PrimitiveRegistry", "SearchOutcome",
    "SetupError", "Solution", "SourceProgram", "SplitMix64", "Step", "Strategy", "Subnet", "arrows_from",
    "attempt_order", "core_registry", "execute", "generic_search", "load", "network_search", "parse",
    "render", "run_chain", "validate",
]
