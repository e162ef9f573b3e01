"""Deterministic travel-planning tool-use environment.

Procedurally generated planning tasks over atomic and composite tools with
seeded costs, a multi-turn interaction engine with four dynamic blocking
event types, exact and greedy planning oracles, and trajectory metrics.
"""

from .domain import (
    BlockType,
    ConfigError,
    EnvConfig,
    InternalInvariantError,
    TaskName,
    TaskSpec,
    ToolLibrary,
    ToolSpec,
    Trajectory,
    build_datatype_chain,
)
from .engine import Session, feasible_tools, init_session, invoke, observation, submit_answer
from .oracle import enumerate_paths, greedy_trajectory, segmented_gt, shortest_path_gt
from .querygen import Query, build_queries, load_preference_space
from .toolgen import assign_costs, enumerate_tools

__version__ = "0.1.0"

__all__ = [
    "BlockType", "ConfigError", "EnvConfig", "InternalInvariantError",
    "TaskName", "TaskSpec", "ToolLibrary", "ToolSpec", "Trajectory",
    "build_datatype_chain", "Session", "feasible_tools", "init_session",
    "invoke", "observation", "submit_answer", "enumerate_paths",
    "greedy_trajectory", "segmented_gt", "shortest_path_gt", "Query",
    "build_queries", "load_preference_space", "assign_costs", "enumerate_tools",
    "__version__",
]
