"""Planner surface: static ground truth, greedy baseline, segmented replay.

Static planning delegates to the graph planners; the blocked reference
trajectory comes from simulating the optimal-replay policy through the
engine on its own timeline, which concatenates per-segment shortest paths
exactly as the interaction loop would experience them.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import engine
from .domain import EnvConfig, ToolLibrary, Trajectory
from .planner import (
    Plan,
    UnreachableGoalError,
    decomposition_cost_cents,
    enumerate_paths,
    greedy_path,
    shortest_path,
)
from .policies import GtReplayPolicy
from .querygen import PreferenceSpace, Query

__all__ = [
    "Plan", "UnreachableGoalError", "enumerate_paths", "decomposition_cost_cents",
    "shortest_path_gt", "greedy_trajectory", "ReferenceEpisode", "segmented_gt",
]


def shortest_path_gt(library: ToolLibrary, start: frozenset[str] | None = None,
                     banned: frozenset[str] = frozenset(),
                     removed: frozenset[str] = frozenset()) -> Plan:
    """Cost-minimal plan; ties break on fewer calls then name order."""
    task = library.task
    start = start if start is not None else frozenset(task.initial_kinds)
    return shortest_path(library.visible(removed=removed, banned=banned),
                         start, task.final_kind)


def greedy_trajectory(library: ToolLibrary, start: frozenset[str] | None = None,
                      banned: frozenset[str] = frozenset(),
                      removed: frozenset[str] = frozenset()) -> Plan:
    task = library.task
    start = start if start is not None else frozenset(task.initial_kinds)
    return greedy_path(library.visible(removed=removed, banned=banned),
                       start, task.final_kind)


@dataclass(frozen=True)
class ReferenceEpisode:
    """Blocked ground truth: the optimal-replay run on its own timeline."""

    trajectory: Trajectory
    trigger_turns: tuple[int, ...]
    events: tuple[dict, ...]
    experienced: int
    final_query_id: str
    gt_answer: str
    intent_hit: bool
    turns: int


def segmented_gt(config: EnvConfig, query: Query,
                 library: ToolLibrary | None = None,
                 space: PreferenceSpace | None = None) -> ReferenceEpisode:
    """Simulate the optimal-replay agent under the configured blocking plan.

    With zero events this reduces to the static ground truth.  The returned
    trigger turns are reused verbatim by agent sessions so that schedules do
    not depend on agent behavior (only a ban's target tool does).
    """
    session = engine.init_session(config, query, library=library, space=space)
    policy = GtReplayPolicy()
    while session.status == engine.RUNNING:
        action = policy.act(session)
        if action[0] == "answer":
            engine.submit_answer(session, action[1])
        else:
            engine.invoke(session, action[1], action[2])
    events = tuple(
        {
            "index": e.index,
            "type": e.block_type.value,
            "trigger_turn": e.trigger_turn,
            "payload": dict(e.payload),
            "effective": e.effective,
        }
        for e in session.block_plan.fired
    )
    return ReferenceEpisode(
        trajectory=session.trajectory,
        trigger_turns=tuple(e.trigger_turn for e in session.block_plan.fired),
        events=events,
        experienced=session.block_plan.experienced(),
        final_query_id=session.query.query_id,
        gt_answer=session.gt_answer,
        intent_hit=bool(session.intent_hit),
        turns=session.turn,
    )
