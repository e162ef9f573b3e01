"""Built-in scripted agents: optimal replay, greedy, random, stall.

These are environment-side baselines; they read session state directly
instead of speaking the wire protocol.  Each returns one action per turn:
("call", name, arguments) or ("answer", token).
"""

from __future__ import annotations

from .domain import ToolSpec
from .engine import Session
from .planner import greedy_step, shortest_path
from .rng import SeededRng, derive_seed

Action = tuple  # ("call", str, dict) | ("answer", str)


def build_arguments(session: Session, tool: ToolSpec) -> dict[str, str]:
    """Exact-token arguments for a feasible tool, enums from the current query."""
    args: dict[str, str] = {}
    for kind in tool.datatype_inputs:
        owned = session.current_instances(kind)
        if not owned:
            raise ValueError(f"{tool.name} needs {kind} which is not owned")
        args[kind] = owned[-1].token
    for param, value in zip(tool.enum_params,
                            _combo_for(session, tool)):
        args[param] = value
    return args


def _combo_for(session: Session, tool: ToolSpec) -> tuple[str, ...]:
    return session.query.combination if tool.enum_params else ()


class GtReplayPolicy:
    """Replans the cost-optimal path from the current state every turn.

    Replanning each turn is equivalent to following a fixed plan while the
    environment is static (the tie-broken optimum has optimal substructure)
    and automatically absorbs blocking events, including bans of its own
    planned call.
    """

    name = "gt-replay"

    def act(self, session: Session) -> Action:
        if session.reached_goal():
            return ("answer", session.final_token())
        plan = shortest_path(session.visible_tools(), session.owned_kinds(),
                             session.task.final_kind)
        tool = session.library.by_name[plan.tool_names[0]]
        return ("call", tool.name, build_arguments(session, tool))


class GreedyPolicy:
    """Lowest cost-per-component among chain candidates each step.

    The chain condition drops on the first step and on the first step after
    every blocking event.
    """

    name = "greedy"

    def __init__(self):
        self._prev_output: str | None = None
        self._events_seen = 0

    def act(self, session: Session) -> Action:
        if session.reached_goal():
            return ("answer", session.final_token())
        if session.events_fired() != self._events_seen:
            self._events_seen = session.events_fired()
            self._prev_output = None
        pick = greedy_step(list(session.visible_tools()), session.owned_kinds(),
                           self._prev_output)
        if pick is None:
            raise ValueError("greedy found no feasible tool")
        self._prev_output = pick.output_kind
        return ("call", pick.name, build_arguments(session, pick))


class RandomPolicy:
    """Uniform choice over visible tools (feasible or not), seeded per query."""

    name = "random"

    def __init__(self, session: Session):
        self._rng = SeededRng(derive_seed(
            session.config.global_seed, session.original_query.query_id, "random_agent"))

    def act(self, session: Session) -> Action:
        if session.reached_goal():
            return ("answer", session.final_token())
        tools = sorted(session.visible_tools(), key=lambda t: t.name)
        tool = self._rng.choice(tools)
        args: dict[str, str] = {}
        for kind in tool.datatype_inputs:
            owned = session.current_instances(kind)
            # fabricate a plausible token when the input is not owned
            args[kind] = owned[-1].token if owned else f"<{kind}99999>"
        for param, value in zip(tool.enum_params, session.query.combination):
            args[param] = value
        return ("call", tool.name, args)


class StallPolicy:
    """Repeats a malformed call until the turn budget runs out."""

    name = "stall"

    def act(self, session: Session) -> Action:
        first = min(t.name for t in session.visible_tools())
        return ("call", first, {})


def make_policy(name: str, session: Session):
    if name == "gt-replay":
        return GtReplayPolicy()
    if name == "greedy":
        return GreedyPolicy()
    if name == "random":
        return RandomPolicy(session)
    if name == "stall":
        return StallPolicy()
    raise ValueError(f"unknown built-in policy {name!r}")


BUILTIN_POLICIES = ("gt-replay", "greedy", "random", "stall")
