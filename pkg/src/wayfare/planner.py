"""Exact and baseline planners over the tool graph.

States are frozensets of owned datatype kinds; a tool is applicable when its
datatype inputs are owned, and applying it adds its output kind.  Ground
truth is Dijkstra with the total order (cost, call count, lexicographic
name sequence), which makes the planner a pure function of its inputs.  The
greedy baseline picks the lowest cost-per-component tool among chain
candidates each step.

With every cost >= 1.00 and composites emitting only their final datatype,
any cost-optimal path is a clean contiguous decomposition of [1, N]; the
planner asserts this chain property on every solve.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .domain import InternalInvariantError, ToolSpec


class UnreachableGoalError(RuntimeError):
    """No tool sequence reaches the goal from the given state."""


@dataclass(frozen=True)
class Plan:
    tool_names: tuple[str, ...]
    total_cost_cents: int

    def __len__(self) -> int:
        return len(self.tool_names)


def _applicable(tool: ToolSpec, state: frozenset[str]) -> bool:
    return all(kind in state for kind in tool.datatype_inputs)


def shortest_path(tools: list[ToolSpec] | tuple[ToolSpec, ...],
                  start: frozenset[str], goal_kind: str,
                  check_chain: bool = True) -> Plan:
    """Minimum-cost tool sequence from ``start`` to a state containing the goal.

    Ties break on fewer calls, then lexicographic name order.  Raises
    UnreachableGoalError when no sequence reaches the goal.
    """
    if goal_kind in start:
        return Plan(tool_names=(), total_cost_cents=0)
    usable = [t for t in tools if t.cost_cents is not None]
    # key: (cost, length, names) gives the full tie-break order
    heap: list[tuple[int, int, tuple[str, ...], frozenset[str]]] = [(0, 0, (), start)]
    best: dict[frozenset[str], tuple[int, int, tuple[str, ...]]] = {start: (0, 0, ())}
    while heap:
        cost, length, names, state = heapq.heappop(heap)
        if best.get(state, (cost, length, names)) < (cost, length, names):
            continue
        if goal_kind in state:
            if check_chain:
                _assert_chain(names, usable)
            return Plan(tool_names=names, total_cost_cents=cost)
        for tool in usable:
            if tool.output_kind in state or not _applicable(tool, state):
                continue
            nxt = state | {tool.output_kind}
            key = (cost + tool.cost_cents, length + 1, names + (tool.name,))
            if nxt not in best or key < best[nxt]:
                best[nxt] = key
                heapq.heappush(heap, (*key, nxt))
    raise UnreachableGoalError(f"goal {goal_kind} unreachable from {sorted(start)}")


def _assert_chain(names: tuple[str, ...], tools: list[ToolSpec]) -> None:
    # every tool after the first must consume the previous tool's output,
    # i.e. consecutive spans are contiguous; the first anchors on the start state
    spans = {t.name: t.span for t in tools}
    for prev, cur in zip(names, names[1:]):
        if spans[cur][0] != spans[prev][1] + 1:
            raise InternalInvariantError(
                f"optimal path violates the chain property: {cur} (span {spans[cur]}) "
                f"does not consume the output of {prev} (span {spans[prev]})"
            )


def greedy_step(tools: list[ToolSpec], state: frozenset[str],
                prev_output: str | None) -> ToolSpec | None:
    """One greedy pick: argmin cost/components over the feasible (chain) set.

    ``prev_output`` None relaxes the chain condition (episode start, or the
    first step after a blocking event).  Utility ties break on name.
    """
    candidates = []
    for t in tools:
        if t.cost_cents is None or t.output_kind in state or not _applicable(t, state):
            continue
        if prev_output is not None and prev_output not in t.datatype_inputs:
            continue
        candidates.append(t)
    if not candidates:
        return None
    # compare c1/k1 vs c2/k2 exactly via cross-multiplication
    def better(a: ToolSpec, b: ToolSpec) -> bool:
        lhs, rhs = a.cost_cents * b.comp, b.cost_cents * a.comp
        if lhs != rhs:
            return lhs < rhs
        return a.name < b.name
    pick = candidates[0]
    for t in candidates[1:]:
        if better(t, pick):
            pick = t
    return pick


def greedy_path(tools: list[ToolSpec] | tuple[ToolSpec, ...],
                start: frozenset[str], goal_kind: str) -> Plan:
    """Full greedy trajectory in a static environment."""
    usable = list(tools)
    state = start
    prev_output: str | None = None
    names: list[str] = []
    cost = 0
    while goal_kind not in state:
        pick = greedy_step(usable, state, prev_output)
        if pick is None:
            raise UnreachableGoalError(
                f"greedy stuck before reaching {goal_kind} from {sorted(state)}")
        names.append(pick.name)
        cost += pick.cost_cents
        state = state | {pick.output_kind}
        prev_output = pick.output_kind
    return Plan(tool_names=tuple(names), total_cost_cents=cost)


def enumerate_paths(n: int) -> list[tuple[tuple[int, int], ...]]:
    """All ordered contiguous decompositions of [1, n], full span excluded.

    Count is 2^(n-1) - 1; used as the brute-force testing oracle.
    """
    if n < 2:
        raise ValueError("need at least two steps to decompose")
    paths: list[tuple[tuple[int, int], ...]] = []

    def extend(start: int, acc: tuple[tuple[int, int], ...]):
        if start > n:
            paths.append(acc)
            return
        for end in range(start, n + 1):
            extend(end + 1, acc + ((start, end),))

    extend(1, ())
    return [p for p in paths if p != ((1, n),)]


def decomposition_cost_cents(decomp: tuple[tuple[int, int], ...],
                             span_costs: dict[tuple[int, int], int]) -> int:
    return sum(span_costs[s] for s in decomp)


def solvable(tools: list[ToolSpec] | tuple[ToolSpec, ...],
             start: frozenset[str], goal_kind: str) -> bool:
    """Reachability of the goal (ignores costs)."""
    state = set(start)
    grew = True
    while grew:
        grew = False
        for t in tools:
            if t.output_kind not in state and all(k in state for k in t.datatype_inputs):
                state.add(t.output_kind)
                grew = True
    return goal_kind in state
