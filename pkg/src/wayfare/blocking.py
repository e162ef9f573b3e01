"""Dynamic blocking: hierarchical seeding, trigger spacing, event parameters.

A plan holds one event type and B events.  Per-event parameters derive from
S_{q,i} = S_q + i * seed_interval (i from 1; S_q itself seeds the plan-level
removal intervals), so the whole event sequence is fixed by (S, q, type, B).

Trigger turns are spaced along the current optimal path: after i fired
events, the next trigger falls max(1, floor(L / (B - i + 1))) turns later,
recomputed from the refreshed optimal length after every event.  A ban fails
the call at its trigger turn; the other types apply right after the trigger
turn's call, surfacing in the following observation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .domain import BlockType, ConfigError, EnvConfig, TaskSpec, ToolSpec
from .planner import solvable
from .querygen import PreferenceSpace, Query, enumerate_combinations, query_id_for, render_query
from .rng import SeededRng, derive_seed

COST_CHANGE_SEED_LO = 10**6
COST_CHANGE_SEED_HI = 10**7


def next_trigger(path_length: int, current_turn: int, total_blocks: int, fired: int) -> int:
    """Turn of the next event given the optimal path length from here."""
    if fired >= total_blocks:
        raise ConfigError(f"all {total_blocks} events already fired")
    delta = path_length // (total_blocks - fired + 1)
    return current_turn + max(1, delta)


def sample_removal_intervals(plan_seed: int, n: int, l_max: int) -> tuple[list[tuple[int, int]], bool]:
    """n non-overlapping integer intervals within [2, l_max], widest width first.

    Target width is floor(l_max / 2); when n intervals of that width cannot
    fit, the width relaxes to the largest feasible value (possibly 0).
    Returns (sorted intervals, relaxed?).
    """
    if l_max < 2:
        raise ConfigError(f"no composite lengths available (l_max={l_max})")
    positions = l_max - 1  # integers 2..l_max
    feasible_width = positions // n - 1
    if feasible_width < 0:
        raise ConfigError(f"cannot fit {n} removal intervals into [2, {l_max}]")
    desired_width = l_max // 2
    width = min(desired_width, feasible_width)
    rng = SeededRng(plan_seed)
    chosen: list[tuple[int, int]] = []
    attempts = 0
    while len(chosen) < n and attempts < 100:
        attempts += 1
        lo = rng.randint(2, l_max - width)
        hi = lo + width
        if all(hi < c_lo or lo > c_hi for c_lo, c_hi in chosen):
            chosen.append((lo, hi))
    if len(chosen) < n:
        # tight packings can strand rejection sampling; lay out consecutively
        chosen = [(2 + k * (width + 1), 2 + k * (width + 1) + width) for k in range(n)]
    return sorted(chosen), width < desired_width


@dataclass(frozen=True)
class BlockEventSpec:
    """Pre-seeded parameters of one planned event (trigger turn is dynamic)."""

    index: int  # 1-based
    block_type: BlockType
    seed: int
    payload: dict


@dataclass
class BlockEvent:
    """One fired event."""

    index: int
    block_type: BlockType
    trigger_turn: int
    payload: dict
    effective: bool = True  # non-ban events flip true once a later call happens


@dataclass
class BlockPlan:
    """Runtime blocking state owned by a session."""

    block_type: BlockType
    total: int
    specs: list[BlockEventSpec]
    next_trigger_turn: int | None
    fixed_triggers: list[int] | None = None  # agent sessions reuse the reference schedule
    fired: list[BlockEvent] = field(default_factory=list)
    relaxed_removal: bool = False

    @property
    def pending_spec(self) -> BlockEventSpec | None:
        if len(self.fired) >= self.total or self.next_trigger_turn is None:
            return None
        return self.specs[len(self.fired)]

    def due(self, turn: int) -> bool:
        return self.pending_spec is not None and turn >= self.next_trigger_turn

    def experienced(self) -> int:
        return sum(1 for e in self.fired if e.effective)


def build_event_specs(config: EnvConfig, query: Query, task: TaskSpec,
                      space: PreferenceSpace) -> tuple[list[BlockEventSpec], bool]:
    """All per-event parameters for (S, q, type, B); returns (specs, relaxed?)."""
    btype, total = config.block_type, config.block_count
    if total == 0:
        return [], False
    if btype is BlockType.BAN_TOOL and total > task.sequence_length - 2:
        raise ConfigError(
            f"{total} bans can break solvability at N={task.sequence_length}; "
            f"the robustness bound is N-2 = {task.sequence_length - 2}")
    base_seed = derive_seed(config.global_seed, query.query_id, "block_plan")
    relaxed = False
    removal_lengths: list[int] = []
    if btype is BlockType.REMOVE_TOOLS:
        l_max = task.sequence_length - 1  # longest visible composite
        intervals, relaxed = sample_removal_intervals(base_seed, total, l_max)
        removal_lengths = [lo for lo, _ in intervals]
    specs: list[BlockEventSpec] = []
    for i in range(1, total + 1):
        seed = (base_seed + i * config.seed_interval) & ((1 << 64) - 1)
        rng = SeededRng(seed)
        if btype is BlockType.COST_CHANGE:
            payload = {"new_seed": COST_CHANGE_SEED_LO + rng.next_uint64()
                       % (COST_CHANGE_SEED_HI - COST_CHANGE_SEED_LO)}
        elif btype is BlockType.PREFERENCE_CHANGE:
            pool_size = len(enumerate_combinations(task.task_name, query.split, space))
            current = int(query.query_id.rsplit("_", 1)[1])
            if pool_size < 2:
                raise ConfigError("no alternative query available for preference change")
            offset = 1 + rng.next_uint64() % (pool_size - 1)
            payload = {"replacement_index": (current + offset) % pool_size}
        elif btype is BlockType.REMOVE_TOOLS:
            payload = {"removal_length": removal_lengths[i - 1]}
        elif btype is BlockType.BAN_TOOL:
            payload = {"reason_code": f"{rng.next_uint64() & 0xFFFFFF:06x}"}
        else:
            raise ConfigError(f"cannot plan events of type {btype}")
        specs.append(BlockEventSpec(index=i, block_type=btype, seed=seed, payload=payload))
    return specs, relaxed


def replacement_query(task: TaskSpec, split: str, index: int, space: PreferenceSpace) -> Query:
    combos = enumerate_combinations(task.task_name, split, space)
    combo = combos[index]
    return Query(
        query_id=query_id_for(task.task_name, split, index),
        task=task.task_name,
        split=split,
        combination=combo,
        text=render_query(task.task_name, combo),
    )


def ban_failure_message(tool_name: str, reason_code: str) -> str:
    return f"Tool {tool_name} is temporarily unavailable due to failure code {reason_code}."


def check_solvability(tools: tuple[ToolSpec, ...] | list[ToolSpec],
                      banned: frozenset[str], removed: frozenset[str],
                      state: frozenset[str], goal_kind: str) -> bool:
    hidden = set(banned) | set(removed)
    available = [t for t in tools if t.name not in hidden]
    return solvable(available, state, goal_kind)
