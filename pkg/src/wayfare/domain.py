"""Core vocabulary: tasks, datatype chains, tools, configuration, trajectories.

Money is fixed-point everywhere: costs are integer cents, rendered with two
decimals.  All types here are immutable value objects; mutable episode state
lives in the engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class TaskName(str, Enum):
    LOCATION = "Location"
    TRANSPORTATION = "Transportation"
    ACCOMMODATION = "Accommodation"
    ATTRACTION = "Attraction"
    DINING = "Dining"
    SHOPPING = "Shopping"


ALL_TASKS = tuple(TaskName)

MIN_SEQUENCE_LENGTH = 4

# Constants present in every initial state (ids 00000).
TIME_INFO = "TimeInfo"
USER_PREFERENCE_FACTS = "UserPreferenceFacts"
LOCATION_PREFERENCE = "LocationPreference"

DIMENSIONS = ("Category", "Tier", "Style", "FeaturePackage")

MIN_COST_CENTS = 100  # every tool costs at least 1.00 units


class ConfigError(ValueError):
    """Invalid environment configuration."""


class InternalInvariantError(RuntimeError):
    """An environment self-check failed; indicates a bug, not user error."""


def cents(value: float | int | str) -> int:
    """Parse a currency amount into integer cents (half-up)."""
    if isinstance(value, int):
        return value * 100
    if isinstance(value, str):
        value = float(value)
    return math.floor(value * 100 + 0.5)


def fmt_cents(amount: int) -> str:
    sign = "-" if amount < 0 else ""
    amount = abs(amount)
    return f"{sign}{amount // 100}.{amount % 100:02d}"


@dataclass(frozen=True)
class TaskSpec:
    """One travel task plus its sequence length N."""

    task_name: TaskName
    sequence_length: int = 5

    def __post_init__(self):
        if self.sequence_length < MIN_SEQUENCE_LENGTH:
            raise ConfigError(
                f"sequence length must be >= {MIN_SEQUENCE_LENGTH} "
                f"(one refinement step minimum), got {self.sequence_length}"
            )

    @property
    def refinement_steps(self) -> int:
        return self.sequence_length - 3

    @property
    def needs_location_preference(self) -> bool:
        return self.task_name is not TaskName.LOCATION

    @property
    def final_kind(self) -> str:
        return f"Travel{self.task_name.value}"

    @property
    def initial_kinds(self) -> frozenset[str]:
        base = {TIME_INFO, USER_PREFERENCE_FACTS}
        if self.needs_location_preference:
            base.add(LOCATION_PREFERENCE)
        return frozenset(base)


def build_datatype_chain(task: TaskSpec) -> list[str]:
    """Output datatype kind of each step, in execution order (length N)."""
    t = task.task_name.value
    chain = [f"{t}Preference", f"{t}Candidate_Raw"]
    chain += [f"{t}Candidate_L{k}" for k in range(1, task.refinement_steps + 1)]
    chain.append(task.final_kind)
    return chain


def token_prefix(task: TaskSpec, kind: str) -> str:
    """Instance-token prefix for a kind.

    The final kind is special: its instances are candidate ids, e.g. a
    TravelLocation instance renders as "<LocationCandidate12345>".
    """
    if kind == task.final_kind:
        return f"{task.task_name.value}Candidate"
    return kind


def make_token(prefix: str, instance_id: int) -> str:
    return f"<{prefix}{instance_id:05d}>"


@dataclass(frozen=True)
class DataTypeInstance:
    """One owned datatype instance.

    ``epoch`` is bumped by preference changes; chain-derived instances only
    satisfy tool inputs at their own epoch, while session constants
    (epoch -1) always do.  ``combo`` carries the preference combination the
    instance was derived from, propagated along the chain.
    """

    kind: str
    token: str
    epoch: int
    combo: tuple[str, ...] | None = None

    @property
    def is_constant(self) -> bool:
        return self.epoch == -1


class BlockType(str, Enum):
    NONE = "none"
    BAN_TOOL = "ban_tool"
    PREFERENCE_CHANGE = "preference_change"
    COST_CHANGE = "cost_change"
    REMOVE_TOOLS = "remove_tools"


EXPLICIT_BLOCK_TYPES = (BlockType.BAN_TOOL, BlockType.PREFERENCE_CHANGE)


@dataclass(frozen=True)
class EnvConfig:
    """Environment parameters; defaults reproduce the reference setup."""

    global_seed: int = 42
    sequence_length: int = 5
    c_min_cents: int = 1500
    c_max_cents: int = 2500
    noise_std: float = 0.1
    max_turns: int = 20
    block_type: BlockType = BlockType.NONE
    block_count: int = 0
    seed_interval: int = 100

    def __post_init__(self):
        if self.c_min_cents > self.c_max_cents:
            raise ConfigError(
                f"c_min {fmt_cents(self.c_min_cents)} exceeds "
                f"c_max {fmt_cents(self.c_max_cents)}"
            )
        if self.noise_std < 0:
            raise ConfigError("noise std must be non-negative")
        if self.max_turns < self.sequence_length:
            raise ConfigError("max_turns must allow at least the atomic chain")
        if self.block_count < 0:
            raise ConfigError("block count must be >= 0")
        if self.block_type is BlockType.NONE and self.block_count > 0:
            raise ConfigError("block_count > 0 requires a block type")
        if self.block_type is not BlockType.NONE and self.block_count == 0:
            raise ConfigError(f"block type {self.block_type.value} requires block_count >= 1")


@dataclass(frozen=True)
class ToolSpec:
    """An atomic or composite tool over a contiguous span of task steps."""

    name: str
    task: TaskName
    span: tuple[int, int]
    component_names: tuple[str, ...]  # empty for atomic tools
    datatype_inputs: tuple[str, ...]  # input kinds that must be owned
    enum_params: tuple[str, ...]      # dimension parameters (step-1 spans only)
    output_kind: str
    cost_cents: int | None = None
    description: str = ""

    @property
    def kind(self) -> str:
        return "atomic" if self.span[0] == self.span[1] else "composite"

    @property
    def comp(self) -> int:
        return self.span[1] - self.span[0] + 1

    @property
    def required_params(self) -> tuple[str, ...]:
        return self.datatype_inputs + self.enum_params


@dataclass(frozen=True)
class ToolLibrary:
    """All tools for one task instance.

    The single full-span tool exists but is never visible; ``removed`` and
    ``banned`` names are runtime blocking state threaded through views.
    """

    task: TaskSpec
    tools: tuple[ToolSpec, ...]

    def __post_init__(self):
        n = self.task.sequence_length
        if len(self.tools) != n * (n + 1) // 2:
            raise InternalInvariantError("tool count != N(N+1)/2")

    @property
    def by_name(self) -> dict[str, ToolSpec]:
        return {t.name: t for t in self.tools}

    @property
    def full_span_name(self) -> str:
        n = self.task.sequence_length
        return next(t.name for t in self.tools if t.span == (1, n))

    def visible(self, removed: frozenset[str] = frozenset(),
                banned: frozenset[str] = frozenset()) -> tuple[ToolSpec, ...]:
        hidden = removed | banned | {self.full_span_name}
        return tuple(t for t in self.tools if t.name not in hidden)

    def with_costs(self, costs: dict[str, int], descriptions: dict[str, str]) -> "ToolLibrary":
        retooled = tuple(
            ToolSpec(
                name=t.name, task=t.task, span=t.span,
                component_names=t.component_names,
                datatype_inputs=t.datatype_inputs, enum_params=t.enum_params,
                output_kind=t.output_kind,
                cost_cents=costs[t.name], description=descriptions[t.name],
            )
            for t in self.tools
        )
        return ToolLibrary(task=self.task, tools=retooled)


@dataclass(frozen=True)
class ToolCallRecord:
    turn: int
    tool_name: str
    arguments: dict[str, str]
    validity: str            # ok | wrong_name | wrong_params | inaccessible | banned_failure
    charged_cents: int
    produced: str | None     # minted instance token for ok calls
    redundancy: str          # none | repeated | extra

    def __post_init__(self):
        if (self.validity == "ok") != (self.charged_cents > 0):
            raise InternalInvariantError("cost charged iff the call succeeded")
        if (self.validity == "ok") != (self.produced is not None):
            raise InternalInvariantError("output minted iff the call succeeded")


@dataclass
class Trajectory:
    """Ordered tool-call records of one episode (agent or oracle)."""

    records: list[ToolCallRecord] = field(default_factory=list)
    reached_goal: bool = False
    final_answer: str | None = None

    @property
    def ok_records(self) -> list[ToolCallRecord]:
        return [r for r in self.records if r.validity == "ok"]

    @property
    def ok_names(self) -> list[str]:
        return [r.tool_name for r in self.ok_records]

    @property
    def path_names(self) -> list[str]:
        # path metrics keep banned attempts (environment events) and strip
        # only the agent's own invalid calls
        return [r.tool_name for r in self.records
                if r.validity in ("ok", "banned_failure")]

    @property
    def total_cost_cents(self) -> int:
        return sum(r.charged_cents for r in self.ok_records)
