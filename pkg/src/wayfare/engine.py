"""Multi-turn interaction loop: sessions, call classification, state, events.

One session is strictly turn-ordered and single-threaded; distinct sessions
share nothing.  Invalid calls consume a turn and charge nothing.  Owned
instances only accumulate; preference changes bump the epoch instead of
deleting state, and chain-derived instances satisfy tool inputs only at
their own epoch.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import blocking, planner, toolgen
from .domain import (
    BlockType,
    ConfigError,
    DataTypeInstance,
    EnvConfig,
    InternalInvariantError,
    TaskSpec,
    ToolCallRecord,
    ToolLibrary,
    Trajectory,
    fmt_cents,
    make_token,
    token_prefix,
)
from .querygen import (
    PreferenceSpace,
    Query,
    derive_answer_for_combination,
    derive_gt_answer,
    load_preference_space,
)

# kind prefixes may end in digits (Candidate_L1); the id is the last 5 digits
_TOKEN_RE = re.compile(r"^<[A-Za-z][A-Za-z0-9_]*\d{5}>$")

RUNNING, ANSWERED, EXHAUSTED = "running", "answered", "exhausted"


@dataclass
class Session:
    """Mutable episode state; construct with init_session."""

    config: EnvConfig
    task: TaskSpec
    query: Query                  # current (replacements swap it)
    original_query: Query
    library: ToolLibrary
    space: PreferenceSpace
    block_plan: blocking.BlockPlan
    gt_answer: str
    cost_seed: int
    state: list[DataTypeInstance] = field(default_factory=list)
    turn: int = 0
    epoch: int = 0
    status: str = RUNNING
    trajectory: Trajectory = field(default_factory=Trajectory)
    messages: list[dict] = field(default_factory=list)
    banned: frozenset[str] = frozenset()
    removed: frozenset[str] = frozenset()
    intent_hit: bool | None = None
    _mint_counters: dict[str, int] = field(default_factory=dict)
    _steps_done: dict[int, set[int]] = field(default_factory=dict)

    # -- state queries ---------------------------------------------------

    def current_instances(self, kind: str) -> list[DataTypeInstance]:
        return [i for i in self.state
                if i.kind == kind and (i.is_constant or i.epoch == self.epoch)]

    def owned_kinds(self) -> frozenset[str]:
        return frozenset(i.kind for i in self.state
                         if i.is_constant or i.epoch == self.epoch)

    def visible_tools(self):
        return self.library.visible(removed=self.removed, banned=self.banned)

    def reached_goal(self) -> bool:
        return bool(self.current_instances(self.task.final_kind))

    def final_token(self) -> str | None:
        owned = self.current_instances(self.task.final_kind)
        return owned[-1].token if owned else None

    def events_fired(self) -> int:
        return len(self.block_plan.fired)


def _initial_instances(task: TaskSpec) -> list[DataTypeInstance]:
    return [DataTypeInstance(kind=kind, token=make_token(kind, 0), epoch=-1)
            for kind in sorted(task.initial_kinds)]


def init_session(config: EnvConfig, query: Query,
                 library: ToolLibrary | None = None,
                 space: PreferenceSpace | None = None,
                 fixed_triggers: list[int] | None = None) -> Session:
    """Create a session; generates and costs the library when not supplied.

    ``fixed_triggers`` replays a previously observed trigger schedule
    (agent sessions reuse the reference timeline); otherwise triggers are
    computed dynamically from this session's own optimal path lengths.
    """
    task = TaskSpec(query.task, config.sequence_length)
    space = space or load_preference_space(query.task)
    if library is None:
        library = toolgen.assign_costs(toolgen.enumerate_tools(task), config, query.query_id)
    if any(t.cost_cents is None for t in library.tools):
        raise ConfigError("session requires a costed tool library")

    specs, relaxed = blocking.build_event_specs(config, query, task, space)
    if config.block_count > 0:
        if fixed_triggers is not None:
            first = fixed_triggers[0] if fixed_triggers else None
        else:
            start = frozenset(task.initial_kinds)
            base = planner.shortest_path(library.visible(), start, task.final_kind)
            first = blocking.next_trigger(len(base), 0, config.block_count, 0)
    else:
        first = None
    plan = blocking.BlockPlan(
        block_type=config.block_type, total=config.block_count, specs=specs,
        next_trigger_turn=first, fixed_triggers=fixed_triggers,
        relaxed_removal=relaxed,
    )
    return Session(
        config=config, task=task, query=query, original_query=query,
        library=library, space=space, block_plan=plan,
        gt_answer=derive_gt_answer(config.global_seed, query.query_id, task),
        cost_seed=config.global_seed,
        state=_initial_instances(task),
    )


def feasible_tools(session: Session) -> set[str]:
    owned = session.owned_kinds()
    return {t.name for t in session.visible_tools()
            if all(k in owned for k in t.datatype_inputs)}


# -- invocation ----------------------------------------------------------


def _classify(session: Session, name: str, arguments: dict[str, str]):
    """(validity, detail) for a call; 'ok' means chargeable."""
    tools = {t.name: t for t in session.visible_tools()}
    tool = tools.get(name)
    if tool is None:
        return "wrong_name", f"'{name}' is not an available tool"
    allowed = set(tool.required_params)
    missing = [p for p in tool.required_params if p not in arguments]
    unknown = [p for p in arguments if p not in allowed]
    if missing or unknown:
        parts = []
        if missing:
            parts.append(f"missing parameters {missing}")
        if unknown:
            parts.append(f"unknown parameters {unknown}")
        return "wrong_params", "; ".join(parts)
    dim_values = session.space.dimension_param_values()
    for p in tool.enum_params:
        if arguments[p] not in dim_values[p]:
            return "wrong_params", f"'{arguments[p]}' is not a valid {p} value"
    for kind in tool.datatype_inputs:
        if not _TOKEN_RE.match(arguments[kind]):
            return "wrong_params", f"malformed identifier for {kind}"
    for kind in tool.datatype_inputs:
        owned = session.current_instances(kind)
        if not owned:
            return "inaccessible", f"required input type {kind} is not available yet"
        if arguments[kind] not in {i.token for i in owned}:
            return "wrong_params", f"identifier for {kind} does not match the provided value"
    return "ok", ""


def _mint_output(session: Session, tool, arguments: dict[str, str]) -> DataTypeInstance:
    task = session.task
    chain = toolgen.build_datatype_chain(task)
    if tool.span[0] == 1:
        combo = tuple(arguments[p] for p in tool.enum_params)
    else:
        input_kind = chain[tool.span[0] - 2]
        matched = next(i for i in session.current_instances(input_kind)
                       if i.token == arguments[input_kind])
        combo = matched.combo
    kind = tool.output_kind
    if kind == task.final_kind:
        token = derive_answer_for_combination(
            session.config.global_seed, session.query.query_id, task,
            combo or (), session.query.combination)
    else:
        count = session._mint_counters.get(kind, 0) + 1
        session._mint_counters[kind] = count
        token = make_token(token_prefix(task, kind), count)
    instance = DataTypeInstance(kind=kind, token=token, epoch=session.epoch, combo=combo)
    if all(existing.token != token or existing.epoch != session.epoch
           for existing in session.state):
        session.state.append(instance)
    return instance


def _redundancy(session: Session, tool) -> str:
    if session.reached_goal():
        return "extra"
    done = session._steps_done.setdefault(session.epoch, set())
    span_steps = set(range(tool.span[0], tool.span[1] + 1))
    return "repeated" if span_steps & done else "none"


def _apply_event(session: Session, spec: blocking.BlockEventSpec,
                 trigger_turn: int, banned_tool: str | None = None) -> blocking.BlockEvent:
    payload = dict(spec.payload)
    payload["seed"] = spec.seed
    if spec.block_type is BlockType.BAN_TOOL:
        if banned_tool is not None:
            payload["banned_tool"] = banned_tool
            if banned_tool in session.library.by_name:
                session.banned = session.banned | {banned_tool}
            session.messages.append({
                "type": "ban_failure",
                "text": blocking.ban_failure_message(banned_tool, payload["reason_code"]),
            })
    elif spec.block_type is BlockType.PREFERENCE_CHANGE:
        replacement = blocking.replacement_query(
            session.task, session.query.split, payload["replacement_index"], session.space)
        session.epoch += 1
        session.query = replacement
        session.gt_answer = derive_gt_answer(
            session.config.global_seed, replacement.query_id, session.task)
        payload["replacement_query_id"] = replacement.query_id
        session.messages.append({
            "type": "preference_change",
            "text": ("My plans changed, please disregard the earlier requirements. "
                     + replacement.text
                     + " The previously provided TimeInfo information is still valid."),
        })
    elif spec.block_type is BlockType.COST_CHANGE:
        session.cost_seed = payload["new_seed"]
        session.library = toolgen.assign_costs(
            session.library, session.config,
            session.original_query.query_id, global_seed=session.cost_seed)
    elif spec.block_type is BlockType.REMOVE_TOOLS:
        length = payload["removal_length"]
        dropped = {t.name for t in session.library.tools
                   if t.kind == "composite" and t.comp == length}
        session.removed = session.removed | dropped
        payload["removed_tools"] = sorted(dropped)
    event = blocking.BlockEvent(
        index=spec.index, block_type=spec.block_type,
        trigger_turn=trigger_turn, payload=payload,
        effective=spec.block_type is BlockType.BAN_TOOL,
    )
    session.block_plan.fired.append(event)
    _schedule_next(session)
    if not blocking.check_solvability(
            session.library.visible(), session.banned, session.removed,
            session.owned_kinds(), session.task.final_kind):
        raise InternalInvariantError("blocking event broke goal reachability")
    return event


def _schedule_next(session: Session) -> None:
    plan = session.block_plan
    fired = len(plan.fired)
    if fired >= plan.total:
        plan.next_trigger_turn = None
        return
    if plan.fixed_triggers is not None:
        plan.next_trigger_turn = (plan.fixed_triggers[fired]
                                  if fired < len(plan.fixed_triggers) else None)
        return
    remaining = planner.shortest_path(
        [t for t in session.visible_tools()],
        session.owned_kinds(), session.task.final_kind)
    plan.next_trigger_turn = blocking.next_trigger(
        len(remaining), plan.fired[-1].trigger_turn, plan.total, fired)


def _mark_effective(session: Session) -> None:
    for event in session.block_plan.fired:
        if not event.effective and event.trigger_turn < session.turn + 1:
            event.effective = True


def invoke(session: Session, name: str, arguments: dict[str, str]) -> tuple[ToolCallRecord, dict]:
    """Process one tool call; returns (record, observation)."""
    if session.status != RUNNING:
        raise ConfigError(f"session is {session.status}; no further calls accepted")
    _mark_effective(session)
    plan = session.block_plan
    ban_pending = (plan.block_type is BlockType.BAN_TOOL and plan.due(session.turn + 1))
    result_text: str
    if ban_pending:
        spec = plan.pending_spec
        event = _apply_event(session, spec, session.turn + 1, banned_tool=name)
        record = ToolCallRecord(
            turn=session.turn + 1, tool_name=name, arguments=dict(arguments),
            validity="banned_failure", charged_cents=0, produced=None, redundancy="none")
        result_text = blocking.ban_failure_message(name, event.payload["reason_code"])
    else:
        validity, detail = _classify(session, name, arguments)
        if validity == "ok":
            tool = session.library.by_name[name]
            redundancy = _redundancy(session, tool)
            instance = _mint_output(session, tool, arguments)
            session._steps_done.setdefault(session.epoch, set()).update(
                range(tool.span[0], tool.span[1] + 1))
            record = ToolCallRecord(
                turn=session.turn + 1, tool_name=name, arguments=dict(arguments),
                validity="ok", charged_cents=tool.cost_cents,
                produced=instance.token, redundancy=redundancy)
            result_text = (f"Success. You obtained {instance.token}. "
                           f"Cost: {fmt_cents(tool.cost_cents)} units.")
        else:
            record = ToolCallRecord(
                turn=session.turn + 1, tool_name=name, arguments=dict(arguments),
                validity=validity, charged_cents=0, produced=None, redundancy="none")
            result_text = f"[ERROR] {detail}."
    session.trajectory.records.append(record)
    session.turn += 1
    # non-ban events apply after the trigger turn's call completes
    while (plan.block_type not in (BlockType.NONE, BlockType.BAN_TOOL)
           and plan.due(session.turn) and session.status == RUNNING):
        _apply_event(session, plan.pending_spec, session.turn)
    if session.turn >= session.config.max_turns and session.status == RUNNING:
        session.status = EXHAUSTED
    session.trajectory.reached_goal = session.reached_goal()
    obs = observation(session)
    obs["result"] = result_text
    return record, obs


def submit_answer(session: Session, token: str) -> dict:
    """Terminal: record the final answer and score intent."""
    if session.status != RUNNING:
        raise ConfigError(f"session is {session.status}; no further answers accepted")
    session.status = ANSWERED
    session.trajectory.final_answer = token
    session.trajectory.reached_goal = session.reached_goal()
    session.intent_hit = (token == session.gt_answer)
    return {"status": session.status, "intent_hit": session.intent_hit}


def observation(session: Session) -> dict:
    """Current view: query, tools with costs, owned tokens, messages, turn."""
    drained, session.messages = session.messages, []
    dim_values = session.space.dimension_param_values()
    tools = [toolgen.tool_schema(t, session.task, dim_values)
             for t in sorted(session.visible_tools(), key=lambda t: t.span)]
    owned = sorted(
        {i.token for i in session.state if i.is_constant or i.epoch == session.epoch})
    return {
        "query_id": session.query.query_id,
        "query_text": session.query.text,
        "tools": tools,
        "cost_table": {t.name: t.cost_cents
                       for t in sorted(session.visible_tools(), key=lambda t: t.span)},
        "owned": owned,
        "messages": drained,
        "turn": session.turn,
        "turns_remaining": session.config.max_turns - session.turn,
        "status": session.status,
    }
