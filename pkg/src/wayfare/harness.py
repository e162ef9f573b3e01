"""Batch episode runner, persistence, and evaluation.

Everything written to disk is canonical JSON (sorted keys, no whitespace,
ASCII) with no timestamps, so identical configurations produce byte-identical
artifacts regardless of worker count or wall clock.
"""

from __future__ import annotations

import json
import multiprocessing
import shlex
from dataclasses import dataclass
from pathlib import Path

from . import engine, metrics, wire
from .domain import BlockType, ConfigError, EnvConfig, TaskName, TaskSpec, ToolLibrary, ToolSpec
from .oracle import ReferenceEpisode, greedy_trajectory, segmented_gt, shortest_path_gt
from .policies import BUILTIN_POLICIES, make_policy
from .prompt import render_system_prompt
from .querygen import PreferenceSpace, Query, build_queries, load_preference_space
from .toolgen import assign_costs, enumerate_tools

FORMAT_VERSION = 1
PACKAGE_VERSION = "0.1.0"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


# -- instances -------------------------------------------------------------


@dataclass
class Instance:
    config: EnvConfig
    query: Query
    library: ToolLibrary
    gt_answer: str
    static_gt_names: tuple[str, ...]
    static_gt_cost_cents: int
    greedy_names: tuple[str, ...]
    greedy_cost_cents: int
    reference: ReferenceEpisode | None


def config_to_dict(config: EnvConfig) -> dict:
    return {
        "global_seed": config.global_seed,
        "sequence_length": config.sequence_length,
        "c_min_cents": config.c_min_cents,
        "c_max_cents": config.c_max_cents,
        "noise_std": config.noise_std,
        "max_turns": config.max_turns,
        "block_type": config.block_type.value,
        "block_count": config.block_count,
        "seed_interval": config.seed_interval,
    }


def config_from_dict(data: dict) -> EnvConfig:
    return EnvConfig(
        global_seed=data["global_seed"],
        sequence_length=data["sequence_length"],
        c_min_cents=data["c_min_cents"],
        c_max_cents=data["c_max_cents"],
        noise_std=data["noise_std"],
        max_turns=data["max_turns"],
        block_type=BlockType(data["block_type"]),
        block_count=data["block_count"],
        seed_interval=data["seed_interval"],
    )


def build_instance(config: EnvConfig, query: Query,
                   space: PreferenceSpace) -> Instance:
    task = TaskSpec(query.task, config.sequence_length)
    library = assign_costs(enumerate_tools(task), config, query.query_id)
    static_gt = shortest_path_gt(library)
    greedy = greedy_trajectory(library)
    reference = None
    if config.block_count > 0:
        reference = segmented_gt(config, query, library=library, space=space)
    from .querygen import derive_gt_answer
    return Instance(
        config=config, query=query, library=library,
        gt_answer=derive_gt_answer(config.global_seed, query.query_id, task),
        static_gt_names=static_gt.tool_names,
        static_gt_cost_cents=static_gt.total_cost_cents,
        greedy_names=greedy.tool_names,
        greedy_cost_cents=greedy.total_cost_cents,
        reference=reference,
    )


def instance_to_dict(inst: Instance) -> dict:
    record = {
        "query_id": inst.query.query_id,
        "task": inst.query.task.value,
        "split": inst.query.split,
        "combination": list(inst.query.combination),
        "query_text": inst.query.text,
        "gt_answer": inst.gt_answer,
        "tools": [
            {
                "name": t.name, "span": list(t.span),
                "components": list(t.component_names),
                "inputs": list(t.datatype_inputs),
                "enum_params": list(t.enum_params),
                "output": t.output_kind,
                "cost_cents": t.cost_cents,
                "description": t.description,
            }
            for t in inst.library.tools
        ],
        "static_gt": {"path": list(inst.static_gt_names),
                      "cost_cents": inst.static_gt_cost_cents},
        "greedy": {"path": list(inst.greedy_names),
                   "cost_cents": inst.greedy_cost_cents},
    }
    if inst.reference is not None:
        ref = inst.reference
        record["block"] = {
            "trigger_turns": list(ref.trigger_turns),
            "events": list(ref.events),
            "gt_path": list(ref.trajectory.path_names),
            "gt_cost_cents": ref.trajectory.total_cost_cents,
            "experienced": ref.experienced,
            "final_query_id": ref.final_query_id,
            "gt_answer": ref.gt_answer,
            "turns": ref.turns,
        }
    else:
        record["block"] = None
    return record


def instance_from_dict(record: dict, config: EnvConfig,
                       space: PreferenceSpace) -> tuple[Query, ToolLibrary, dict]:
    """Rebuild the episode inputs of a serialized instance."""
    task_name = TaskName(record["task"])
    task = TaskSpec(task_name, config.sequence_length)
    query = Query(
        query_id=record["query_id"], task=task_name, split=record["split"],
        combination=tuple(record["combination"]), text=record["query_text"],
    )
    tools = tuple(
        ToolSpec(
            name=t["name"], task=task_name, span=tuple(t["span"]),
            component_names=tuple(t["components"]),
            datatype_inputs=tuple(t["inputs"]),
            enum_params=tuple(t["enum_params"]),
            output_kind=t["output"], cost_cents=t["cost_cents"],
            description=t["description"],
        )
        for t in record["tools"]
    )
    return query, ToolLibrary(task=task, tools=tools), record


# -- generation ------------------------------------------------------------


def generate(config: EnvConfig, out_dir: str | Path,
             tasks: list[TaskName] | None = None,
             splits: list[str] | None = None,
             limit: int | None = None) -> dict:
    """Write manifest.json and instances.jsonl; idempotent for a fixed config."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = tasks or list(TaskName)
    splits = splits or ["test"]
    lines: list[str] = []
    counts: dict[str, int] = {}
    relaxations: list[str] = []
    if config.block_type is BlockType.REMOVE_TOOLS:
        # width feasibility depends only on (B, L_max), not on the query
        l_max = config.sequence_length - 1
        if (l_max - 1) // config.block_count - 1 < l_max // 2:
            relaxations.append(
                f"removal interval width relaxed below floor(L_max/2) "
                f"for B={config.block_count}, L_max={l_max}")
    for task_name in tasks:
        space = load_preference_space(task_name)
        for split in splits:
            queries = build_queries(task_name, split, space)
            if limit is not None:
                queries = queries[:limit]
            for query in queries:
                inst = build_instance(config, query, space)
                lines.append(canonical_json(instance_to_dict(inst)))
            counts[f"{task_name.value.lower()}/{split}"] = len(queries)
    manifest = {
        "format": FORMAT_VERSION,
        "package": f"wayfare {PACKAGE_VERSION}",
        "config": config_to_dict(config),
        "tasks": [t.value.lower() for t in tasks],
        "splits": splits,
        "counts": counts,
        "relaxations": sorted(set(relaxations)),
        "validator": "accept-all (built-in stub)",
    }
    (out / "manifest.json").write_text(canonical_json(manifest) + "\n", encoding="utf-8")
    (out / "instances.jsonl").write_text(
        "".join(line + "\n" for line in lines), encoding="utf-8")
    return manifest


def load_run_dir(run_dir: str | Path) -> tuple[EnvConfig, list[dict]]:
    run = Path(run_dir)
    manifest = json.loads((run / "manifest.json").read_text(encoding="utf-8"))
    config = config_from_dict(manifest["config"])
    records = [json.loads(line) for line in
               (run / "instances.jsonl").read_text(encoding="utf-8").splitlines() if line]
    return config, records


# -- episodes --------------------------------------------------------------


def _result_fields(record, obs) -> dict:
    return {
        "validity": record.validity,
        "charged_cents": record.charged_cents,
        "produced": record.produced,
        "redundancy": record.redundancy,
        "messages": obs["messages"],
        "result_text": obs["result"],
    }


def _drive_policy(session: engine.Session, policy) -> list[dict]:
    steps: list[dict] = []
    while session.status == engine.RUNNING:
        action = policy.act(session)
        if action[0] == "answer":
            outcome = engine.submit_answer(session, action[1])
            steps.append({"action": {"type": "final_answer", "token": action[1]},
                          "result": outcome})
        else:
            record, obs = engine.invoke(session, action[1], action[2])
            steps.append({
                "action": {"type": "tool_call", "name": action[1],
                           "arguments": action[2]},
                "result": _result_fields(record, obs),
            })
    return steps


def _session_init_message(session: engine.Session) -> dict:
    obs = engine.observation(session)
    return {
        "type": "session_init",
        "protocol": wire.PROTOCOL_VERSION,
        "query_id": session.query.query_id,
        "task": session.task.task_name.value,
        "split": session.query.split,
        "sequence_length": session.task.sequence_length,
        "query_text": session.query.text,
        "system_prompt": render_system_prompt(session.task),
        "constants": obs["owned"],
        "tools": obs["tools"],
        "cost_table_cents": obs["cost_table"],
        "max_turns": session.config.max_turns,
    }


def _drive_wire(session: engine.Session, argv: list[str],
                timeout: float) -> tuple[list[dict], str | None]:
    """Run an external agent; returns (steps, abort_reason)."""
    agent = wire.SubprocessAgent(argv, timeout=timeout)
    steps: list[dict] = []
    try:
        agent.send(_session_init_message(session))
        while session.status == engine.RUNNING:
            action = wire.parse_action(agent.receive())
            if action[0] == "answer":
                outcome = engine.submit_answer(session, action[1])
                steps.append({"action": {"type": "final_answer", "token": action[1]},
                              "result": outcome})
                agent.send({"type": "session_end", "status": session.status,
                            "reached_goal": session.reached_goal(),
                            "intent_hit": session.intent_hit})
            else:
                record, obs = engine.invoke(session, action[1], action[2])
                steps.append({
                    "action": {"type": "tool_call", "name": action[1],
                               "arguments": action[2]},
                    "result": _result_fields(record, obs),
                })
                if session.status == engine.RUNNING:
                    agent.send({
                        "type": "tool_result",
                        "turn": record.turn,
                        "validity": record.validity,
                        "charged_cents": record.charged_cents,
                        "produced": record.produced,
                        "redundancy": record.redundancy,
                        "messages": obs["messages"],
                        "result_text": obs["result"],
                        "tools": obs["tools"],
                        "cost_table_cents": obs["cost_table"],
                        "owned": obs["owned"],
                        "turns_remaining": obs["turns_remaining"],
                    })
                else:
                    agent.send({"type": "session_end", "status": session.status,
                                "reached_goal": session.reached_goal(),
                                "intent_hit": session.intent_hit})
        return steps, None
    except wire.ProtocolError as exc:
        # aborted episodes count as exhausted, their calls still scored
        if session.status == engine.RUNNING:
            session.status = engine.EXHAUSTED
        return steps, str(exc)
    finally:
        agent.close()


def run_episode(config: EnvConfig, record: dict, agent_spec: str,
                space: PreferenceSpace, timeout: float = 120.0) -> dict:
    """One full episode against a generated instance; returns the transcript."""
    query, library, data = instance_from_dict(record, config, space)
    block = data.get("block")
    fixed = list(block["trigger_turns"]) if block else None
    session = engine.init_session(config, query, library=library, space=space,
                                  fixed_triggers=fixed)
    abort_reason = None
    if agent_spec in BUILTIN_POLICIES:
        steps = _drive_policy(session, make_policy(agent_spec, session))
    elif agent_spec.startswith("cmd:"):
        steps, abort_reason = _drive_wire(session, shlex.split(agent_spec[4:]), timeout)
    else:
        raise ConfigError(f"unknown agent {agent_spec!r}; builtins: {BUILTIN_POLICIES}")

    if block:
        gt_path, gt_cost = tuple(block["gt_path"]), block["gt_cost_cents"]
    else:
        gt_path, gt_cost = tuple(data["static_gt"]["path"]), data["static_gt"]["cost_cents"]
    score = metrics.score_records(
        session.trajectory.records, gt_path, gt_cost,
        query_id=query.query_id,
        reached_goal=session.trajectory.reached_goal,
        answered=session.status == engine.ANSWERED,
        intent_hit=bool(session.intent_hit),
        blocks_experienced=session.block_plan.experienced(),
    )
    return {
        "query_id": query.query_id,
        "agent": agent_spec,
        "steps": steps,
        "status": session.status,
        "abort_reason": abort_reason,
        "reached_goal": session.trajectory.reached_goal,
        "final_answer": session.trajectory.final_answer,
        "intent_hit": session.intent_hit,
        "final_query_id": session.query.query_id,
        "gt_answer": session.gt_answer,
        "events": [
            {"index": e.index, "type": e.block_type.value,
             "trigger_turn": e.trigger_turn, "payload": e.payload,
             "effective": e.effective}
            for e in session.block_plan.fired
        ],
        "gt": {"path": list(gt_path), "cost_cents": gt_cost},
        "score": {
            "reached_goal": score.reached_goal,
            "answered": score.answered,
            "intent_hit": score.intent_hit,
            "agent_path": list(score.agent_path),
            "agent_cost_cents": score.agent_cost_cents,
            "agent_cost_clean_cents": score.agent_cost_clean_cents,
            "total_calls": score.total_calls,
            "invalid_calls": score.invalid_calls,
            "repeated_calls": score.repeated_calls,
            "extra_calls": score.extra_calls,
            "wrong_params_calls": score.wrong_params_calls,
            "inaccessible_calls": score.inaccessible_calls,
            "blocks_experienced": score.blocks_experienced,
        },
    }


def _episode_worker(payload: tuple[str, str, str, float]) -> str:
    config_json, record_json, agent_spec, timeout = payload
    config = config_from_dict(json.loads(config_json))
    record = json.loads(record_json)
    space = load_preference_space(TaskName(record["task"]))
    transcript = run_episode(config, record, agent_spec, space, timeout)
    return canonical_json(transcript)


def run_batch(run_dir: str | Path, agent_spec: str, out_path: str | Path | None = None,
              workers: int = 1, timeout: float = 120.0,
              limit: int | None = None) -> Path:
    """Run every generated instance; transcript order matches instance order."""
    config, records = load_run_dir(run_dir)
    if limit is not None:
        records = records[:limit]
    config_json = canonical_json(config_to_dict(config))
    payloads = [(config_json, canonical_json(r), agent_spec, timeout) for r in records]
    if workers > 1:
        with multiprocessing.Pool(workers) as pool:
            lines = pool.map(_episode_worker, payloads)
    else:
        lines = [_episode_worker(p) for p in payloads]
    safe_agent = agent_spec.replace(":", "_").replace("/", "_").replace(" ", "_")
    out = Path(out_path) if out_path else Path(run_dir) / f"transcripts_{safe_agent}.jsonl"
    out.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return out


# -- evaluation ------------------------------------------------------------


def episode_score_from_transcript(t: dict) -> metrics.EpisodeScore:
    s = t["score"]
    return metrics.EpisodeScore(
        query_id=t["query_id"],
        reached_goal=s["reached_goal"],
        answered=s["answered"],
        intent_hit=s["intent_hit"],
        agent_path=tuple(s["agent_path"]),
        agent_cost_cents=s["agent_cost_cents"],
        agent_cost_clean_cents=s["agent_cost_clean_cents"],
        gt_path=tuple(t["gt"]["path"]),
        gt_cost_cents=t["gt"]["cost_cents"],
        total_calls=s["total_calls"],
        invalid_calls=s["invalid_calls"],
        repeated_calls=s["repeated_calls"],
        extra_calls=s["extra_calls"],
        wrong_params_calls=s["wrong_params_calls"],
        inaccessible_calls=s["inaccessible_calls"],
        blocks_experienced=s["blocks_experienced"],
    )


def evaluate(transcript_path: str | Path, expected_blocks: int = 0,
             out_prefix: str | Path | None = None,
             label: str | None = None) -> metrics.MetricsReport:
    path = Path(transcript_path)
    transcripts = [json.loads(line) for line in
                   path.read_text(encoding="utf-8").splitlines() if line]
    if not transcripts:
        raise ConfigError(f"no transcripts in {path}")
    episodes = [episode_score_from_transcript(t) for t in transcripts]
    report = metrics.aggregate(episodes, expected_blocks=expected_blocks,
                               keep_per_episode=True)
    if out_prefix is not None:
        prefix = Path(out_prefix)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        data = report.as_dict()
        Path(f"{prefix}.json").write_text(canonical_json(data) + "\n", encoding="utf-8")
        Path(f"{prefix}.txt").write_text(
            metrics.render_table(report, label or transcripts[0]["agent"]) + "\n",
            encoding="utf-8")
    return report


# -- replay ----------------------------------------------------------------


def replay_transcript(run_dir: str | Path, transcript: dict) -> None:
    """Re-drive the recorded actions; raises on any divergence."""
    config, records = load_run_dir(run_dir)
    by_id = {r["query_id"]: r for r in records}
    record = by_id.get(transcript["query_id"])
    if record is None:
        raise ConfigError(f"instance {transcript['query_id']} not in run dir")
    space = load_preference_space(TaskName(record["task"]))
    query, library, data = instance_from_dict(record, config, space)
    block = data.get("block")
    fixed = list(block["trigger_turns"]) if block else None
    session = engine.init_session(config, query, library=library, space=space,
                                  fixed_triggers=fixed)
    for step in transcript["steps"]:
        action = step["action"]
        if action["type"] == "final_answer":
            outcome = engine.submit_answer(session, action["token"])
            if outcome != step["result"]:
                raise ConfigError(
                    f"replay diverged on the final answer of {query.query_id}")
        else:
            rec, obs = engine.invoke(session, action["name"], action["arguments"])
            got = _result_fields(rec, obs)
            if canonical_json(got) != canonical_json(step["result"]):
                raise ConfigError(
                    f"replay diverged at turn {rec.turn} of {query.query_id}: "
                    f"{got} != {step['result']}")
    if transcript["abort_reason"] is None and session.status != transcript["status"]:
        raise ConfigError(f"replay ended in {session.status}, "
                          f"recorded {transcript['status']}")


def replay_all(run_dir: str | Path, transcript_path: str | Path) -> int:
    count = 0
    for line in Path(transcript_path).read_text(encoding="utf-8").splitlines():
        if line:
            replay_transcript(run_dir, json.loads(line))
            count += 1
    return count
