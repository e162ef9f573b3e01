"""Adapter behavior: tag parsing, first-call-only, replay equivalence."""

import json
import subprocess
from pathlib import Path

import pytest

from wayfare_adapter.agent import extract_answer
from wayfare_adapter.client import AdapterConfig, ModelResponse, ReplayClient


def test_answer_tag_accepts_surrounding_whitespace_only():
    assert extract_answer("<answer> <LocationCandidate00042> </answer>") == \
        "<LocationCandidate00042>"
    assert extract_answer("<answer><LocationCandidate00042></answer>") == \
        "<LocationCandidate00042>"
    assert extract_answer("prose before <answer>\n<DiningCandidate12345>\n</answer>") == \
        "<DiningCandidate12345>"
    assert extract_answer("<answer> the answer is <LocationCandidate00042> </answer>") is None
    assert extract_answer("no tags here") is None
    assert extract_answer(None) is None


def test_config_defaults_match_reference_settings():
    config = AdapterConfig()
    assert config.temperature == 0.0
    assert config.max_tokens == 16384


def test_replay_client_is_sequential_and_isolated(tmp_path):
    cache = tmp_path / "cache.jsonl"
    cache.write_text("\n".join([
        json.dumps({"episode": "a", "response": {"content": "one", "tool_calls": []}}),
        json.dumps({"episode": "b", "response": {"content": "theirs", "tool_calls": []}}),
        json.dumps({"episode": "a", "response": {"content": "two", "tool_calls": []}}),
    ]) + "\n")
    client = ReplayClient(cache)
    assert client.complete("a", [], None).content == "one"
    assert client.complete("b", [], None).content == "theirs"
    assert client.complete("a", [], None).content == "two"
    with pytest.raises(Exception):
        client.complete("a", [], None)


def canned(episode, *responses):
    return [json.dumps({"episode": episode, "response": r}) for r in responses]


def run_cli(*args, check=True):
    result = subprocess.run(["wayfare", *args], capture_output=True, text=True)
    if check:
        assert result.returncode == 0, result.stderr
    return result


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("adapter_static")
    run_cli("generate", "--task", "transportation", "--split", "test",
            "--limit", "4", "--out", str(out))
    return out


def build_cache_from_transcripts(transcript_path: Path, cache_path: Path):
    lines = []
    for line in transcript_path.read_text().splitlines():
        t = json.loads(line)
        for step in t["steps"]:
            action = step["action"]
            if action["type"] == "tool_call":
                response = {"content": None, "tool_calls": [
                    {"name": action["name"], "arguments": action["arguments"]}]}
            else:
                response = {"content": f"Finishing. <answer> {action['token']} </answer>",
                            "tool_calls": []}
            lines.append(json.dumps({"episode": t["query_id"], "response": response}))
    cache_path.write_text("\n".join(lines) + "\n")


def strip_agent_field(path: Path) -> list[dict]:
    episodes = []
    for line in path.read_text().splitlines():
        t = json.loads(line)
        t.pop("agent")
        episodes.append(t)
    return episodes


def test_golden_transcript_equivalence(run_dir, tmp_path):
    # driving the engine directly and replaying the same action sequence
    # through the adapter over the wire must be indistinguishable
    direct = Path(run_dir) / "direct.jsonl"
    run_cli("run", "--dir", str(run_dir), "--agent", "gt-replay",
            "--out", str(direct))
    cache = tmp_path / "cache.jsonl"
    build_cache_from_transcripts(direct, cache)
    via = Path(run_dir) / "via_adapter.jsonl"
    run_cli("run", "--dir", str(run_dir),
            "--agent", f"cmd:wayfare-adapter agent --replay {cache}",
            "--out", str(via))
    assert strip_agent_field(direct) == strip_agent_field(via)
    for name in ("direct", "via"):
        run_cli("eval", "--transcripts",
                str(Path(run_dir) / f"{name if name == 'direct' else 'via_adapter'}.jsonl"),
                "--out", str(tmp_path / f"report_{name}"))
    a = json.loads((tmp_path / "report_direct.json").read_text())
    b = json.loads((tmp_path / "report_via.json").read_text())
    assert a == b


def test_blocked_golden_transcript_equivalence(tmp_path):
    blocked = tmp_path / "blocked"
    run_cli("generate", "--task", "attraction", "--split", "test", "--limit", "3",
            "--block-type", "preference_change", "--blocks", "1",
            "--out", str(blocked))
    direct = blocked / "direct.jsonl"
    run_cli("run", "--dir", str(blocked), "--agent", "gt-replay",
            "--out", str(direct))
    cache = tmp_path / "blocked_cache.jsonl"
    build_cache_from_transcripts(direct, cache)
    via = blocked / "via.jsonl"
    run_cli("run", "--dir", str(blocked),
            "--agent", f"cmd:wayfare-adapter agent --replay {cache}",
            "--out", str(via))
    assert strip_agent_field(direct) == strip_agent_field(via)


def test_only_first_tool_call_is_forwarded(run_dir, tmp_path):
    config_line = json.loads((Path(run_dir) / "instances.jsonl")
                             .read_text().splitlines()[0])
    qid = config_line["query_id"]
    combo = config_line["combination"]
    decide_args = {
        "LocationPreference": "<LocationPreference00000>",
        "TransportationCategory": combo[0],
        "TransportationTier": combo[1],
        "TransportationStyle": combo[2],
        "TransportationFeaturePackage": combo[3],
    }
    cache = tmp_path / "multi_cache.jsonl"
    cache.write_text("\n".join(canned(
        qid,
        {"content": None, "tool_calls": [
            {"name": "Decide_Transportation_Preference", "arguments": decide_args},
            {"name": "Search_Transportation_Candidates", "arguments": {}},
        ]},
        {"content": "<answer> <TransportationCandidate00000> </answer>",
         "tool_calls": []},
    )) + "\n")
    out = tmp_path / "multi.jsonl"
    run_cli("run", "--dir", str(run_dir), "--limit", "1",
            "--agent", f"cmd:wayfare-adapter agent --replay {cache}",
            "--out", str(out))
    transcript = json.loads(out.read_text().splitlines()[0])
    calls = [s for s in transcript["steps"] if s["action"]["type"] == "tool_call"]
    assert len(calls) == 1
    assert calls[0]["action"]["name"] == "Decide_Transportation_Preference"
    assert calls[0]["result"]["validity"] == "ok"


def test_model_failure_aborts_episode_loudly(run_dir, tmp_path):
    cache = tmp_path / "empty_cache.jsonl"
    cache.write_text("")  # exhausted immediately
    out = tmp_path / "aborted.jsonl"
    run_cli("run", "--dir", str(run_dir), "--limit", "1",
            "--agent", f"cmd:wayfare-adapter agent --replay {cache}",
            "--out", str(out))
    transcript = json.loads(out.read_text().splitlines()[0])
    assert transcript["status"] == "exhausted"
    assert transcript["abort_reason"]
    assert transcript["steps"] == []
