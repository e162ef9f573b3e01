"""Core vocabulary: chains, counts, tokens, config validation."""

import pytest

from wayfare.domain import (
    ConfigError,
    BlockType,
    EnvConfig,
    TaskName,
    TaskSpec,
    ToolCallRecord,
    build_datatype_chain,
    cents,
    fmt_cents,
    make_token,
    token_prefix,
)
from wayfare.toolgen import enumerate_tools


def test_location_chain_n4():
    task = TaskSpec(TaskName.LOCATION, 4)
    assert build_datatype_chain(task) == [
        "LocationPreference", "LocationCandidate_Raw",
        "LocationCandidate_L1", "TravelLocation",
    ]


def test_chain_n5_has_two_refinement_nodes():
    task = TaskSpec(TaskName.LOCATION, 5)
    chain = build_datatype_chain(task)
    assert len(chain) == 5
    assert chain[2:4] == ["LocationCandidate_L1", "LocationCandidate_L2"]


def test_sequence_length_below_four_rejected():
    with pytest.raises(ConfigError):
        TaskSpec(TaskName.DINING, 3)


def test_refinement_steps_derivation():
    assert TaskSpec(TaskName.SHOPPING, 7).refinement_steps == 4


def test_initial_kinds():
    assert TaskSpec(TaskName.LOCATION, 5).initial_kinds == frozenset(
        {"TimeInfo", "UserPreferenceFacts"})
    assert TaskSpec(TaskName.TRANSPORTATION, 5).initial_kinds == frozenset(
        {"TimeInfo", "UserPreferenceFacts", "LocationPreference"})


@pytest.mark.parametrize("n", range(4, 11))
def test_tool_counts(n):
    library = enumerate_tools(TaskSpec(TaskName.ATTRACTION, n))
    atomic = [t for t in library.tools if t.kind == "atomic"]
    composite = [t for t in library.tools if t.kind == "composite"]
    assert len(atomic) == n
    assert len(composite) == n * (n - 1) // 2
    assert len(library.tools) == n * (n + 1) // 2
    assert len(library.visible()) == n * (n + 1) // 2 - 1


@pytest.mark.parametrize("n", range(4, 9))
def test_span_tool_bijection(n):
    library = enumerate_tools(TaskSpec(TaskName.DINING, n))
    spans = {t.span for t in library.tools}
    names = {t.name for t in library.tools}
    expected = {(i, j) for i in range(1, n + 1) for j in range(i, n + 1)}
    assert spans == expected
    assert len(names) == len(library.tools)


def test_token_format():
    task = TaskSpec(TaskName.LOCATION, 4)
    assert make_token("TimeInfo", 0) == "<TimeInfo00000>"
    assert token_prefix(task, "TravelLocation") == "LocationCandidate"
    assert token_prefix(task, "LocationCandidate_Raw") == "LocationCandidate_Raw"


def test_env_config_defaults():
    config = EnvConfig()
    assert config.global_seed == 42
    assert config.c_min_cents == 1500
    assert config.c_max_cents == 2500
    assert config.noise_std == 0.1
    assert config.max_turns == 20
    assert config.sequence_length == 5


def test_env_config_validation():
    with pytest.raises(ConfigError):
        EnvConfig(c_min_cents=3000, c_max_cents=2000)
    with pytest.raises(ConfigError):
        EnvConfig(max_turns=3)
    with pytest.raises(ConfigError):
        EnvConfig(block_count=2)  # no type
    with pytest.raises(ConfigError):
        EnvConfig(block_type=BlockType.BAN_TOOL, block_count=0)


def test_money_round_trip():
    assert cents("20.06") == 2006
    assert cents(15) == 1500
    assert fmt_cents(2006) == "20.06"
    assert fmt_cents(100) == "1.00"


def test_record_invariants():
    with pytest.raises(Exception):
        ToolCallRecord(turn=1, tool_name="x", arguments={}, validity="ok",
                       charged_cents=0, produced="<X00001>", redundancy="none")
    with pytest.raises(Exception):
        ToolCallRecord(turn=1, tool_name="x", arguments={}, validity="wrong_params",
                       charged_cents=5, produced=None, redundancy="none")
