"""Interaction loop: state, classification, redundancy, termination."""

import pytest

from wayfare.domain import ConfigError, TaskName
from wayfare.engine import (
    ANSWERED,
    EXHAUSTED,
    feasible_tools,
    invoke,
    observation,
    submit_answer,
)
from wayfare.planner import shortest_path


def test_initial_state_location(make_session):
    session = make_session(TaskName.LOCATION)
    tokens = {i.token for i in session.state}
    assert tokens == {"<TimeInfo00000>", "<UserPreferenceFacts00000>"}


def test_initial_state_transportation(make_session):
    session = make_session(TaskName.TRANSPORTATION)
    tokens = {i.token for i in session.state}
    assert "<LocationPreference00000>" in tokens
    assert "<TimeInfo00000>" in tokens


def test_feasible_tools_at_start(make_session):
    session = make_session(TaskName.LOCATION, sequence_length=4)
    assert feasible_tools(session) == {
        "Decide_Location_Preference",
        "Location_Preference_and_Search",
        "Location_Full_Planning_to_Step1",
    }


def test_feasible_tools_after_search(make_session, args_for):
    session = make_session(TaskName.LOCATION, sequence_length=4)
    invoke(session, "Location_Preference_and_Search",
           args_for(session, "Location_Preference_and_Search"))
    feasible = feasible_tools(session)
    # spans starting at step 3, plus the always-startable step-1 spans
    assert "Location_Refinement_Step1" in feasible
    assert "Location_Finish_from_Step1_2Steps" in feasible
    assert "Search_Location_Candidates" not in feasible


def test_happy_path_decide(make_session, args_for):
    session = make_session(TaskName.LOCATION)
    record, obs = invoke(session, "Decide_Location_Preference",
                         args_for(session, "Decide_Location_Preference"))
    assert record.validity == "ok"
    assert record.produced == "<LocationPreference00001>"
    assert record.charged_cents > 0
    assert session.turn == 1
    assert "<LocationPreference00001>" in obs["owned"]


def test_unknown_name_is_wrong_name(make_session):
    session = make_session()
    record, _ = invoke(session, "Location_Finish", {})
    assert record.validity == "wrong_name"
    assert record.charged_cents == 0


def test_full_span_tool_not_callable(make_session, args_for):
    session = make_session(TaskName.LOCATION)
    record, _ = invoke(session, "Location_Complete_5Steps_Pipeline", {})
    assert record.validity == "wrong_name"


def test_missing_parameter_is_wrong_params(make_session):
    session = make_session(TaskName.LOCATION)
    record, _ = invoke(session, "Decide_Location_Preference", {})
    assert record.validity == "wrong_params"


def test_bad_enum_value_is_wrong_params(make_session, args_for):
    session = make_session(TaskName.LOCATION)
    args = args_for(session, "Decide_Location_Preference")
    args["LocationCategory"] = "definitely_not_a_category"
    record, _ = invoke(session, "Decide_Location_Preference", args)
    assert record.validity == "wrong_params"


def test_skipping_a_step_is_inaccessible(make_session, args_for):
    # calling the second refinement right after search: the required
    # intermediate kind is simply not owned yet
    session = make_session(TaskName.LOCATION)
    invoke(session, "Location_Preference_and_Search",
           args_for(session, "Location_Preference_and_Search"))
    record, _ = invoke(session, "Location_Refinement_Step2",
                       {"LocationCandidate_L1": "<LocationCandidate_L100001>"})
    assert record.validity == "inaccessible"
    assert record.charged_cents == 0


def test_wrong_token_for_owned_kind_is_wrong_params(make_session, args_for):
    session = make_session(TaskName.LOCATION)
    invoke(session, "Decide_Location_Preference",
           args_for(session, "Decide_Location_Preference"))
    args = args_for(session, "Search_Location_Candidates")
    args["LocationPreference"] = "<LocationPreference00042>"
    record, _ = invoke(session, "Search_Location_Candidates", args)
    assert record.validity == "wrong_params"


def test_exact_token_required_and_accepted(make_session, args_for):
    session = make_session(TaskName.LOCATION)
    invoke(session, "Decide_Location_Preference",
           args_for(session, "Decide_Location_Preference"))
    record, _ = invoke(session, "Search_Location_Candidates",
                       args_for(session, "Search_Location_Candidates"))
    assert record.validity == "ok"
    assert record.produced == "<LocationCandidate_Raw00001>"


def test_repeated_flag_on_overlapping_span(make_session, args_for):
    # re-deriving the preference after a covering composite already ran
    session = make_session(TaskName.ATTRACTION)
    invoke(session, "Attraction_Preference_and_Search",
           args_for(session, "Attraction_Preference_and_Search"))
    record, _ = invoke(session, "Decide_Attraction_Preference",
                       args_for(session, "Decide_Attraction_Preference"))
    assert record.validity == "ok"
    assert record.redundancy == "repeated"


def test_composite_after_atomic_is_repeated(make_session, args_for):
    session = make_session(TaskName.ATTRACTION)
    invoke(session, "Decide_Attraction_Preference",
           args_for(session, "Decide_Attraction_Preference"))
    record, _ = invoke(session, "Attraction_Preference_and_Search",
                       args_for(session, "Attraction_Preference_and_Search"))
    assert record.redundancy == "repeated"


def test_extra_flag_after_goal(make_session, args_for):
    session = make_session(TaskName.LOCATION)
    plan = shortest_path(session.visible_tools(), session.owned_kinds(),
                         session.task.final_kind)
    for name in plan.tool_names:
        invoke(session, name, args_for(session, name))
    assert session.reached_goal()
    record, _ = invoke(session, "Decide_Location_Preference",
                       args_for(session, "Decide_Location_Preference"))
    assert record.redundancy == "extra"


def test_state_monotone_and_cost_accounting(make_session, args_for):
    session = make_session(TaskName.LOCATION)
    seen = set()
    charged = 0
    for name in ("Decide_Location_Preference", "Search_Location_Candidates",
                 "Location_Refinement_Step1"):
        before = {i.token for i in session.state}
        assert seen <= before
        seen = before
        record, _ = invoke(session, name, args_for(session, name))
        charged += record.charged_cents
        assert {i.token for i in session.state} >= before
    assert session.trajectory.total_cost_cents == charged


def test_one_call_per_turn_and_exhaustion(make_session):
    session = make_session(TaskName.LOCATION, max_turns=5)
    for turn in range(5):
        record, _ = invoke(session, "Decide_Location_Preference", {})
        assert record.turn == turn + 1
    assert session.status == EXHAUSTED
    with pytest.raises(ConfigError):
        invoke(session, "Decide_Location_Preference", {})


def test_submit_answer_intent_hit(make_session, args_for):
    session = make_session(TaskName.LOCATION)
    plan = shortest_path(session.visible_tools(), session.owned_kinds(),
                         session.task.final_kind)
    for name in plan.tool_names:
        invoke(session, name, args_for(session, name))
    token = session.final_token()
    assert token == session.gt_answer
    outcome = submit_answer(session, token)
    assert outcome == {"status": ANSWERED, "intent_hit": True}
    with pytest.raises(ConfigError):
        submit_answer(session, token)


def test_wrong_combination_misses_intent(make_session, spaces, args_for):
    session = make_session(TaskName.LOCATION)
    space = spaces[TaskName.LOCATION]
    wrong = tuple(
        next(v for v in space.split_values(dim, "test") if v != actual)
        for dim, actual in zip(("Category", "Tier", "Style", "FeaturePackage"),
                               session.query.combination))
    args = args_for(session, "Decide_Location_Preference")
    for param, value in zip(("LocationCategory", "LocationTier",
                             "LocationStyle", "LocationFeaturePackage"), wrong):
        args[param] = value
    invoke(session, "Decide_Location_Preference", args)
    for name in ("Search_Location_Candidates", "Location_Refinement_Step1",
                 "Location_Refinement_Step2", "Select_Final_Location"):
        record, _ = invoke(session, name, args_for(session, name))
        assert record.validity == "ok"
    token = session.final_token()
    assert token != session.gt_answer
    outcome = submit_answer(session, token)
    assert outcome["intent_hit"] is False


def test_answer_before_goal_is_terminal_miss(make_session):
    session = make_session(TaskName.LOCATION)
    outcome = submit_answer(session, "<LocationCandidate12345>")
    assert outcome["status"] == ANSWERED
    assert session.trajectory.reached_goal is False


def test_observation_contents(make_session):
    session = make_session(TaskName.TRANSPORTATION)
    obs = observation(session)
    assert obs["query_text"] == session.query.text
    assert obs["turn"] == 0
    assert obs["turns_remaining"] == 20
    assert len(obs["tools"]) == 14
    assert set(obs["cost_table"]) == {t["name"] for t in obs["tools"]}
    assert "<TimeInfo00000>" in obs["owned"]


def test_gt_replay_invariant(make_session, args_for):
    # replaying the optimal plan reaches the goal in exactly |plan| turns
    # with no invalid calls
    session = make_session(TaskName.SHOPPING)
    plan = shortest_path(session.visible_tools(), session.owned_kinds(),
                         session.task.final_kind)
    for name in plan.tool_names:
        record, _ = invoke(session, name, args_for(session, name))
        assert record.validity == "ok"
    assert session.reached_goal()
    assert session.turn == len(plan.tool_names)
    assert session.trajectory.total_cost_cents == plan.total_cost_cents
