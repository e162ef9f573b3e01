"""Combination enumeration, query rendering, and answer derivation."""

import pytest

from wayfare.domain import TaskName, TaskSpec
from wayfare.querygen import (
    ValidationUndecided,
    build_queries,
    derive_answer_for_combination,
    derive_gt_answer,
    enumerate_combinations,
    load_preference_space,
    query_id_for,
    render_query,
    validate_combination,
)

ALL_TASKS = list(TaskName)


def test_transportation_split_sizes():
    assert len(enumerate_combinations(TaskName.TRANSPORTATION, "test")) == 256
    assert len(enumerate_combinations(TaskName.TRANSPORTATION, "train")) == 1296


@pytest.mark.parametrize("task", ALL_TASKS)
def test_total_combinations_per_task(task):
    total = (len(enumerate_combinations(task, "test"))
             + len(enumerate_combinations(task, "train")))
    assert total == 1552


def test_total_over_six_tasks():
    assert sum(
        len(enumerate_combinations(t, s))
        for t in ALL_TASKS for s in ("test", "train")
    ) == 9312


@pytest.mark.parametrize("task", ALL_TASKS)
def test_split_disjointness(task):
    test_set = set(enumerate_combinations(task, "test"))
    train_set = set(enumerate_combinations(task, "train"))
    assert not (test_set & train_set)


def test_enumeration_order_stable():
    a = enumerate_combinations(TaskName.DINING, "test")
    b = enumerate_combinations(TaskName.DINING, "test")
    assert a == b
    assert a == sorted(a)  # lexicographic


def test_table_dimension_values_present():
    space = load_preference_space(TaskName.TRANSPORTATION)
    assert space.split_values("Category", "test") == ["bus", "car_rental", "flight", "train"]
    assert "luxury_class" in space.split_values("Tier", "test")
    assert "scenic_route" in space.split_values("Style", "test")
    assert "lie_flat_or_sleeper_facility" in space.split_values("FeaturePackage", "test")


def test_query_ids_stable():
    queries = build_queries(TaskName.LOCATION, "test")
    assert queries[0].query_id == "location_test_0000"
    assert queries[-1].query_id == f"location_test_{len(queries) - 1:04d}"


def test_render_query_deterministic_and_injective():
    combos = enumerate_combinations(TaskName.SHOPPING, "test")
    texts = [render_query(TaskName.SHOPPING, c) for c in combos]
    assert texts == [render_query(TaskName.SHOPPING, c) for c in combos]
    assert len(set(texts)) == len(texts)


def test_render_query_differs_only_in_changed_clause():
    a = ("city", "major_metropolis", "historical_and_traditional", "architectural_marvel")
    b = ("city", "major_metropolis", "historical_and_traditional", "museum_district")
    ta = render_query(TaskName.LOCATION, a).split(". ")
    tb = render_query(TaskName.LOCATION, b).split(". ")
    assert len(ta) == len(tb)
    differing = [i for i, (x, y) in enumerate(zip(ta, tb)) if x != y]
    assert len(differing) == 1


def test_validator_stub_keeps_everything():
    assert validate_combination(("a", "b", "c", "d")) is True


def test_external_validator_can_drop():
    dropper = lambda combo: combo[0] != "city"
    assert validate_combination(("city", "x", "y", "z"), dropper) is False
    queries = build_queries(TaskName.LOCATION, "test", validator=dropper)
    assert all(q.combination[0] != "city" for q in queries)
    # ids remain those of the unfiltered enumeration
    full = build_queries(TaskName.LOCATION, "test")
    kept_ids = {q.query_id for q in queries}
    assert kept_ids < {q.query_id for q in full}


def test_validator_failure_surfaces_as_undecided():
    def broken(combo):
        raise ConnectionError("judge endpoint down")
    with pytest.raises(ValidationUndecided):
        validate_combination(("a", "b", "c", "d"), broken)


def test_gt_answer_deterministic_and_formatted():
    task = TaskSpec(TaskName.LOCATION, 5)
    a = derive_gt_answer(42, "location_test_0000", task)
    b = derive_gt_answer(42, "location_test_0000", task)
    assert a == b
    assert a.startswith("<LocationCandidate") and a.endswith(">")
    assert len(a) == len("<LocationCandidate00000>")


def test_gt_answer_changes_with_replacement_query():
    task = TaskSpec(TaskName.LOCATION, 5)
    assert derive_gt_answer(42, "location_test_0000", task) != \
        derive_gt_answer(42, "location_test_0001", task)


def test_answer_for_matching_combination_is_gt():
    task = TaskSpec(TaskName.DINING, 5)
    combo = ("fine_dining", "upscale", "romantic_candlelight", "private_dining_room")
    assert derive_answer_for_combination(42, "q", task, combo, combo) == \
        derive_gt_answer(42, "q", task)
    other = ("street_food", "upscale", "romantic_candlelight", "private_dining_room")
    assert derive_answer_for_combination(42, "q", task, other, combo) != \
        derive_gt_answer(42, "q", task)


def test_query_id_format():
    assert query_id_for(TaskName.ACCOMMODATION, "train", 17) == "accommodation_train_0017"


def test_restricted_dimension_shrinks_product_proportionally():
    from wayfare.querygen import PreferenceSpace
    space = load_preference_space(TaskName.DINING)
    narrowed = {d: {s: list(vs) for s, vs in dims.items()}
                for d, dims in space.values.items()}
    narrowed["Category"]["test"] = [narrowed["Category"]["test"][0]]
    restricted = PreferenceSpace(task=TaskName.DINING, values=narrowed)
    combos = enumerate_combinations(TaskName.DINING, "test", restricted)
    assert len(combos) == 64  # 1 * 4 * 4 * 4
    full = enumerate_combinations(TaskName.DINING, "test")
    kept = [c for c in full if c[0] == narrowed["Category"]["test"][0]]
    assert combos == kept  # ordering stable under restriction
