"""Query construction: preference combinations, rendered text, unique answers.

Each task has four preference dimensions with ten values split 4 test / 6
train, giving 4^4 + 6^4 = 1552 combinations per task.  Query text comes
from a deterministic template (one clause per dimension, values verbatim),
and every datapoint has exactly one correct final-candidate token fixed by
the seed chain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Callable

from .domain import DIMENSIONS, ConfigError, TaskName, TaskSpec, make_token, token_prefix
from .rng import derive_seed

SPLITS = ("test", "train")


class ValidationUndecided(RuntimeError):
    """The external combination validator failed; the combination is undecided."""


@dataclass(frozen=True)
class PreferenceSpace:
    """Per-task dimension values with their split assignment."""

    task: TaskName
    values: dict[str, dict[str, list[str]]]  # dimension -> split -> values

    def split_values(self, dimension: str, split: str) -> list[str]:
        return sorted(self.values[dimension][split])

    def all_values(self, dimension: str) -> list[str]:
        return sorted(self.values[dimension]["test"] + self.values[dimension]["train"])

    def dimension_param_values(self) -> dict[str, list[str]]:
        """Enum parameter name -> full value list (both splits)."""
        return {f"{self.task.value}{d}": self.all_values(d) for d in DIMENSIONS}


def load_preference_space(task: TaskName, path: str | None = None) -> PreferenceSpace:
    """Load a task's preference space from the bundled (or a user) data file."""
    if path is None:
        ref = resources.files("wayfare").joinpath(f"data/prefspace/{task.value.lower()}.json")
        raw = json.loads(ref.read_text(encoding="utf-8"))
    else:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    dims = raw.get("dimensions", {})
    for d in DIMENSIONS:
        if d not in dims:
            raise ConfigError(f"preference space for {task.value} missing dimension {d}")
        test, train = dims[d].get("test", []), dims[d].get("train", [])
        if not test or not train:
            raise ConfigError(f"empty split in dimension {d} for {task.value}")
        if set(test) & set(train):
            raise ConfigError(f"test/train overlap in dimension {d} for {task.value}")
    return PreferenceSpace(task=task, values=dims)


@dataclass(frozen=True)
class Query:
    query_id: str
    task: TaskName
    split: str
    combination: tuple[str, ...]  # (category, tier, style, feature_package)
    text: str


def enumerate_combinations(task: TaskName, split: str,
                           space: PreferenceSpace | None = None) -> list[tuple[str, ...]]:
    """Cartesian product of the split's values, lexicographic order."""
    if split not in SPLITS:
        raise ConfigError(f"unknown split {split!r}")
    space = space or load_preference_space(task)
    pools = [space.split_values(d, split) for d in DIMENSIONS]
    combos: list[tuple[str, ...]] = []
    for cat in pools[0]:
        for tier in pools[1]:
            for style in pools[2]:
                for feat in pools[3]:
                    combos.append((cat, tier, style, feat))
    return combos


def query_id_for(task: TaskName, split: str, index: int) -> str:
    return f"{task.value.lower()}_{split}_{index:04d}"


_TEMPLATES = {
    TaskName.LOCATION: (
        "I am choosing the destination for an upcoming trip. The kind of place I am "
        "after is a {cat}. In terms of scale it should be a {tier}. The overall style "
        "I want is {style}. And the feature package it offers must include {feat}."
    ),
    TaskName.TRANSPORTATION: (
        "I need to sort out how I will travel on my trip. The transportation category "
        "I want is {cat}. The tier I expect is {tier}. My travel style preference is "
        "{style}. And the feature package must include {feat}."
    ),
    TaskName.ACCOMMODATION: (
        "I am booking where to stay for my trip. The accommodation category I want is "
        "a {cat}. The tier should be {tier}. The style I am looking for is {style}. "
        "And the feature package has to include {feat}."
    ),
    TaskName.ATTRACTION: (
        "I am picking an attraction to visit on my trip. The attraction category I "
        "want is a {cat}. Its tier should be {tier}. The experience style I prefer is "
        "{style}. And the feature package must include {feat}."
    ),
    TaskName.DINING: (
        "I am deciding where to eat during my trip. The dining category I want is "
        "{cat}. The tier I have in mind is {tier}. The dining style I prefer is "
        "{style}. And the feature package should include {feat}."
    ),
    TaskName.SHOPPING: (
        "I want to plan the shopping part of my trip. The shopping category I am "
        "after is a {cat}. The tier should be {tier}. My shopping style is {style}. "
        "And the feature package must include {feat}."
    ),
}


def render_query(task: TaskName, combination: tuple[str, ...]) -> str:
    cat, tier, style, feat = combination
    return _TEMPLATES[task].format(cat=cat, tier=tier, style=style, feat=feat)


def build_queries(task: TaskName, split: str,
                  space: PreferenceSpace | None = None,
                  validator: Callable[[tuple[str, ...]], bool] | None = None) -> list[Query]:
    """Enumerate, validate, and render the split's queries with stable ids.

    The default validator keeps everything.  Ids are assigned over the full
    enumeration before filtering, so downstream results stay comparable when
    an external validator drops combinations.
    """
    combos = enumerate_combinations(task, split, space)
    queries: list[Query] = []
    for index, combo in enumerate(combos):
        if validator is not None and not validate_combination(combo, validator):
            continue
        queries.append(Query(
            query_id=query_id_for(task, split, index),
            task=task,
            split=split,
            combination=combo,
            text=render_query(task, combo),
        ))
    return queries


def validate_combination(combination: tuple[str, ...],
                         validator: Callable[[tuple[str, ...]], bool] | None = None) -> bool:
    """Apply the (pluggable) commonsense validator; True means keep.

    A transport failure in an external validator surfaces as
    ``ValidationUndecided`` instead of silently keeping the combination.
    """
    if validator is None:
        return True
    try:
        return bool(validator(combination))
    except Exception as exc:
        raise ValidationUndecided(
            f"validator failed on {combination}: {exc}"
        ) from exc


def derive_gt_answer(global_seed: int, query_id: str, task: TaskSpec) -> str:
    """The unique correct final-candidate token for a datapoint."""
    instance_id = derive_seed(global_seed, query_id, "gt_answer") % 100000
    return make_token(token_prefix(task, task.final_kind), instance_id)


def derive_answer_for_combination(global_seed: int, query_id: str, task: TaskSpec,
                                  combination: tuple[str, ...],
                                  query_combination: tuple[str, ...]) -> str:
    """Token minted when a pipeline built on ``combination`` selects its candidate.

    Matches the ground-truth token exactly when the combination equals the
    query's own; any other combination lands on a different deterministic id.
    """
    if tuple(combination) == tuple(query_combination):
        return derive_gt_answer(global_seed, query_id, task)
    tag = "answer;" + ";".join(combination)
    instance_id = derive_seed(global_seed, query_id, tag) % 100000
    return make_token(token_prefix(task, task.final_kind), instance_id)
