"""Shared fixtures: small instances and arguments helpers."""

import pytest

from wayfare.domain import EnvConfig, TaskName
from wayfare.engine import init_session
from wayfare.policies import build_arguments
from wayfare.querygen import build_queries, load_preference_space


@pytest.fixture(scope="session")
def spaces():
    return {task: load_preference_space(task) for task in TaskName}


@pytest.fixture(scope="session")
def queries(spaces):
    return {task: build_queries(task, "test", spaces[task]) for task in TaskName}


@pytest.fixture
def make_session(spaces, queries):
    def _make(task=TaskName.LOCATION, index=0, **config_kwargs):
        config = EnvConfig(**config_kwargs)
        query = queries[task][index]
        return init_session(config, query, space=spaces[task])
    return _make


@pytest.fixture
def args_for():
    def _args(session, tool_name):
        return build_arguments(session, session.library.by_name[tool_name])
    return _args
