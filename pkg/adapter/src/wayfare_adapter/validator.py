"""LLM-backed commonsense validator for preference combinations.

Implements the strict conflict check as a pluggable judge: the model must
answer exactly **conflict** or **no conflict**.  Anything else (or a
transport failure) leaves the combination undecided rather than silently
kept.
"""

from __future__ import annotations

from .client import ModelCallError

VALIDATION_SYSTEM_PROMPT = (
    "You are a helpful assistant for validating commonsense conflicts in user "
    "queries. Given a set of user requirements, determine whether there are any "
    "commonsense conflicts among them. Apply strict checking: even minor "
    "inconsistencies should be marked as conflicts. Your response must be "
    "either **conflict** or **no conflict**, nothing else."
)


class Undecided(RuntimeError):
    """The judge failed or answered outside the contract."""


def render_requirements(task: str, combination: list[str] | tuple[str, ...]) -> str:
    cat, tier, style, feat = combination
    return (
        f"Task: {task} search. User requirements:\n"
        f"1. I want the {task} category to be '{cat}'.\n"
        f"2. I want the {task} tier to be '{tier}'.\n"
        f"3. I want the {task} style to be '{style}'.\n"
        f"4. I want the {task} features to include '{feat}'."
    )


def judge_combination(client, task: str,
                      combination: list[str] | tuple[str, ...],
                      episode: str = "validator") -> bool:
    """True = keep, False = drop; raises Undecided on any failure."""
    messages = [
        {"role": "system", "content": VALIDATION_SYSTEM_PROMPT},
        {"role": "user", "content": render_requirements(task, combination)},
    ]
    try:
        response = client.complete(episode, messages, tools=None)
    except ModelCallError as exc:
        raise Undecided(f"validator transport failure: {exc}") from exc
    verdict = (response.content or "").strip().lower()
    if "no conflict" in verdict:
        return True
    if "conflict" in verdict:
        return False
    raise Undecided(f"validator answered outside the contract: {verdict!r}")
