"""Tool library synthesis: names, typed signatures, descriptions, costs.

Atomic names follow the Function_Task_Level scheme (Decide_X_Preference,
Search_X_Candidates, X_Refinement_StepK, Select_Final_X).  Composite names
summarize the covered span; every contiguous sub-span of [1, N] gets a
unique name.  Costs are assigned deterministically per (seed, query, tool):
atomic costs uniform in [c_min, c_max], composite costs the component sum
plus Gaussian noise with std sigma*sqrt(k), clamped at 1.00 and rounded to
cents.
"""

from __future__ import annotations

import math

from .domain import (
    DIMENSIONS,
    LOCATION_PREFERENCE,
    MIN_COST_CENTS,
    TIME_INFO,
    EnvConfig,
    TaskSpec,
    ToolLibrary,
    ToolSpec,
    build_datatype_chain,
)
from .rng import SeededRng, derive_seed

# Filtering dimension stated in each refinement tool's description, by step.
REFINEMENT_DIMENSIONS = {
    1: "availability and seasonal suitability",
    2: "location and accessibility",
    3: "budget compatibility",
    4: "user rating and reputation",
    5: "amenity and service coverage",
    6: "capacity and booking flexibility",
    7: "final shortlist quality",
}


def atomic_name(task: TaskSpec, step: int) -> str:
    t = task.task_name.value
    n = task.sequence_length
    if step == 1:
        return f"Decide_{t}_Preference"
    if step == 2:
        return f"Search_{t}_Candidates"
    if step == n:
        return f"Select_Final_{t}"
    return f"{t}_Refinement_Step{step - 2}"


def composite_name(task: TaskSpec, i: int, j: int) -> str:
    t = task.task_name.value
    n = task.sequence_length
    if i == 1:
        if j == 2:
            return f"{t}_Preference_and_Search"
        if j == n:
            return f"{t}_Complete_{n}Steps_Pipeline"
        return f"{t}_Full_Planning_to_Step{j - 2}"
    if i == 2:
        if j == n:
            return f"{t}_Search_Planning_to_Final"
        return f"{t}_Search_Planning_to_Step{j - 2}"
    if j == n:
        return f"{t}_Finish_from_Step{i - 2}_{n - i + 1}Steps"
    if i == 3:
        return f"{t}_Refine_to_Step{j - 2}"
    return f"{t}_Refine_from_Step{i - 2}_to_Step{j - 2}"


def span_name(task: TaskSpec, i: int, j: int) -> str:
    return atomic_name(task, i) if i == j else composite_name(task, i, j)


def _atomic_inputs(task: TaskSpec, step: int, chain: list[str]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """(datatype inputs, enum params) of the atomic tool at ``step``."""
    t = task.task_name.value
    if step == 1:
        datatypes = (LOCATION_PREFERENCE,) if task.needs_location_preference else ()
        enums = tuple(f"{t}{d}" for d in DIMENSIONS)
        return datatypes, enums
    if step == 2:
        return (chain[0], TIME_INFO), ()
    return (chain[step - 2],), ()


def _span_inputs(task: TaskSpec, i: int, j: int, chain: list[str]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """External inputs of span (i, j): union of step inputs minus chain-internal outputs."""
    internal = {chain[k - 1] for k in range(i, j)}
    datatypes: list[str] = []
    enums: tuple[str, ...] = ()
    for step in range(i, j + 1):
        d, e = _atomic_inputs(task, step, chain)
        for kind in d:
            if kind not in internal and kind not in datatypes:
                datatypes.append(kind)
        if e:
            enums = e
    return tuple(datatypes), enums


def enumerate_tools(task: TaskSpec) -> ToolLibrary:
    """Build the uncosted library: N atomic + N(N-1)/2 composite tools."""
    chain = build_datatype_chain(task)
    n = task.sequence_length
    tools: list[ToolSpec] = []
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            datatypes, enums = _span_inputs(task, i, j, chain)
            components = tuple(atomic_name(task, k) for k in range(i, j + 1)) if j > i else ()
            tools.append(ToolSpec(
                name=span_name(task, i, j),
                task=task.task_name,
                span=(i, j),
                component_names=components,
                datatype_inputs=datatypes,
                enum_params=enums,
                output_kind=chain[j - 1],
            ))
    return ToolLibrary(task=task, tools=tuple(tools))


def _atomic_purpose(task: TaskSpec, step: int) -> str:
    t = task.task_name.value.lower()
    n = task.sequence_length
    if step == 1:
        return (
            f"With this atomic tool, you describe a {t} by choosing its category, tier, "
            f"style, and feature package according to the user requirements. The tool then "
            f"gives you a unique label that represents your exact combination of {t} preferences."
        )
    if step == 2:
        return (
            f"With this atomic tool, you search for {t} candidates that match a given "
            f"preference label within the provided time window and obtain a raw candidate "
            f"collection identifier."
        )
    if step == n:
        return (
            f"With this atomic tool, you pick the single best {t} candidate from the fully "
            f"refined collection and obtain its final identifier."
        )
    level = step - 2
    return (
        f"With this atomic tool, you filter an existing {t} candidate collection. "
        f"Filtered by {REFINEMENT_DIMENSIONS[level]}."
    )


def render_description(tool: ToolSpec, task: TaskSpec, cost_cents: int) -> str:
    cost = f"{cost_cents // 100}.{cost_cents % 100:02d}"
    if tool.kind == "atomic":
        purpose = _atomic_purpose(task, tool.span[0])
        return (
            f"{purpose} This tool has a cost of {cost} units. "
            f"The output type of this tool is {tool.output_kind}."
        )
    components = ", ".join(tool.component_names)
    return (
        f"Runs {components} in sequence. This composite tool has a cost of {cost} units. "
        f"The output type of this tool is {tool.output_kind}."
    )


def atomic_cost_cents(global_seed: int, query_id: str, name: str,
                      c_min_cents: int, c_max_cents: int) -> int:
    rng = SeededRng(derive_seed(global_seed, query_id, name))
    units = rng.uniform(c_min_cents / 100.0, c_max_cents / 100.0)
    return max(MIN_COST_CENTS, math.floor(units * 100 + 0.5))


def composite_cost_cents(component_sum_cents: int, eps_units: float) -> int:
    raw = math.floor(component_sum_cents + eps_units * 100 + 0.5)
    return max(MIN_COST_CENTS, raw)


def assign_costs(library: ToolLibrary, config: EnvConfig, query_id: str,
                 global_seed: int | None = None) -> ToolLibrary:
    """Assign or re-assign every tool cost for one query instance.

    ``global_seed`` overrides the config seed during cost-change events.
    Pure in (seed, query, library, c_min, c_max, sigma).
    """
    seed = config.global_seed if global_seed is None else global_seed
    task = library.task
    costs: dict[str, int] = {}
    for tool in library.tools:
        if tool.kind == "atomic":
            costs[tool.name] = atomic_cost_cents(
                seed, query_id, tool.name, config.c_min_cents, config.c_max_cents)
    for tool in library.tools:
        if tool.kind == "composite":
            rng = SeededRng(derive_seed(seed, query_id, tool.name))
            eps = rng.gauss(config.noise_std * math.sqrt(tool.comp))
            component_sum = sum(costs[c] for c in tool.component_names)
            costs[tool.name] = composite_cost_cents(component_sum, eps)
    descriptions = {
        t.name: render_description(t, task, costs[t.name]) for t in library.tools
    }
    return library.with_costs(costs, descriptions)


def tool_schema(tool: ToolSpec, task: TaskSpec, dimension_values: dict[str, list[str]]) -> dict:
    """Function-calling schema: name, description, parameters, required.

    ``dimension_values`` maps enum parameter names to their allowed values.
    """
    properties: dict[str, dict] = {}
    for kind in tool.datatype_inputs:
        properties[kind] = {
            "type": "string",
            "description": (
                f"A {kind} object identifier obtained from the session context or "
                f"an earlier tool call, passed exactly as given."
            ),
        }
    for param in tool.enum_params:
        values = dimension_values[param]
        properties[param] = {
            "type": "string",
            "enum": list(values),
            "description": (
                f"A {param} enumeration value inferred from the user query. "
                f"Available options: {', '.join(values)}."
            ),
        }
    return {
        "name": tool.name,
        "description": tool.description,
        "parameters": {
            "type": "object",
            "properties": properties,
            "required": list(tool.required_params),
        },
    }
