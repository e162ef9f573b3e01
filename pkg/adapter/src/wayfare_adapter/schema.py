"""Tool-schema translation for OpenAI-compatible function calling.

Declarations are a pure format shift: names, descriptions (which carry the
costs), enum values, and required lists pass through exactly.
"""

from __future__ import annotations


class SchemaError(ValueError):
    """A wire tool schema is missing a required field."""


def translate_schema(tools: list[dict]) -> list[dict]:
    """Wire tool schemas -> chat-completions function declarations."""
    declarations = []
    for tool in tools:
        for field in ("name", "description", "parameters"):
            if field not in tool:
                raise SchemaError(f"tool schema missing {field!r}: {tool}")
        declarations.append({
            "type": "function",
            "function": {
                "name": tool["name"],
                "description": tool["description"],
                "parameters": tool["parameters"],
            },
        })
    return declarations


def untranslate_schema(declarations: list[dict]) -> list[dict]:
    """Inverse of translate_schema, used by round-trip checks."""
    tools = []
    for decl in declarations:
        fn = decl.get("function", {})
        tools.append({
            "name": fn["name"],
            "description": fn["description"],
            "parameters": fn["parameters"],
        })
    return tools
