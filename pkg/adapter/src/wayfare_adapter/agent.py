"""Wire-protocol agent loop backed by a chat model.

Reads the environment's JSONL messages on stdin and writes actions on
stdout.  Each model turn sees the current tool declarations (refreshed from
every tool result, so cost changes and removals propagate) and the running
conversation.  The first tool call of a response is forwarded; an
"<answer> ... </answer>" tag terminates the episode.
"""

from __future__ import annotations

import json
import re
import sys

from .client import ModelCallError, ModelResponse
from .schema import translate_schema

# whitespace-tolerant, but nothing other than the token inside the tags
_ANSWER_RE = re.compile(r"<answer>\s*(<[A-Za-z][A-Za-z0-9_]*\d{5}>)\s*</answer>")


def extract_answer(content: str | None) -> str | None:
    if not content:
        return None
    match = _ANSWER_RE.search(content)
    return match.group(1) if match else None


def _initial_messages(init: dict) -> list[dict]:
    constants = ", ".join(init.get("constants", []))
    user = init["query_text"]
    if constants:
        user += f"\n\nProvided session values: {constants}."
    return [
        {"role": "system", "content": init["system_prompt"]},
        {"role": "user", "content": user},
    ]


def _tool_message(result: dict) -> str:
    parts = [result.get("result_text", "")]
    for note in result.get("messages", []):
        parts.append(note.get("text", ""))
    remaining = result.get("turns_remaining")
    if remaining is not None:
        parts.append(f"Turns remaining: {remaining}.")
    return " ".join(p for p in parts if p)


def run_agent(client, reader=None, writer=None) -> int:
    """Drive one episode; returns a process exit code."""
    reader = reader if reader is not None else sys.stdin
    writer = writer if writer is not None else sys.stdout

    def send(message: dict) -> None:
        writer.write(json.dumps(message, sort_keys=True) + "\n")
        writer.flush()

    init_line = reader.readline()
    if not init_line:
        return 1
    init = json.loads(init_line)
    if init.get("type") != "session_init":
        return 1
    episode = init["query_id"]
    messages = _initial_messages(init)
    tools = init["tools"]

    while True:
        try:
            response: ModelResponse = client.complete(
                episode, messages, translate_schema(tools))
        except ModelCallError as exc:
            # never silently truncate: abort loudly and let the harness record it
            print(f"adapter aborted: {exc}", file=sys.stderr)
            return 1

        token = extract_answer(response.content)
        if token is not None:
            send({"type": "final_answer", "token": token})
            reader.readline()  # session_end
            return 0

        if not response.tool_calls:
            # model produced neither a call nor an answer; nothing to forward
            print("adapter aborted: model returned no action", file=sys.stderr)
            return 1

        first = response.tool_calls[0]  # only the first call counts
        messages.append({
            "role": "assistant",
            "content": response.content,
            "tool_calls": [{
                "id": "call_0", "type": "function",
                "function": {"name": first["name"],
                             "arguments": json.dumps(first["arguments"],
                                                     sort_keys=True)},
            }],
        })
        send({"type": "tool_call", "name": first["name"],
              "arguments": first["arguments"]})

        reply_line = reader.readline()
        if not reply_line:
            return 1
        reply = json.loads(reply_line)
        if reply.get("type") == "session_end":
            return 0
        if reply.get("type") != "tool_result":
            return 1
        messages.append({"role": "tool", "tool_call_id": "call_0",
                         "name": first["name"], "content": _tool_message(reply)})
        tools = reply.get("tools", tools)
