"""Line-delimited wire protocol for external agents.

The harness speaks schema-versioned JSON messages over the agent process's
standard streams: one ``session_init``, then strictly alternating agent
actions (``tool_call`` or ``final_answer``) and environment ``tool_result``
replies, closed by ``session_end``.  Any framing or schema violation aborts
the episode.

A ``tool_call`` carries either a single ``name``/``arguments`` pair or a
``calls`` list, of which only the first entry counts.
"""

from __future__ import annotations

import json
import selectors
import subprocess

PROTOCOL_VERSION = 1


class ProtocolError(RuntimeError):
    """The agent broke the wire protocol (framing, schema, or ordering)."""


def encode(message: dict) -> str:
    return json.dumps(message, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def decode(line: str) -> dict:
    try:
        message = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"undecodable message: {line[:200]!r}") from exc
    if not isinstance(message, dict) or "type" not in message:
        raise ProtocolError(f"message without a type: {line[:200]!r}")
    return message


def parse_action(message: dict) -> tuple[str, str, dict]:
    """Normalize an agent message to ("call", name, args) or ("answer", token, {}).

    Extra entries in a ``calls`` list are discarded (only the first counts).
    """
    kind = message.get("type")
    if kind == "final_answer":
        token = message.get("token")
        if not isinstance(token, str):
            raise ProtocolError("final_answer without a token string")
        return ("answer", token, {})
    if kind != "tool_call":
        raise ProtocolError(f"unexpected agent message type {kind!r}")
    calls = message.get("calls")
    if calls is not None:
        if not isinstance(calls, list) or not calls:
            raise ProtocolError("tool_call with an empty calls list")
        first = calls[0]
    else:
        first = message
    name = first.get("name")
    arguments = first.get("arguments", {})
    if not isinstance(name, str) or not isinstance(arguments, dict):
        raise ProtocolError("tool_call requires a name and an arguments object")
    return ("call", name, {str(k): str(v) for k, v in arguments.items()})


class SubprocessAgent:
    """One external agent process per episode, JSONL on stdin/stdout."""

    def __init__(self, argv: list[str], timeout: float = 120.0):
        self.timeout = timeout
        self.proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            text=True, bufsize=1)
        self._selector = selectors.DefaultSelector()
        self._selector.register(self.proc.stdout, selectors.EVENT_READ)

    def send(self, message: dict) -> None:
        try:
            self.proc.stdin.write(encode(message) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, ValueError) as exc:
            raise ProtocolError("agent process closed its input") from exc

    def receive(self) -> dict:
        if not self._selector.select(self.timeout):
            raise ProtocolError(f"agent sent nothing within {self.timeout}s")
        line = self.proc.stdout.readline()
        if not line:
            raise ProtocolError("agent process closed its output")
        return decode(line.strip())

    def close(self) -> None:
        try:
            if self.proc.stdin and not self.proc.stdin.closed:
                self.proc.stdin.close()
        except (BrokenPipeError, ValueError):
            pass
        try:
            self.proc.wait(timeout=10)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            self.proc.wait()
        self._selector.close()
