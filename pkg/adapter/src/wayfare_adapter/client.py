"""Chat-completions client with live, record, and replay modes.

Replay mode serves canned responses from a cache file and never touches the
network, which makes adapter runs bit-deterministic.  Record mode performs
live calls and appends every response to the cache for later replay.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path


class ModelCallError(RuntimeError):
    """The model endpoint failed after exhausting retries."""


@dataclass(frozen=True)
class AdapterConfig:
    endpoint: str = "http://localhost:8000/v1"
    model: str = "local-model"
    temperature: float = 0.0
    max_tokens: int = 16384
    retries: int = 3
    retry_wait: float = 2.0
    cache_path: str | None = None
    api_key_env: str = "OPENAI_API_KEY"


@dataclass
class ModelResponse:
    content: str | None
    tool_calls: list[dict] = field(default_factory=list)  # {"name", "arguments"}

    def to_dict(self) -> dict:
        return {"content": self.content, "tool_calls": self.tool_calls}

    @classmethod
    def from_dict(cls, data: dict) -> "ModelResponse":
        return cls(content=data.get("content"),
                   tool_calls=list(data.get("tool_calls", [])))


class ReplayClient:
    """Serves cached responses keyed by episode id, in recorded order."""

    def __init__(self, cache_path: str | Path):
        self._responses: dict[str, list[dict]] = {}
        self._cursor: dict[str, int] = {}
        for line in Path(cache_path).read_text(encoding="utf-8").splitlines():
            if not line:
                continue
            entry = json.loads(line)
            self._responses.setdefault(entry["episode"], []).append(entry["response"])

    def complete(self, episode: str, messages, tools) -> ModelResponse:
        index = self._cursor.get(episode, 0)
        responses = self._responses.get(episode, [])
        if index >= len(responses):
            raise ModelCallError(
                f"replay cache exhausted for {episode} at turn {index}")
        self._cursor[episode] = index + 1
        return ModelResponse.from_dict(responses[index])


class LiveClient:
    """OpenAI-compatible chat completions over HTTP, with retries."""

    def __init__(self, config: AdapterConfig, record_path: str | Path | None = None):
        import httpx  # deferred so replay mode stays dependency-light

        self.config = config
        self._record_path = Path(record_path) if record_path else None
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(config.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        self._http = httpx.Client(base_url=config.endpoint, headers=headers,
                                  timeout=600.0)

    def complete(self, episode: str, messages, tools) -> ModelResponse:
        payload = {
            "model": self.config.model,
            "messages": messages,
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }
        if tools:
            payload["tools"] = tools
            payload["parallel_tool_calls"] = False
        last_error: Exception | None = None
        for attempt in range(self.config.retries):
            try:
                reply = self._http.post("/chat/completions", json=payload)
                reply.raise_for_status()
                response = _parse_completion(reply.json())
                self._record(episode, response)
                return response
            except Exception as exc:  # noqa: BLE001 - retry any transport failure
                last_error = exc
                time.sleep(self.config.retry_wait * (attempt + 1))
        raise ModelCallError(f"model call failed after {self.config.retries} "
                             f"attempts: {last_error}")

    def _record(self, episode: str, response: ModelResponse) -> None:
        if self._record_path is None:
            return
        with self._record_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps({"episode": episode,
                                 "response": response.to_dict()},
                                sort_keys=True) + "\n")


def _parse_completion(data: dict) -> ModelResponse:
    message = data["choices"][0]["message"]
    calls = []
    for tc in message.get("tool_calls") or []:
        fn = tc.get("function", {})
        raw_args = fn.get("arguments", "{}")
        arguments = json.loads(raw_args) if isinstance(raw_args, str) else raw_args
        calls.append({"name": fn.get("name"), "arguments": arguments})
    return ModelResponse(content=message.get("content"), tool_calls=calls)
