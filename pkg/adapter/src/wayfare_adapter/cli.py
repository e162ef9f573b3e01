"""Adapter entry points: wire agent and combination validator."""

from __future__ import annotations

import argparse
import json
import sys

from .agent import run_agent
from .client import AdapterConfig, LiveClient, ReplayClient
from .validator import Undecided, judge_combination


def _build_client(args):
    if args.replay:
        return ReplayClient(args.replay)
    config = AdapterConfig(
        endpoint=args.endpoint, model=args.model,
        temperature=args.temperature, max_tokens=args.max_tokens,
        retries=args.retries,
    )
    return LiveClient(config, record_path=args.record)


def _add_client_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--endpoint", default="http://localhost:8000/v1")
    p.add_argument("--model", default="local-model")
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--max-tokens", type=int, default=16384)
    p.add_argument("--retries", type=int, default=3)
    p.add_argument("--replay", default=None,
                   help="serve canned responses from this cache (no network)")
    p.add_argument("--record", default=None,
                   help="append live responses to this cache file")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="wayfare-adapter")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("agent", help="speak the wire protocol on stdio")
    _add_client_flags(p)

    p = sub.add_parser("validate",
                       help="judge preference combinations from stdin JSONL")
    _add_client_flags(p)
    p.add_argument("--task", required=True)

    args = parser.parse_args(argv)
    client = _build_client(args)

    if args.command == "agent":
        return run_agent(client)

    if args.command == "validate":
        for index, line in enumerate(sys.stdin):
            line = line.strip()
            if not line:
                continue
            combination = json.loads(line)["combination"]
            try:
                keep = judge_combination(client, args.task, combination,
                                         episode=f"validate_{index}")
                verdict = "keep" if keep else "drop"
            except Undecided as exc:
                verdict = f"undecided: {exc}"
            print(json.dumps({"combination": combination, "verdict": verdict},
                             sort_keys=True))
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
