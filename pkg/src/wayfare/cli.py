"""Command-line surface: generate, run, eval, oracle, replay.

Exit codes: 0 success, 2 configuration error, 3 wire-protocol violation,
4 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .domain import BlockType, ConfigError, EnvConfig, InternalInvariantError, TaskName, cents
from .metrics import render_table
from .wire import ProtocolError

EXIT_CONFIG, EXIT_PROTOCOL, EXIT_INVARIANT = 2, 3, 4


def _config_from_args(args) -> EnvConfig:
    return EnvConfig(
        global_seed=args.seed,
        sequence_length=args.seq_len,
        c_min_cents=cents(args.c_min),
        c_max_cents=cents(args.c_max),
        noise_std=args.noise_std,
        max_turns=args.max_turns,
        block_type=BlockType(args.block_type),
        block_count=args.blocks,
    )


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=42, help="global seed S")
    p.add_argument("--seq-len", type=int, default=5, help="task sequence length N")
    p.add_argument("--c-min", default="15", help="minimum atomic cost (units)")
    p.add_argument("--c-max", default="25", help="maximum atomic cost (units)")
    p.add_argument("--noise-std", type=float, default=0.1,
                   help="composite cost noise std (sigma)")
    p.add_argument("--max-turns", type=int, default=20)
    p.add_argument("--block-type", default="none",
                   choices=[b.value for b in BlockType])
    p.add_argument("--blocks", type=int, default=0, help="events per episode (B)")


def _tasks_from_arg(arg: str) -> list[TaskName]:
    if arg == "all":
        return list(TaskName)
    return [TaskName(part.strip().capitalize()) for part in arg.split(",")]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="wayfare",
        description="Deterministic travel-planning tool-use environment")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="synthesize instances to a directory")
    _add_config_flags(p)
    p.add_argument("--task", default="all", help="task name(s), comma separated, or 'all'")
    p.add_argument("--split", default="test", choices=["test", "train", "both"])
    p.add_argument("--limit", type=int, default=None, help="cap instances per task/split")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("run", help="run an agent over generated instances")
    p.add_argument("--dir", required=True, help="generated run directory")
    p.add_argument("--agent", required=True,
                   help="builtin (gt-replay|greedy|random|stall) or cmd:'...'")
    p.add_argument("--out", default=None, help="transcript output path")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timeout", type=float, default=120.0,
                   help="per-message timeout for external agents (s)")
    p.add_argument("--limit", type=int, default=None)

    p = sub.add_parser("eval", help="score transcripts into a report")
    p.add_argument("--transcripts", required=True)
    p.add_argument("--expected-blocks", type=int, default=0,
                   help="restrict metrics to episodes with this many events")
    p.add_argument("--out", default=None, help="report path prefix (.json/.txt)")
    p.add_argument("--label", default=None)

    p = sub.add_parser("oracle", help="export oracle trajectories for a run dir")
    p.add_argument("--dir", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("replay", help="verify transcripts replay bit-identically")
    p.add_argument("--dir", required=True)
    p.add_argument("--transcripts", required=True)

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ProtocolError as exc:
        print(f"protocol violation: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except InternalInvariantError as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


def _dispatch(args) -> int:
    if args.command == "generate":
        config = _config_from_args(args)
        splits = ["test", "train"] if args.split == "both" else [args.split]
        manifest = harness.generate(config, args.out,
                                    tasks=_tasks_from_arg(args.task),
                                    splits=splits, limit=args.limit)
        total = sum(manifest["counts"].values())
        print(f"generated {total} instances in {args.out}")
        for key, n in sorted(manifest["counts"].items()):
            print(f"  {key}: {n}")
        return 0

    if args.command == "run":
        out = harness.run_batch(args.dir, args.agent, out_path=args.out,
                                workers=args.workers, timeout=args.timeout,
                                limit=args.limit)
        print(f"transcripts written to {out}")
        return 0

    if args.command == "eval":
        report = harness.evaluate(args.transcripts,
                                  expected_blocks=args.expected_blocks,
                                  out_prefix=args.out, label=args.label)
        print(render_table(report, args.label or "agent"))
        return 0

    if args.command == "oracle":
        config, records = harness.load_run_dir(args.dir)
        out = Path(args.out) if args.out else Path(args.dir) / "oracle.jsonl"
        lines = []
        for r in records:
            entry = {"query_id": r["query_id"],
                     "static_gt": r["static_gt"], "greedy": r["greedy"]}
            if r.get("block"):
                entry["blocked_gt"] = {"path": r["block"]["gt_path"],
                                       "cost_cents": r["block"]["gt_cost_cents"]}
            lines.append(harness.canonical_json(entry))
        out.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        print(f"oracle trajectories written to {out}")
        return 0

    if args.command == "replay":
        count = harness.replay_all(args.dir, args.transcripts)
        print(f"replayed {count} transcripts bit-identically")
        return 0

    raise ConfigError(f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
