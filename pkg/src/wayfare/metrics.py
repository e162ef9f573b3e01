"""Trajectory scoring: cost gap, edit distances, exact match, intent, tool use.

Boundary conditions: cost, path, and intent metrics only count episodes that
reached the goal; path sequences strip the agent's invalid calls (banned
attempts stay, being environment events); the invalid-tool-use ratio counts
every call of every episode.  Blocked runs additionally restrict all metrics
to episodes that experienced the configured number of events.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .domain import ConfigError

INVALID_VALIDITIES = ("wrong_name", "wrong_params", "inaccessible")


def edit_distance(a: list[str] | tuple[str, ...], b: list[str] | tuple[str, ...]) -> int:
    """Levenshtein distance over tool names (insert/delete/substitute)."""
    m, n = len(a), len(b)
    if m == 0:
        return n
    if n == 0:
        return m
    row = list(range(n + 1))
    for i in range(1, m + 1):
        prev, row[0] = row[0], i
        for j in range(1, n + 1):
            cur = row[j]
            row[j] = min(row[j] + 1, row[j - 1] + 1, prev + (a[i - 1] != b[j - 1]))
            prev = cur
    return row[n]


def ned(a: list[str] | tuple[str, ...], b: list[str] | tuple[str, ...]) -> float:
    """Edit distance normalized by the longer sequence, in [0, 1]."""
    longest = max(len(a), len(b))
    if longest == 0:
        raise ValueError("normalized edit distance undefined for two empty sequences")
    return edit_distance(a, b) / longest


@dataclass(frozen=True)
class EpisodeScore:
    """Per-episode inputs to aggregation, independent of engine objects."""

    query_id: str
    reached_goal: bool
    answered: bool
    intent_hit: bool
    agent_path: tuple[str, ...]        # ok + banned attempts, in order
    agent_cost_cents: int              # sum over ok calls
    agent_cost_clean_cents: int        # ok calls minus repeated/extra
    gt_path: tuple[str, ...]
    gt_cost_cents: int
    total_calls: int
    invalid_calls: int
    repeated_calls: int
    extra_calls: int
    wrong_params_calls: int
    inaccessible_calls: int
    blocks_experienced: int = 0


def score_records(records, gt_path: tuple[str, ...], gt_cost_cents: int, *,
                  query_id: str, reached_goal: bool, answered: bool,
                  intent_hit: bool, blocks_experienced: int = 0) -> EpisodeScore:
    """Reduce one episode's ToolCallRecords to an EpisodeScore."""
    agent_path = tuple(r.tool_name for r in records
                       if r.validity in ("ok", "banned_failure"))
    ok = [r for r in records if r.validity == "ok"]
    flagged = sum(r.charged_cents for r in ok if r.redundancy in ("repeated", "extra"))
    wrong = sum(1 for r in records if r.validity in ("wrong_name", "wrong_params"))
    inaccessible = sum(1 for r in records if r.validity == "inaccessible")
    return EpisodeScore(
        query_id=query_id,
        reached_goal=reached_goal,
        answered=answered,
        intent_hit=intent_hit,
        agent_path=agent_path,
        agent_cost_cents=sum(r.charged_cents for r in ok),
        agent_cost_clean_cents=sum(r.charged_cents for r in ok) - flagged,
        gt_path=tuple(gt_path),
        gt_cost_cents=gt_cost_cents,
        total_calls=len(records),
        invalid_calls=wrong + inaccessible,
        repeated_calls=sum(1 for r in ok if r.redundancy == "repeated"),
        extra_calls=sum(1 for r in ok if r.redundancy == "extra"),
        wrong_params_calls=wrong,
        inaccessible_calls=inaccessible,
        blocks_experienced=blocks_experienced,
    )


def cost_gap_cents(episode: EpisodeScore, clean: bool = False) -> int:
    agent = episode.agent_cost_clean_cents if clean else episode.agent_cost_cents
    return agent - episode.gt_cost_cents


@dataclass
class MetricsReport:
    episodes: int
    scored_episodes: int          # after goal/block exclusions
    cost_gap: float | None        # units
    cost_gap_clean: float | None
    aed: float | None
    aned_pct: float | None
    emr_pct: float | None
    uihr_pct: float | None
    itur_pct: float
    repeated_calls: int
    extra_calls: int
    wrong_params_calls: int
    inaccessible_calls: int
    total_calls: int
    per_episode: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        def num(x):
            return None if x is None else round(x, 6)
        return {
            "episodes": self.episodes,
            "scored_episodes": self.scored_episodes,
            "cost_gap": num(self.cost_gap),
            "cost_gap_clean": num(self.cost_gap_clean),
            "aed": num(self.aed),
            "aned_pct": num(self.aned_pct),
            "emr_pct": num(self.emr_pct),
            "uihr_pct": num(self.uihr_pct),
            "itur_pct": num(self.itur_pct),
            "redundant": {"repeated": self.repeated_calls, "extra": self.extra_calls},
            "failures": {"wrong_params": self.wrong_params_calls,
                         "inaccessible": self.inaccessible_calls},
            "total_calls": self.total_calls,
            "per_episode": self.per_episode,
        }


def aggregate(episodes: list[EpisodeScore], expected_blocks: int = 0,
              keep_per_episode: bool = False) -> MetricsReport:
    """Aggregate a batch with the standard exclusion rules."""
    if not episodes:
        raise ConfigError("cannot aggregate an empty batch")
    if expected_blocks > 0:
        pool = [e for e in episodes if e.blocks_experienced >= expected_blocks]
    else:
        pool = list(episodes)
    scored = [e for e in pool if e.reached_goal]

    per_episode: list[dict] = []
    eds, neds, ems, gaps, gaps_clean, hits = [], [], [], [], [], []
    for e in scored:
        d = edit_distance(e.agent_path, e.gt_path)
        eds.append(d)
        neds.append(d / max(len(e.agent_path), len(e.gt_path), 1))
        ems.append(1 if d == 0 else 0)
        gaps.append(cost_gap_cents(e) / 100.0)
        gaps_clean.append(cost_gap_cents(e, clean=True) / 100.0)
        hits.append(1 if (e.answered and e.intent_hit) else 0)
        if keep_per_episode:
            per_episode.append({
                "query_id": e.query_id, "ed": d, "ned": round(neds[-1], 6),
                "em": ems[-1], "cost_gap": round(gaps[-1], 2),
                "cost_gap_clean": round(gaps_clean[-1], 2),
                "intent_hit": hits[-1],
            })

    total_calls = sum(e.total_calls for e in pool)
    invalid = sum(e.invalid_calls for e in pool)

    def mean(xs):
        return sum(xs) / len(xs) if xs else None

    return MetricsReport(
        episodes=len(pool),
        scored_episodes=len(scored),
        cost_gap=mean(gaps),
        cost_gap_clean=mean(gaps_clean),
        aed=mean(eds),
        aned_pct=None if not neds else 100.0 * mean(neds),
        emr_pct=None if not ems else 100.0 * mean(ems),
        uihr_pct=None if not hits else 100.0 * mean(hits),
        itur_pct=0.0 if total_calls == 0 else 100.0 * invalid / total_calls,
        repeated_calls=sum(e.repeated_calls for e in pool),
        extra_calls=sum(e.extra_calls for e in pool),
        wrong_params_calls=sum(e.wrong_params_calls for e in pool),
        inaccessible_calls=sum(e.inaccessible_calls for e in pool),
        total_calls=total_calls,
        per_episode=per_episode,
    )


def render_table(report: MetricsReport, label: str = "agent") -> str:
    """Human-readable summary row matching the standard column set."""
    def f(x, pat="{:.3f}"):
        return "-" if x is None else pat.format(x)
    lines = [
        f"{'Model':24s} {'Cost Gap':>16s} {'AED':>8s} {'ANED (%)':>9s} "
        f"{'EMR (%)':>8s} {'UIHR (%)':>9s} {'ITUR (%)':>9s}",
        f"{label:24s} "
        f"{f(report.cost_gap) + ' (' + f(report.cost_gap_clean) + ')':>16s} "
        f"{f(report.aed):>8s} {f(report.aned_pct, '{:.2f}'):>9s} "
        f"{f(report.emr_pct, '{:.2f}'):>8s} {f(report.uihr_pct, '{:.2f}'):>9s} "
        f"{report.itur_pct:>9.2f}",
        f"episodes={report.episodes} scored={report.scored_episodes} "
        f"calls={report.total_calls} repeated={report.repeated_calls} "
        f"extra={report.extra_calls} wrong_params={report.wrong_params_calls} "
        f"inaccessible={report.inaccessible_calls}",
    ]
    return "\n".join(lines)
