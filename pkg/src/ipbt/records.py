"""Run bookkeeping shared by the optimizers and the reporting layer.

Histories are line-delimited JSON, one object per member per outer step, so
partial files from interrupted runs stay readable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .space import HPVector
from .trainables import WeightState

__all__ = [
    "Member",
    "StepRecord",
    "HistoryRow",
    "RestartEvent",
    "BestSnapshot",
    "RunHistory",
    "load_history_rows",
]


@dataclass
class Member:
    """One population slot. ``lineage_root`` is the id of the iteration-initial
    member whose weights seeded this line (through exploit copies)."""

    id: int
    hps: HPVector
    weights: WeightState
    lineage_root: int
    last_score: float | None = None
    scores_by_step: dict[int, float] = field(default_factory=dict)


@dataclass(frozen=True)
class StepRecord:
    """One (member, outer step) observation inside an iteration; the BO
    target is the score change relative to the member slot's previous step."""

    member_id: int
    t: int  # outer-step index within the iteration
    hps: HPVector
    score: float
    score_delta: float


@dataclass(frozen=True)
class HistoryRow:
    step: int  # global outer-step index
    iteration: int
    step_size: int
    member_id: int
    lineage_root: int
    hps: tuple
    score: float
    score_delta: float
    restart_flag: bool


@dataclass(frozen=True)
class RestartEvent:
    step: int
    iteration: int
    reason: str
    old_step_size: int
    new_step_size: int


@dataclass
class BestSnapshot:
    """Checkpoint candidate for best-model selection: taken for every member
    just before a restart and for the final population."""

    score: float
    step: int
    member_id: int
    hps: tuple
    weights: WeightState
    origin: str  # "pre_restart" | "final"


@dataclass
class RunHistory:
    algorithm: str
    seed: int
    budget: int  # configured inner-step budget, in the optimizer's own units
    rows: list[HistoryRow] = field(default_factory=list)
    restarts: list[RestartEvent] = field(default_factory=list)
    step_sizes: list[int] = field(default_factory=list)  # one per iteration
    best_snapshots: list[BestSnapshot] = field(default_factory=list)
    consumed: int = 0
    config: dict = field(default_factory=dict)

    def best(self) -> BestSnapshot:
        if not self.best_snapshots:
            raise ValueError("run produced no snapshots")
        return max(self.best_snapshots, key=lambda s: (s.score, -s.step))

    def best_score_series(self) -> list[tuple[int, int, float, bool]]:
        """(step, step_size, best score at step, restart flag) per outer step."""
        by_step: dict[int, list[HistoryRow]] = {}
        for row in self.rows:
            by_step.setdefault(row.step, []).append(row)
        out = []
        for step in sorted(by_step):
            rows = by_step[step]
            out.append(
                (
                    step,
                    rows[0].step_size,
                    max(r.score for r in rows),
                    any(r.restart_flag for r in rows),
                )
            )
        return out


def row_to_json(row: HistoryRow) -> str:
    return json.dumps(
        {
            "step": row.step,
            "step_size": row.step_size,
            "member_id": row.member_id,
            "lineage_root": row.lineage_root,
            "hps": list(row.hps),
            "score": row.score,
            "restart_flag": row.restart_flag,
        },
        separators=(",", ":"),
    )


def write_history_jsonl(history: RunHistory, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for row in history.rows:
            fh.write(row_to_json(row) + "\n")


def load_history_rows(path) -> list[dict]:
    rows = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows
