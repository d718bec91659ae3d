"""Data-driven restart criteria over the best-score trajectory.

Two conditions end an iteration. The trajectory of per-step best scores is
z-scored and smoothed by a 1-D GP; a restart fires when the smoothed value
has not improved for ``t_patience`` consecutive steps, or when the smoothed
gain over the last ``t_interval`` steps falls below one standard deviation
(one unit in z-scored terms). Both are invariant to affine rescaling of the
raw scores.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import gp

__all__ = ["StagnationConfig", "TrajectoryState", "Decision", "check_restart"]


@dataclass(frozen=True)
class StagnationConfig:
    t_patience: int = 3
    t_interval: int = 15
    # Warm-up: no restart until this many scores exist, so the smoother has
    # data to work with.
    min_steps: int = 4
    # "iteration" resets the trajectory at each restart; "run" keeps it.
    scope: str = "iteration"

    def __post_init__(self) -> None:
        if self.t_patience < 1:
            raise ValueError("t_patience must be >= 1")
        if self.t_interval < 2:
            raise ValueError("t_interval must be >= 2")
        if self.scope not in ("iteration", "run"):
            raise ValueError("scope must be 'iteration' or 'run'")


@dataclass
class TrajectoryState:
    """Best score at each outer step of the current iteration, plus the
    running count of consecutive non-improving smoothed steps."""

    best_scores: list[float] = field(default_factory=list)
    no_improve_streak: int = 0

    def append(self, score: float) -> None:
        self.best_scores.append(float(score))

    def reset(self) -> None:
        self.best_scores.clear()
        self.no_improve_streak = 0


@dataclass(frozen=True)
class Decision:
    restart: bool
    reason: str | None = None  # "patience" | "interval" when restarting


def check_restart(state: TrajectoryState, cfg: StagnationConfig) -> Decision:
    """Evaluate both criteria after the newest best score was appended.

    Updates ``state.no_improve_streak`` in place. Deterministic: replaying
    the same trajectory yields the same decision at every step.
    """
    n = len(state.best_scores)
    if n < 2:
        return Decision(restart=False)

    smoothed = gp.smooth_trajectory(state.best_scores)

    if smoothed[-1] <= smoothed[-2]:
        state.no_improve_streak += 1
    else:
        state.no_improve_streak = 0

    if n < max(cfg.min_steps, 2):
        return Decision(restart=False)

    if state.no_improve_streak >= cfg.t_patience:
        return Decision(restart=True, reason="patience")

    if n > cfg.t_interval and smoothed[-1] - smoothed[-1 - cfg.t_interval] < 1.0:
        return Decision(restart=True, reason="interval")

    return Decision(restart=False)
