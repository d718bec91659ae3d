"""Restart execution: weight reuse, hyperparameter reinitialization, and
step-size growth.

On a restart the weights outside the best slice are first replaced by copies
of the best slice, the population is resized, then one random half is
reinitialized from scratch while the rest are shrink-perturbed. Independently
of the weight split, one random half of the hyperparameter slots is sampled
uniformly and the rest come from a time-varying GP fitted across restarts:
inputs are the iteration-initial hyperparameters, targets the maximum score
any descendant of that initial member reached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gp
from .records import Member, StepRecord
from .space import HPVector, HyperparameterSpace
from .trainables import Trainable, WeightState

__all__ = [
    "RestartConfig",
    "RestartRecord",
    "shrink_perturb",
    "grow_step",
    "perform_restart",
]


@dataclass(frozen=True)
class RestartConfig:
    shrink: float = 0.2
    perturb: float = 0.1
    weight_reinit_fraction: float = 0.5
    hp_random_fraction: float = 0.5
    meta_beta: float = 4.0
    # "meta_bo" is the default; "global_bo" (auxiliary-surrogate reuse of the
    # latest iteration's fit) and "random" exist as ablation switches.
    hp_strategy: str = "meta_bo"

    def __post_init__(self) -> None:
        for name in ("weight_reinit_fraction", "hp_random_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.shrink < 0 or self.perturb < 0:
            raise ValueError("shrink and perturb must be >= 0")
        if self.hp_strategy not in ("meta_bo", "global_bo", "random"):
            raise ValueError("hp_strategy must be meta_bo, global_bo or random")


@dataclass(frozen=True)
class RestartRecord:
    """Meta-level observation for one finished iteration: each entry pairs an
    iteration-initial hyperparameter vector with the best score achieved by
    any member of its lineage."""

    iteration_index: int
    entries: tuple[tuple[HPVector, float], ...]


def shrink_perturb(
    w: WeightState,
    shrink: float,
    perturb: float,
    trainable: Trainable,
    rng: np.random.Generator,
) -> WeightState:
    """w' = shrink * w + perturb * fresh_init. (1, 0) copies exactly, (0, 1)
    reinitializes."""
    fresh = trainable.fresh_init(rng)
    return WeightState(shrink * w.values + perturb * fresh.values)


def grow_step(step: int, mode: str, initial: int) -> int:
    """Next step size after a restart."""
    if step < 1:
        raise ValueError("step must be >= 1")
    if mode == "exponential":
        return 2 * step
    if mode == "linear":
        return step + initial
    if mode == "constant":
        return step
    raise ValueError(f"unknown step growth mode {mode!r}")


def _meta_bo_suggestions(
    records: list[RestartRecord],
    space: HyperparameterSpace,
    n: int,
    beta: float,
    rng: np.random.Generator,
    n_candidates: int = 1000,
) -> list[HPVector]:
    xs, ts, ys = [], [], []
    for rec in records:
        for hps, achieved in rec.entries:
            xs.append(space.normalize(hps))
            ts.append(float(rec.iteration_index))
            ys.append(achieved)
    model = gp.fit(np.stack(xs), np.array(ts), np.array(ys), rng=rng)
    now = max(r.iteration_index for r in records) + 1
    return gp.suggest_ucb(model, space, now, n, n_candidates=n_candidates, beta=beta, rng=rng)


def _global_bo_suggestions(
    records: list[RestartRecord],
    it_records: list[StepRecord],
    space: HyperparameterSpace,
    n: int,
    beta: float,
    rng: np.random.Generator,
) -> list[HPVector]:
    """Ablation: score past iterations' best initial HPs under a surrogate of
    the latest iteration, fit an auxiliary surrogate on those estimates, and
    pick suggestions by acquisition on it."""
    if not it_records:
        return [space.sample_uniform(rng) for _ in range(n)]
    xs = np.stack([space.normalize(r.hps) for r in it_records])
    ts = np.array([float(r.t) for r in it_records])
    ys = np.array([r.score for r in it_records])
    latest = gp.fit(xs, ts, ys, rng=rng)
    now = float(ts.max())

    aux_x, aux_y = [], []
    for rec in records:
        best_hps, _ = max(rec.entries, key=lambda e: e[1])
        u = space.normalize(best_hps)
        mean, _ = latest.predict(u, now)
        aux_x.append(u)
        aux_y.append(mean)
    aux = gp.fit(
        np.stack(aux_x), np.zeros(len(aux_x)), np.array(aux_y),
        bounds=gp.SMOOTHER_BOUNDS, rng=rng,
    )
    return gp.suggest_ucb(aux, space, 0.0, n, n_candidates=10 * max(n, 1), beta=beta, rng=rng)


def perform_restart(
    pop: list[Member],
    records: list[RestartRecord],
    cfg: RestartConfig,
    space: HyperparameterSpace,
    trainable: Trainable,
    target_size: int,
    rng: np.random.Generator,
    select_fraction: float = 0.25,
    make_id=None,
    it_records: list[StepRecord] | None = None,
) -> list[Member]:
    """Build the next iteration's population of exactly ``target_size``
    members, each its own lineage root with cleared scores.

    ``records`` must already include the iteration that just ended; when it is
    empty every hyperparameter slot is sampled uniformly.
    """
    if not pop:
        raise ValueError("cannot restart an empty population")
    if make_id is None:
        counter = iter(range(10**9, 10**9 + target_size))
        make_id = lambda: next(counter)  # noqa: E731

    ranked = sorted(pop, key=lambda m: (-(m.last_score if m.last_score is not None else -math.inf), m.id))
    k = max(1, math.ceil(select_fraction * len(pop)))
    best = ranked[:k]
    best_ids = {m.id for m in best}

    # Best-slice copying happens before the shrink-perturb/reinit split.
    sources: list[WeightState] = []
    for m in pop:
        if m.id in best_ids:
            sources.append(m.weights.copy())
        else:
            sources.append(best[rng.integers(0, k)].weights.copy())
    while len(sources) < target_size:
        sources.append(best[rng.integers(0, k)].weights.copy())
    sources = sources[:target_size]

    n_reinit = math.ceil(cfg.weight_reinit_fraction * target_size)
    reinit_slots = set(rng.choice(target_size, size=n_reinit, replace=False).tolist())
    weights = []
    for slot, src in enumerate(sources):
        if slot in reinit_slots:
            weights.append(trainable.fresh_init(rng))
        else:
            weights.append(shrink_perturb(src, cfg.shrink, cfg.perturb, trainable, rng))

    # The random/model split for hyperparameters is drawn independently of
    # the weight split.
    n_random = math.ceil(cfg.hp_random_fraction * target_size)
    random_slots = set(rng.choice(target_size, size=n_random, replace=False).tolist())
    n_bo = target_size - n_random
    if not records or n_bo == 0 or cfg.hp_strategy == "random":
        suggestions = [space.sample_uniform(rng) for _ in range(n_bo)]
    elif cfg.hp_strategy == "global_bo":
        suggestions = _global_bo_suggestions(
            records, it_records or [], space, n_bo, cfg.meta_beta, rng
        )
    else:
        suggestions = _meta_bo_suggestions(records, space, n_bo, cfg.meta_beta, rng)

    suggestion_iter = iter(suggestions)
    new_pop = []
    for slot in range(target_size):
        hps = space.sample_uniform(rng) if slot in random_slots else next(suggestion_iter)
        member_id = make_id()
        new_pop.append(
            Member(
                id=member_id,
                hps=hps,
                weights=weights[slot],
                lineage_root=member_id,
                last_score=None,
            )
        )
    return new_pop
