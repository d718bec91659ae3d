"""Quadratic bowl with drifting curvature.

Gradient descent on L(w) = 0.5 * w' A(t) w with diagonal A whose eigenvalues
grow with the global step, so the largest stable learning rate shrinks as
training progresses. Score is -L(w), floored so crashed members sit strictly
below every live one.
"""

from __future__ import annotations

import numpy as np

from .base import Trainable, WeightState, is_crashed, mark_crashed, register_trainable

_SCORE_FLOOR = 1e8


@register_trainable
class QuadraticBowl(Trainable):
    kind = "quadratic_bowl"

    def __init__(
        self,
        space,
        dim: int = 8,
        curvature_min: float = 1.0,
        curvature_max: float = 10.0,
        curvature_growth: float = 0.0,
        init_scale: float = 1.0,
    ):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if curvature_min <= 0 or curvature_max < curvature_min:
            raise ValueError("need 0 < curvature_min <= curvature_max")
        if curvature_growth < 0:
            raise ValueError("curvature_growth must be >= 0")
        if "learning_rate" not in space.names:
            raise ValueError("quadratic_bowl needs a 'learning_rate' dimension")
        self.space = space
        self.dim = dim
        self.base_curvatures = np.geomspace(curvature_min, curvature_max, dim)
        self.curvature_growth = curvature_growth
        self.init_scale = init_scale

    def curvatures(self, global_step: int) -> np.ndarray:
        return self.base_curvatures * (1.0 + self.curvature_growth * global_step)

    def fresh_init(self, rng: np.random.Generator) -> WeightState:
        return WeightState(self.init_scale * rng.standard_normal(self.dim))

    def train(self, w, h, inner_steps, global_step, rng) -> WeightState:
        if is_crashed(w):
            return w.copy()
        lr = float(self.space.as_dict(h)["learning_rate"])
        lam = self.curvatures(global_step)
        values = w.values.copy()
        factor = 1.0 - lr * lam
        for _ in range(inner_steps):
            values = values * factor
            if not np.all(np.isfinite(values)):
                return mark_crashed(self.dim)
        return WeightState(values)

    def evaluate(self, w: WeightState) -> float:
        if is_crashed(w):
            return self.sentinel_score
        loss = 0.5 * float(self.base_curvatures @ (w.values * w.values))
        if not np.isfinite(loss):
            return self.sentinel_score
        return -min(loss, _SCORE_FLOOR)
