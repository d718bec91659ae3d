"""Saturating learning curve with a greediness/patience trade-off.

The weight state is a scalar skill following

    skill += rate(x) * (ceiling(x, t) - skill) + noise

per inner step, where x is the trainable's hyperparameter. A larger x trains
faster but caps the ceiling lower, so aggressive settings lead early and
lose over a full horizon; the crossover point depends on the coefficients.
The ceiling penalty can also drift with the global step so the best x moves
during a run.
"""

from __future__ import annotations

import numpy as np

from .base import Trainable, WeightState, register_trainable


@register_trainable
class LearningCurve(Trainable):
    kind = "learning_curve"

    def __init__(
        self,
        space,
        rate_coef: float = 0.05,
        ceil_penalty: float = 0.5,
        ceil_max: float = 1.0,
        noise_std: float = 0.0,
        drift: float = 0.0,
        init_skill_jitter: float = 0.01,
    ):
        if rate_coef <= 0:
            raise ValueError("rate_coef must be > 0")
        if noise_std < 0:
            raise ValueError("noise_std must be >= 0")
        self.space = space
        # Uses the dim named "rate" when present, otherwise the first one.
        self.hp_name = "rate" if "rate" in space.names else space.names[0]
        self.rate_coef = rate_coef
        self.ceil_penalty = ceil_penalty
        self.ceil_max = ceil_max
        self.noise_std = noise_std
        self.drift = drift
        self.init_skill_jitter = init_skill_jitter

    def effective_rate(self, x: float) -> float:
        return float(np.clip(self.rate_coef * max(x, 0.0), 0.0, 0.9))

    def effective_ceiling(self, x: float, global_step: int) -> float:
        penalty = self.ceil_penalty * (1.0 + self.drift * global_step)
        return self.ceil_max * max(0.0, 1.0 - penalty * max(x, 0.0))

    def fresh_init(self, rng: np.random.Generator) -> WeightState:
        return WeightState(np.array([rng.uniform(0.0, self.init_skill_jitter)]))

    def train(self, w, h, inner_steps, global_step, rng) -> WeightState:
        x = float(self.space.as_dict(h)[self.hp_name])
        rate = self.effective_rate(x)
        ceiling = self.effective_ceiling(x, global_step)
        skill = float(w.values[0])
        if self.noise_std > 0.0:
            noise = rng.normal(0.0, self.noise_std, size=inner_steps)
            for k in range(inner_steps):
                skill += rate * (ceiling - skill) + noise[k]
        else:
            for _ in range(inner_steps):
                skill += rate * (ceiling - skill)
        return WeightState(np.array([skill]))

    def evaluate(self, w: WeightState) -> float:
        return float(w.values[0])
