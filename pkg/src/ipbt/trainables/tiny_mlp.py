"""Two-layer perceptron with hand-rolled backprop on a seeded blob dataset.

The weight state packs the parameters and their momentum buffers into one
flat vector, so exploit copies and shrink-perturb act on the optimizer state
as well. Evaluation is held-out accuracy. Requires ``learning_rate``,
``momentum`` and ``weight_decay`` dimensions in the search space.
"""

from __future__ import annotations

import numpy as np

from .base import Trainable, WeightState, is_crashed, mark_crashed, register_trainable


@register_trainable
class TinyMLP(Trainable):
    kind = "tiny_mlp"

    sentinel = -1.0

    def __init__(
        self,
        space,
        in_dim: int = 6,
        hidden: int = 12,
        n_classes: int = 3,
        n_train: int = 256,
        n_val: int = 128,
        batch_size: int = 16,
        dataset_seed: int = 7,
        separable: bool = False,
    ):
        if hidden < 1:
            raise ValueError("hidden width must be >= 1")
        if in_dim < 1 or n_classes < 2:
            raise ValueError("need in_dim >= 1 and n_classes >= 2")
        missing = {"learning_rate", "momentum", "weight_decay"} - set(space.names)
        if missing:
            raise ValueError(f"tiny_mlp needs dimensions {sorted(missing)} in the space")
        self.space = space
        self.in_dim = in_dim
        self.hidden = hidden
        self.n_classes = n_classes
        self.batch_size = batch_size
        self.n_params = in_dim * hidden + hidden + hidden * n_classes + n_classes

        rng = np.random.default_rng(np.random.SeedSequence(dataset_seed))
        spread = 4.0 if separable else 1.4
        noise = 0.4 if separable else 1.0
        centers = rng.normal(0.0, 1.0, (n_classes, in_dim))
        centers *= spread / np.linalg.norm(centers, axis=1, keepdims=True)

        def make_split(n):
            labels = rng.integers(0, n_classes, n)
            points = centers[labels] + noise * rng.normal(0.0, 1.0, (n, in_dim))
            return points, labels

        self.x_train, self.y_train = make_split(n_train)
        self.x_val, self.y_val = make_split(n_val)

    @property
    def sentinel_score(self) -> float:
        return self.sentinel

    # -- parameter packing ---------------------------------------------------

    def _unpack(self, params: np.ndarray):
        i, h, c = self.in_dim, self.hidden, self.n_classes
        ofs = 0
        w1 = params[ofs : ofs + i * h].reshape(i, h)
        ofs += i * h
        b1 = params[ofs : ofs + h]
        ofs += h
        w2 = params[ofs : ofs + h * c].reshape(h, c)
        ofs += h * c
        b2 = params[ofs : ofs + c]
        return w1, b1, w2, b2

    def loss_and_grad(self, params: np.ndarray, x: np.ndarray, y: np.ndarray):
        """Mean cross-entropy and its gradient on a batch (no weight decay)."""
        w1, b1, w2, b2 = self._unpack(params)
        hidden = np.tanh(x @ w1 + b1)
        logits = hidden @ w2 + b2
        logits -= logits.max(axis=1, keepdims=True)
        exps = np.exp(logits)
        probs = exps / exps.sum(axis=1, keepdims=True)
        n = x.shape[0]
        loss = -float(np.mean(np.log(probs[np.arange(n), y] + 1e-300)))

        dlogits = probs.copy()
        dlogits[np.arange(n), y] -= 1.0
        dlogits /= n
        dw2 = hidden.T @ dlogits
        db2 = dlogits.sum(axis=0)
        dhidden = dlogits @ w2.T
        dz1 = dhidden * (1.0 - hidden * hidden)
        dw1 = x.T @ dz1
        db1 = dz1.sum(axis=0)
        grad = np.concatenate([dw1.ravel(), db1, dw2.ravel(), db2])
        return loss, grad

    # -- trainable interface ---------------------------------------------------

    def fresh_init(self, rng: np.random.Generator) -> WeightState:
        i, h, c = self.in_dim, self.hidden, self.n_classes
        w1 = rng.normal(0.0, 1.0 / np.sqrt(i), (i, h))
        w2 = rng.normal(0.0, 1.0 / np.sqrt(h), (h, c))
        params = np.concatenate([w1.ravel(), np.zeros(h), w2.ravel(), np.zeros(c)])
        return WeightState(np.concatenate([params, np.zeros(self.n_params)]))

    def init_std(self) -> np.ndarray:
        """Per-coordinate std of fresh_init (zeros for biases and momentum)."""
        i, h, c = self.in_dim, self.hidden, self.n_classes
        std = np.concatenate(
            [
                np.full(i * h, 1.0 / np.sqrt(i)),
                np.zeros(h),
                np.full(h * c, 1.0 / np.sqrt(h)),
                np.zeros(c),
            ]
        )
        return np.concatenate([std, np.zeros(self.n_params)])

    def train(self, w, h, inner_steps, global_step, rng) -> WeightState:
        if is_crashed(w):
            return w.copy()
        hp = self.space.as_dict(h)
        lr = float(hp["learning_rate"])
        mom = float(hp["momentum"])
        wd = float(hp["weight_decay"])
        params = w.values[: self.n_params].copy()
        velocity = w.values[self.n_params :].copy()
        n = self.x_train.shape[0]
        for _ in range(inner_steps):
            idx = rng.integers(0, n, self.batch_size)
            loss, grad = self.loss_and_grad(params, self.x_train[idx], self.y_train[idx])
            if not np.isfinite(loss):
                return mark_crashed(w.dim)
            grad += wd * params
            velocity = mom * velocity - lr * grad
            params = params + velocity
            if not np.all(np.isfinite(params)):
                return mark_crashed(w.dim)
        return WeightState(np.concatenate([params, velocity]))

    def evaluate(self, w: WeightState) -> float:
        if is_crashed(w):
            return self.sentinel
        w1, b1, w2, b2 = self._unpack(w.values[: self.n_params])
        hidden = np.tanh(self.x_val @ w1 + b1)
        logits = hidden @ w2 + b2
        if not np.all(np.isfinite(logits)):
            return self.sentinel
        return float(np.mean(logits.argmax(axis=1) == self.y_val))
