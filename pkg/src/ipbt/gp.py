"""Gaussian process regression for drifting objectives.

The kernel is a Matern-5/2 spatial term multiplied by a temporal decay
``(1 - epsilon)^(|t - t'| / 2)``, so observations fade as the time index
moves on. Hyperparameters are chosen by maximizing the log marginal
likelihood with a multi-start coordinate-wise golden-section search, which
is derivative-free and deterministic given the rng.

Targets are standardized internally; predictions are returned in target
units. All spatial inputs are expected in the unit cube.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

__all__ = [
    "KernelParams",
    "ParamBounds",
    "GPModel",
    "GPNumericalError",
    "kernel_value",
    "fit",
    "suggest_ucb",
    "smooth_trajectory",
    "DEFAULT_BOUNDS",
    "SMOOTHER_BOUNDS",
]

_SQRT5 = math.sqrt(5.0)
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

# Diagonal jitter starts at 1e-10 * signal_variance and grows tenfold per
# retry, at most 6 retries.
_JITTER_BASE = 1e-10
_MAX_JITTER_RETRIES = 6


class GPNumericalError(RuntimeError):
    """Cholesky factorization failed even at maximal jitter."""


@dataclass(frozen=True)
class KernelParams:
    signal_variance: float
    lengthscales: tuple[float, ...]
    noise_variance: float
    epsilon: float  # temporal forgetting rate in [0, 1)

    def __post_init__(self) -> None:
        if self.signal_variance <= 0 or self.noise_variance <= 0:
            raise ValueError("variances must be strictly positive")
        if any(ls <= 0 for ls in self.lengthscales):
            raise ValueError("lengthscales must be strictly positive")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")


@dataclass(frozen=True)
class ParamBounds:
    """Search ranges for :func:`fit`. A collapsed range (lo == hi) pins the
    parameter at that value."""

    signal_variance: tuple[float, float] = (0.05, 20.0)
    lengthscale: tuple[float, float] = (0.05, 10.0)
    noise_variance: tuple[float, float] = (1e-6, 1.0)
    epsilon: tuple[float, float] = (1e-3, 0.5)


DEFAULT_BOUNDS = ParamBounds()
# The trajectory smoother encodes time as its spatial input, so the decay
# term is pinned off.
SMOOTHER_BOUNDS = ParamBounds(epsilon=(0.0, 0.0))


def _matern52(sqdist: np.ndarray) -> np.ndarray:
    r = np.sqrt(np.maximum(sqdist, 0.0))
    s = _SQRT5 * r
    return (1.0 + s + (5.0 / 3.0) * sqdist) * np.exp(-s)


def _cross_kernel(
    xa: np.ndarray, ta: np.ndarray, xb: np.ndarray, tb: np.ndarray, p: KernelParams
) -> np.ndarray:
    ls = np.asarray(p.lengthscales, dtype=float)
    diff = (xa[:, None, :] - xb[None, :, :]) / ls
    sqdist = np.einsum("ijk,ijk->ij", diff, diff)
    k = p.signal_variance * _matern52(sqdist)
    if p.epsilon > 0.0:
        k = k * (1.0 - p.epsilon) ** (np.abs(ta[:, None] - tb[None, :]) / 2.0)
    return k


def kernel_value(ax, at: float, bx, bt: float, p: KernelParams) -> float:
    """Covariance between two (unit-vector, time) points."""
    xa = np.atleast_2d(np.asarray(ax, dtype=float))
    xb = np.atleast_2d(np.asarray(bx, dtype=float))
    if xa.shape != xb.shape:
        raise ValueError("kernel inputs must share a dimension")
    return float(_cross_kernel(xa, np.array([at]), xb, np.array([bt]), p)[0, 0])


def _cholesky_with_jitter(K: np.ndarray, signal_variance: float) -> np.ndarray:
    jitter = 0.0
    n = K.shape[0]
    for attempt in range(_MAX_JITTER_RETRIES + 1):
        try:
            return np.linalg.cholesky(K + jitter * np.eye(n) if jitter else K)
        except np.linalg.LinAlgError:
            jitter = _JITTER_BASE * signal_variance if jitter == 0.0 else jitter * 10.0
    raise GPNumericalError("kernel matrix not positive definite at maximal jitter")


class GPModel:
    """Fitted GP. Immutable after construction; prediction is pure."""

    def __init__(
        self,
        params: KernelParams,
        train_x: np.ndarray,
        train_t: np.ndarray,
        train_y: np.ndarray,
        y_mean: float,
        y_std: float,
        degenerate: bool = False,
    ):
        self.params = params
        train_x = np.asarray(train_x, dtype=float)
        if train_x.ndim == 1 and len(train_t) > 0:
            train_x = train_x.reshape(len(train_t), -1)
        self.train_x = train_x
        self.train_t = np.asarray(train_t, dtype=float)
        self.train_y = np.asarray(train_y, dtype=float)  # standardized targets
        self.y_mean = y_mean
        self.y_std = y_std
        self.degenerate = degenerate
        self.chol = None
        self.alpha = None
        if not degenerate and len(self.train_y) > 0:
            K = _cross_kernel(self.train_x, self.train_t, self.train_x, self.train_t, params)
            K[np.diag_indices_from(K)] += params.noise_variance
            self.chol = _cholesky_with_jitter(K, params.signal_variance)
            z = solve_triangular(self.chol, self.train_y, lower=True)
            self.alpha = solve_triangular(self.chol.T, z, lower=False)

    @classmethod
    def prior(cls, params: KernelParams, n_dims: int) -> "GPModel":
        """Model with no observations: prior mean 0, variance = signal."""
        return cls(
            params,
            np.zeros((0, n_dims)),
            np.zeros(0),
            np.zeros(0),
            y_mean=0.0,
            y_std=1.0,
        )

    @classmethod
    def from_data(
        cls, params: KernelParams, x: np.ndarray, t: np.ndarray, y: np.ndarray
    ) -> "GPModel":
        """Condition on data with given kernel params (standardizes targets)."""
        y = np.asarray(y, dtype=float)
        mu = float(np.mean(y))
        sd = float(np.std(y))
        if sd == 0.0:
            # Zero-variance targets: skip standardization, predict the constant.
            return cls(params, x, t, np.zeros_like(y), mu, 1.0, degenerate=True)
        return cls(params, x, t, (y - mu) / sd, mu, sd)

    @property
    def n_train(self) -> int:
        return len(self.train_y)

    def log_marginal_likelihood(self) -> float:
        if self.degenerate or self.n_train == 0:
            raise ValueError("log marginal likelihood needs a non-degenerate fit")
        quad = float(self.train_y @ self.alpha)
        logdet = float(np.sum(np.log(np.diag(self.chol))))
        return -0.5 * quad - logdet - 0.5 * self.n_train * math.log(2.0 * math.pi)

    def predict_batch(self, x: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and latent variance at query points, target units."""
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        if x.ndim == 1:
            x = x.reshape(len(t), -1)
        m = x.shape[0]
        if self.degenerate:
            return np.full(m, self.y_mean), np.zeros(m)
        if self.n_train == 0:
            return np.zeros(m), np.full(m, self.params.signal_variance)
        kxs = _cross_kernel(x, t, self.train_x, self.train_t, self.params)
        mean = kxs @ self.alpha
        v = solve_triangular(self.chol, kxs.T, lower=True)
        var = self.params.signal_variance - np.einsum("ij,ij->j", v, v)
        var = np.maximum(var, 0.0)
        return self.y_mean + self.y_std * mean, (self.y_std**2) * var

    def predict(self, x, t: float) -> tuple[float, float]:
        mean, var = self.predict_batch(np.atleast_2d(np.asarray(x, dtype=float)), np.array([t]))
        return float(mean[0]), float(var[0])


# -- marginal-likelihood fitting --------------------------------------------


def _bounds_vector(bounds: ParamBounds, n_dims: int) -> tuple[np.ndarray, np.ndarray]:
    lo = [bounds.signal_variance[0]] + [bounds.lengthscale[0]] * n_dims
    hi = [bounds.signal_variance[1]] + [bounds.lengthscale[1]] * n_dims
    lo += [bounds.noise_variance[0], bounds.epsilon[0]]
    hi += [bounds.noise_variance[1], bounds.epsilon[1]]
    return np.array(lo, dtype=float), np.array(hi, dtype=float)


def _vector_to_params(theta: np.ndarray, n_dims: int) -> KernelParams:
    return KernelParams(
        signal_variance=float(theta[0]),
        lengthscales=tuple(float(v) for v in theta[1 : 1 + n_dims]),
        noise_variance=float(theta[1 + n_dims]),
        epsilon=float(theta[2 + n_dims]),
    )


def _golden_max(f, lo: float, hi: float, n_evals: int) -> tuple[float, float]:
    """Golden-section maximization of f on [lo, hi]; returns best (x, f(x))
    among the evaluated points."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc >= fd else (d, fd)
    evals = 2
    while evals < n_evals:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
            if fc > best[1]:
                best = (c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
            if fd > best[1]:
                best = (d, fd)
        evals += 1
    return best


def fit(
    x: np.ndarray,
    t: np.ndarray,
    y: np.ndarray,
    *,
    bounds: ParamBounds = DEFAULT_BOUNDS,
    rng: np.random.Generator | None = None,
    n_restarts: int = 8,
    n_iters: int = 50,
    warm_start: KernelParams | None = None,
) -> GPModel:
    """Fit kernel params by multi-start golden-section search on the log
    marginal likelihood, working in log-parameter space.

    ``n_iters`` is the likelihood-evaluation budget per restart, spent in
    round-robin line searches over the free coordinates. ``warm_start``
    replaces one random start.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ValueError("fit requires at least one observation")
    if not np.all(np.isfinite(y)):
        raise ValueError("targets must be finite")
    if x.ndim == 1:
        x = x.reshape(y.size, -1)
    n_dims = x.shape[1]
    if rng is None:
        rng = np.random.default_rng(0)

    sd = float(np.std(y))
    lo, hi = _bounds_vector(bounds, n_dims)
    mid = np.sqrt(np.maximum(lo, 1e-300) * hi)
    mid = np.where(lo == hi, lo, mid)
    if sd == 0.0:
        return GPModel.from_data(_vector_to_params(mid, n_dims), x, t, y)

    y_std = (y - float(np.mean(y))) / sd

    free = hi > lo
    log_lo = np.log(np.maximum(lo, 1e-300))
    log_hi = np.log(np.maximum(hi, 1e-300))

    def mll(theta: np.ndarray) -> float:
        params = _vector_to_params(theta, n_dims)
        K = _cross_kernel(x, t, x, t, params)
        K[np.diag_indices_from(K)] += params.noise_variance
        try:
            L = _cholesky_with_jitter(K, params.signal_variance)
        except GPNumericalError:
            return -np.inf
        z = solve_triangular(L, y_std, lower=True)
        return float(
            -0.5 * z @ z - np.sum(np.log(np.diag(L))) - 0.5 * len(y_std) * math.log(2 * math.pi)
        )

    starts = [mid.copy()]
    if warm_start is not None:
        w = np.array(
            [warm_start.signal_variance, *warm_start.lengthscales, warm_start.noise_variance,
             warm_start.epsilon]
        )
        if len(w) == len(mid):
            starts.append(np.where(free, np.clip(w, lo, hi), lo))
    while len(starts) < max(1, n_restarts):
        u = rng.uniform(size=len(mid))
        theta = np.exp(log_lo + u * (log_hi - log_lo))
        starts.append(np.where(free, theta, lo))

    best_theta, best_f = None, -np.inf
    free_idx = [i for i in range(len(mid)) if free[i]]
    for start in starts[: max(1, n_restarts)]:
        theta = start.copy()
        f_cur = mll(theta)
        budget = max(0, n_iters)
        ci = 0
        while budget > 0 and free_idx:
            j = free_idx[ci % len(free_idx)]
            ci += 1
            n_evals = min(6, budget)
            if n_evals < 2:
                break

            def line(v: float, j=j) -> float:
                trial = theta.copy()
                trial[j] = math.exp(v)
                return mll(trial)

            xj, fj = _golden_max(line, log_lo[j], log_hi[j], n_evals)
            budget -= n_evals
            if fj > f_cur:
                theta[j] = math.exp(xj)
                f_cur = fj
        if f_cur > best_f:
            best_f, best_theta = f_cur, theta.copy()

    if best_theta is None or not np.isfinite(best_f):
        best_theta = mid
    return GPModel.from_data(_vector_to_params(best_theta, n_dims), x, t, y)


def suggest_ucb(
    model: GPModel,
    space,
    now: float,
    n_suggestions: int,
    n_candidates: int = 1000,
    beta: float = 4.0,
    rng: np.random.Generator | None = None,
):
    """Score uniform candidates by mean + sqrt(beta) * std at time ``now``
    and return the top ``n_suggestions`` (stable tie-break by draw order)."""
    if not 1 <= n_suggestions <= n_candidates:
        raise ValueError("need n_candidates >= n_suggestions >= 1")
    if rng is None:
        rng = np.random.default_rng(0)
    candidates = [space.sample_uniform(rng) for _ in range(n_candidates)]
    u = np.stack([space.normalize(c) for c in candidates])
    mean, var = model.predict_batch(u, np.full(n_candidates, float(now)))
    acq = mean + math.sqrt(beta) * np.sqrt(np.maximum(var, 0.0))
    order = np.argsort(-acq, kind="stable")
    return [candidates[i] for i in order[:n_suggestions]]


def smooth_trajectory(
    scores,
    *,
    rng: np.random.Generator | None = None,
    n_restarts: int = 4,
    n_iters: int = 36,
) -> np.ndarray:
    """Z-score the scores (population std) and return the posterior mean of a
    1-D GP over the step index, in z-units. Constant input smooths to zeros."""
    scores = np.asarray(scores, dtype=float)
    n = scores.size
    if n < 2:
        raise ValueError("smoothing needs at least two scores")
    sd = float(np.std(scores))
    if sd == 0.0:
        return np.zeros(n)
    z = (scores - float(np.mean(scores))) / sd
    xs = np.linspace(0.0, 1.0, n).reshape(-1, 1)
    ts = np.zeros(n)
    model = fit(
        xs, ts, z,
        bounds=SMOOTHER_BOUNDS,
        rng=rng if rng is not None else np.random.default_rng(0),
        n_restarts=n_restarts,
        n_iters=n_iters,
    )
    mean, _ = model.predict_batch(xs, ts)
    return mean
