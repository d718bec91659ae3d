"""Trainable contract and weight-state plumbing.

A trainable owns an opaque flat weight vector and exposes three operations:
``fresh_init``, ``train`` (deterministic given the rng), and ``evaluate``
(pure, higher is better). Diverged training is absorbed rather than raised:
the weights are overwritten with a finite crash marker and ``evaluate``
returns the trainable's sentinel score, which is strictly below anything a
live member can achieve, so selection demotes crashed members naturally.
"""

from __future__ import annotations

import struct
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

__all__ = [
    "WeightState",
    "Trainable",
    "make_trainable",
    "register_trainable",
    "serialize_weights",
    "deserialize_weights",
    "CRASH_FILL",
    "is_crashed",
    "mark_crashed",
]

# Finite magnitude that no healthy weight vector reaches; used to flag a
# diverged member inside its (still finite) weight state.
CRASH_FILL = 1e30
_CRASH_THRESHOLD = 1e29

_MAGIC = b"TWS1"


@dataclass
class WeightState:
    """Flat float64 weight vector."""

    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64).ravel()

    @property
    def dim(self) -> int:
        return self.values.size

    def copy(self) -> "WeightState":
        return WeightState(self.values.copy())


def is_crashed(w: WeightState) -> bool:
    return bool(np.any(np.abs(w.values) >= _CRASH_THRESHOLD))


def mark_crashed(dim: int) -> WeightState:
    return WeightState(np.full(dim, CRASH_FILL))


def serialize_weights(kind: str, w: WeightState) -> bytes:
    """Little-endian float64 payload behind a (kind, dim) header."""
    kind_b = kind.encode("utf-8")
    header = _MAGIC + struct.pack("<HI", len(kind_b), w.dim) + kind_b
    return header + w.values.astype("<f8").tobytes()


def deserialize_weights(data: bytes) -> tuple[str, WeightState]:
    if data[:4] != _MAGIC:
        raise ValueError("not a weight-state blob")
    kind_len, dim = struct.unpack("<HI", data[4:10])
    kind = data[10 : 10 + kind_len].decode("utf-8")
    values = np.frombuffer(data[10 + kind_len :], dtype="<f8")
    if values.size != dim:
        raise ValueError("weight-state blob truncated")
    return kind, WeightState(values.copy())


class Trainable(ABC):
    """Weight container plus train/evaluate, safe for concurrent use on
    distinct members."""

    kind: str = ""

    @abstractmethod
    def fresh_init(self, rng: np.random.Generator) -> WeightState: ...

    @abstractmethod
    def train(
        self,
        w: WeightState,
        h,
        inner_steps: int,
        global_step: int,
        rng: np.random.Generator,
    ) -> WeightState: ...

    @abstractmethod
    def evaluate(self, w: WeightState) -> float: ...

    @property
    def sentinel_score(self) -> float:
        return -1e9


_REGISTRY: dict[str, type] = {}


def register_trainable(cls: type) -> type:
    _REGISTRY[cls.kind] = cls
    return cls


def make_trainable(kind: str, space, params: dict | None = None) -> Trainable:
    if kind not in _REGISTRY:
        raise ValueError(f"unknown trainable kind {kind!r}; known: {sorted(_REGISTRY)}")
    return _REGISTRY[kind](space, **(params or {}))
