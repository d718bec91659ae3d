from .base import (
    CRASH_FILL,
    Trainable,
    WeightState,
    deserialize_weights,
    is_crashed,
    make_trainable,
    mark_crashed,
    register_trainable,
    serialize_weights,
)
from .learning_curve import LearningCurve
from .quadratic_bowl import QuadraticBowl
from .tiny_mlp import TinyMLP

__all__ = [
    "CRASH_FILL",
    "Trainable",
    "WeightState",
    "deserialize_weights",
    "is_crashed",
    "make_trainable",
    "mark_crashed",
    "register_trainable",
    "serialize_weights",
    "LearningCurve",
    "QuadraticBowl",
    "TinyMLP",
]
