"""Mixed real/integer hyperparameter search spaces.

A space is an ordered list of dimensions. Log-scaled dimensions keep their
bounds in exponent units (so configs can state e.g. a learning rate range as
``[-6, 0]`` with base 10) and expose native units everywhere else. Every
dimension maps affinely onto [0, 1] in its encoded coordinate, which is the
representation all surrogate models work in.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Dimension", "HyperparameterSpace", "HPVector"]


@dataclass(frozen=True)
class Dimension:
    """One search dimension.

    ``low``/``high`` are in exponent units when ``log_base`` is set, native
    units otherwise. Integer dimensions live on the integer lattice of the
    encoded coordinate: a base-2 integer dim over [8, 10] yields the native
    values {256, 512, 1024}.
    """

    name: str
    kind: str  # "real" | "integer"
    low: float
    high: float
    log_base: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("real", "integer"):
            raise ValueError(f"dimension {self.name!r}: kind must be 'real' or 'integer'")
        if not self.low < self.high:
            raise ValueError(f"dimension {self.name!r}: low must be < high")
        if self.log_base is not None and not self.log_base > 1:
            raise ValueError(f"dimension {self.name!r}: log_base must be > 1")
        if self.kind == "integer" and (
            not float(self.low).is_integer() or not float(self.high).is_integer()
        ):
            raise ValueError(f"dimension {self.name!r}: integer bounds must be integers")

    # -- encoded <-> native -------------------------------------------------

    def encode(self, value: float) -> float:
        """Native value to encoded coordinate (exponent for log dims)."""
        if self.log_base is None:
            return float(value)
        if value <= 0:
            raise ValueError(f"dimension {self.name!r}: log-scaled value must be positive")
        return math.log(value) / math.log(self.log_base)

    def decode(self, encoded: float) -> float | int:
        """Encoded coordinate to native value."""
        if self.log_base is None:
            native = float(encoded)
        else:
            native = float(self.log_base**encoded)
        if self.kind == "integer":
            return int(math.floor(native + 0.5))
        return native

    def contains(self, value: float) -> bool:
        enc = self.encode(value)
        tol = 1e-9 * max(1.0, abs(self.high - self.low))
        return self.low - tol <= enc <= self.high + tol

    def sample(self, rng: np.random.Generator) -> float | int:
        if self.kind == "integer":
            enc = int(rng.integers(int(self.low), int(self.high) + 1))
        else:
            enc = rng.uniform(self.low, self.high)
        return self.decode(enc)


@dataclass(frozen=True)
class HPVector:
    """Hyperparameter values in native units, ordered as the owning space."""

    raw: tuple[float | int, ...]
    space_ref: str

    def __len__(self) -> int:
        return len(self.raw)


@dataclass(frozen=True)
class HyperparameterSpace:
    """Ordered, uniquely named dimensions; the order is the vector order."""

    dims: tuple[Dimension, ...]
    ref: str = field(init=False)

    def __init__(self, dims) -> None:
        dims = tuple(dims)
        names = [d.name for d in dims]
        if len(set(names)) != len(names):
            raise ValueError("dimension names must be unique")
        if not dims:
            raise ValueError("a space needs at least one dimension")
        digest = hashlib.sha256(
            "|".join(f"{d.name}:{d.kind}:{d.low}:{d.high}:{d.log_base}" for d in dims).encode()
        ).hexdigest()[:12]
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "ref", digest)

    @property
    def n_dims(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dims)

    def vector(self, values) -> HPVector:
        """Wrap native values (validated) into an HPVector."""
        values = tuple(values)
        if len(values) != self.n_dims:
            raise ValueError(f"expected {self.n_dims} values, got {len(values)}")
        for d, v in zip(self.dims, values):
            if not d.contains(v):
                raise ValueError(f"value {v!r} outside range of dimension {d.name!r}")
        fixed = tuple(
            int(v) if d.kind == "integer" else float(v) for d, v in zip(self.dims, values)
        )
        return HPVector(raw=fixed, space_ref=self.ref)

    def as_dict(self, v: HPVector) -> dict[str, float | int]:
        self._check_ref(v)
        return dict(zip(self.names, v.raw))

    def _check_ref(self, v: HPVector) -> None:
        if v.space_ref != self.ref:
            raise ValueError("HPVector belongs to a different space")

    def sample_uniform(self, rng: np.random.Generator) -> HPVector:
        """Uniform draw: uniform in exponent for log dims, uniform over the
        integer lattice for integer dims."""
        return HPVector(
            raw=tuple(d.sample(rng) for d in self.dims),
            space_ref=self.ref,
        )

    def normalize(self, v: HPVector) -> np.ndarray:
        """Map to the unit cube; affine in the encoded coordinate.

        Raises ValueError for out-of-range coordinates.
        """
        self._check_ref(v)
        out = np.empty(self.n_dims)
        for i, (d, val) in enumerate(zip(self.dims, v.raw)):
            if not d.contains(val):
                raise ValueError(f"value {val!r} outside range of dimension {d.name!r}")
            out[i] = (d.encode(val) - d.low) / (d.high - d.low)
        return np.clip(out, 0.0, 1.0)

    def denormalize(self, u) -> HPVector:
        """Inverse of :meth:`normalize`; integer dims round to the nearest
        lattice point (ties up) in encoded units before decoding."""
        u = np.asarray(u, dtype=float)
        if u.shape != (self.n_dims,):
            raise ValueError(f"expected shape ({self.n_dims},), got {u.shape}")
        raw = []
        for d, ui in zip(self.dims, u):
            enc = d.low + float(ui) * (d.high - d.low)
            if d.kind == "integer":
                enc = min(max(math.floor(enc + 0.5), int(d.low)), int(d.high))
            raw.append(d.decode(enc))
        return HPVector(raw=tuple(raw), space_ref=self.ref)

    def to_config(self) -> list[dict]:
        return [
            {
                "name": d.name,
                "kind": d.kind,
                "low": d.low,
                "high": d.high,
                **({"log_base": d.log_base} if d.log_base is not None else {}),
            }
            for d in self.dims
        ]

    @classmethod
    def from_config(cls, entries) -> "HyperparameterSpace":
        dims = []
        for e in entries:
            dims.append(
                Dimension(
                    name=e["name"],
                    kind=e["kind"],
                    low=float(e["low"]),
                    high=float(e["high"]),
                    log_base=float(e["log_base"]) if e.get("log_base") is not None else None,
                )
            )
        return cls(dims)
