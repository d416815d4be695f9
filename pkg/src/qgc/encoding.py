"""Classical granulation and classical-to-quantum state encodings."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import EncodingError, InvalidParameterError, QGCError
from .operators import tensor
from .states import DensityOperator, StateVector, pure_qubit, pure_state

__all__ = [
    "ClassicalGranule",
    "LabeledDataset",
    "Encoder",
    "classical_memberships",
    "amplitude_encode",
    "angle_encode",
]


@dataclass(frozen=True)
class ClassicalGranule:
    """Fuzzy membership function acting on one scalar feature.

    ``params`` by kind:
      gaussian   -> (center, width), width > 0
      triangular -> (left, peak, right), left <= peak <= right
      table      -> flat (x0, mu0, x1, mu1, ...) with increasing x and mu in [0, 1]
    """

    kind: Literal["gaussian", "triangular", "table"]
    params: tuple[float, ...]
    feature: int = 0

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(v) for v in self.params))
        p = self.params
        if self.kind == "gaussian":
            if len(p) != 2 or not p[1] > 0:
                raise InvalidParameterError(f"gaussian granule needs (center, width>0), got {p}")
        elif self.kind == "triangular":
            if len(p) != 3 or not p[0] <= p[1] <= p[2] or p[0] == p[2]:
                raise InvalidParameterError(f"triangular knots must satisfy left<=peak<=right, got {p}")
        elif self.kind == "table":
            if len(p) < 2 or len(p) % 2:
                raise InvalidParameterError("table granule needs (x, mu) pairs")
            xs, mus = np.array(p[0::2]), np.array(p[1::2])
            if np.any(np.diff(xs) <= 0):
                raise InvalidParameterError("table x values must be strictly increasing")
            if np.any(mus < 0) or np.any(mus > 1):
                raise InvalidParameterError("table memberships must lie in [0, 1]")
        else:
            raise InvalidParameterError(f"unknown granule kind {self.kind!r}")
        if self.feature < 0:
            raise InvalidParameterError("feature index must be nonnegative")

    def __call__(self, value: float) -> float:
        p = self.params
        if self.kind == "gaussian":
            c, w = p
            return math.exp(-((value - c) ** 2) / (2 * w * w))
        if self.kind == "triangular":
            left, peak, right = p
            if value == peak:
                return 1.0
            if value <= left or value >= right:
                return 0.0
            if value < peak:
                return (value - left) / (peak - left)
            return (right - value) / (right - peak)
        return float(np.interp(value, p[0::2], p[1::2]))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": list(self.params), "feature": self.feature}

    @classmethod
    def from_dict(cls, d: dict) -> "ClassicalGranule":
        return cls(d["kind"], tuple(d["params"]), int(d.get("feature", 0)))


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.features, dtype=float))
        y = np.asarray(self.labels, dtype=int).ravel()
        if x.shape[0] == 0 or x.shape[0] != y.size:
            raise QGCError("dataset must be nonempty with one label per row")
        if not np.all(np.isfinite(x)):
            raise QGCError("dataset features must be finite")
        if self.num_classes < 1 or np.any(y < 0) or np.any(y >= self.num_classes):
            raise QGCError("labels out of range for num_classes")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)

    def __len__(self) -> int:
        return self.labels.size

    def __iter__(self):
        return iter(zip(self.features, self.labels))


def classical_memberships(x: Sequence[float], granules: Sequence[ClassicalGranule]) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    out = np.empty(len(granules))
    for i, g in enumerate(granules):
        if g.feature >= x.size:
            raise InvalidParameterError(f"granule {i} reads feature {g.feature} of a {x.size}-vector")
        out[i] = g(float(x[g.feature]))
    return np.clip(out, 0.0, 1.0)


def amplitude_encode(weights: Sequence[float]) -> StateVector:
    """Normalized amplitudes, zero-padded to a power-of-two dimension (at least 2)."""
    w = np.asarray(weights, dtype=float).ravel()
    if w.size == 0 or np.any(w < 0) or not np.all(np.isfinite(w)):
        raise EncodingError("amplitude encoding needs finite nonnegative weights")
    z = float(np.sum(w * w))
    if z == 0.0:
        raise EncodingError("all weights are zero; the encoding is degenerate")
    dim = max(2, 1 << (w.size - 1).bit_length())
    a = np.zeros(dim, dtype=complex)
    a[: w.size] = w / math.sqrt(z)
    return StateVector(a)


def angle_encode(memberships: Sequence[float]) -> StateVector:
    """One qubit per membership: ``mu -> pure_qubit(pi * mu, 0)``, in order."""
    mu = np.asarray(memberships, dtype=float).ravel()
    if mu.size == 0:
        raise EncodingError("angle encoding needs at least one membership")
    if np.any(mu < -1e-12) or np.any(mu > 1 + 1e-12):
        raise EncodingError("angle encoding needs memberships in [0, 1]")
    mu = np.clip(mu, 0.0, 1.0)
    qubits = [pure_qubit(math.pi * m, 0.0).amplitudes.reshape(-1, 1) for m in mu]
    return StateVector(tensor(*qubits).ravel())


@dataclass(frozen=True)
class Encoder:
    """Feature vector -> density operator (granulate, then encode).

    Without granules the raw features are used as the membership vector.
    """

    kind: Literal["amplitude", "angle"] = "amplitude"
    granules: tuple[ClassicalGranule, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in ("amplitude", "angle"):
            raise InvalidParameterError(f"unknown encoder {self.kind!r}")
        object.__setattr__(self, "granules", tuple(self.granules))

    def memberships(self, x) -> np.ndarray:
        if self.granules:
            return classical_memberships(x, self.granules)
        return np.asarray(x, dtype=float).ravel()

    def state_vector(self, x) -> StateVector:
        mu = self.memberships(x)
        return amplitude_encode(mu) if self.kind == "amplitude" else angle_encode(mu)

    def __call__(self, x) -> DensityOperator:
        return pure_state(self.state_vector(x))
