"""Density operators, state vectors and qubit Bloch parametrizations."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidBlochVectorError,
    InvalidStateError,
    NormalizationError,
)
from .operators import DEFAULT_TOL, I2, PAULIS, hermitian, is_psd

__all__ = [
    "StateVector",
    "DensityOperator",
    "BlochVector",
    "pure_state",
    "pure_qubit",
    "mixed_qubit",
    "mixture",
    "partial_trace",
    "bloch_of",
    "basis_state",
    "ket",
    "bell_state",
    "maximally_mixed",
]

# deviations up to this are treated as float drift and renormalized away
RENORM_SLACK = 1e-8


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm vector of complex amplitudes in the computational basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).ravel()
        if a.size == 0 or not np.all(np.isfinite(a)):
            raise InvalidStateError("state vector must be nonempty and finite")
        norm = float(np.linalg.norm(a))
        if abs(norm - 1.0) > RENORM_SLACK:
            raise NormalizationError(f"state vector has norm {norm:.12g}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(a / norm))

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        """Build a state from an arbitrary nonzero vector by rescaling it."""
        a = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(a)
        if norm == 0:
            raise NormalizationError("cannot normalize the zero vector")
        return cls(a / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __len__(self) -> int:
        return self.dim


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive semidefinite, unit-trace operator.

    Traces within 1e-8 of one are renormalized on construction; anything
    further off is rejected, as is any input that fails the PSD test.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = hermitian(self.matrix)
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > RENORM_SLACK:
            raise InvalidStateError(f"density operator has trace {tr:.12g}, expected 1")
        m = m / tr
        if not is_psd(m, DEFAULT_TOL.psd_tol):
            raise InvalidStateError("density operator is not positive semidefinite")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self.matrix, self.matrix).real)


@dataclass(frozen=True)
class BlochVector:
    rx: float
    ry: float
    rz: float

    def __post_init__(self):
        if self.norm > 1 + 1e-10:
            raise InvalidBlochVectorError(f"Bloch vector norm {self.norm:.12g} exceeds 1")

    @property
    def norm(self) -> float:
        return math.sqrt(self.rx**2 + self.ry**2 + self.rz**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.rx, self.ry, self.rz], dtype=float)

    @classmethod
    def polar(cls, length: float, theta: float, phi: float = 0.0) -> "BlochVector":
        """Vector of the given length at polar angle ``theta``, azimuth ``phi``."""
        return cls(
            length * math.sin(theta) * math.cos(phi),
            length * math.sin(theta) * math.sin(phi),
            length * math.cos(theta),
        )


def pure_state(psi: StateVector) -> DensityOperator:
    """Rank-one projector |psi><psi|."""
    a = psi.amplitudes
    return DensityOperator(np.outer(a, a.conj()))


def pure_qubit(theta: float, phi: float = 0.0) -> StateVector:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, angles in radians."""
    return StateVector(
        np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])
    )


def mixed_qubit(r: BlochVector) -> DensityOperator:
    rx, ry, rz = r.rx, r.ry, r.rz
    return DensityOperator(0.5 * (I2 + rx * PAULIS[0] + ry * PAULIS[1] + rz * PAULIS[2]))


def mixture(components: Iterable[tuple[float, StateVector]]) -> DensityOperator:
    """Convex combination of pure states; components need not be orthogonal."""
    components = list(components)
    if not components:
        raise InvalidStateError("mixture needs at least one component")
    dim = components[0][1].dim
    weights = np.array([w for w, _ in components], dtype=float)
    if np.any(weights < 0):
        raise InvalidStateError("mixture weights must be nonnegative")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise InvalidStateError(f"mixture weights sum to {weights.sum():.12g}, expected 1")
    rho = np.zeros((dim, dim), dtype=complex)
    for w, psi in components:
        if psi.dim != dim:
            raise DimensionMismatchError("mixture components have different dimensions")
        rho += w * np.outer(psi.amplitudes, psi.amplitudes.conj())
    return DensityOperator(rho)


def partial_trace(
    rho_ab: DensityOperator, dim_a: int, dim_b: int, keep: Literal["A", "B"] = "A"
) -> DensityOperator:
    """Reduced state of a bipartite operator; index (a, b) flattens to a*dim_b + b."""
    if dim_a * dim_b != rho_ab.dim:
        raise DimensionMismatchError(
            f"{dim_a} x {dim_b} does not factor a state of dimension {rho_ab.dim}"
        )
    t = np.asarray(rho_ab.matrix).reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return DensityOperator(np.einsum("ijkj->ik", t))
    if keep == "B":
        return DensityOperator(np.einsum("ijil->jl", t))
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def bloch_of(rho: DensityOperator) -> BlochVector:
    if rho.dim != 2:
        raise DimensionMismatchError(f"Bloch vector needs a qubit state, got dim {rho.dim}")
    r = [float(np.einsum("ij,ji->", rho.matrix, s).real) for s in PAULIS]
    return BlochVector(*r)


def basis_state(dim: int, index: int) -> StateVector:
    a = np.zeros(dim, dtype=complex)
    a[index] = 1.0
    return StateVector(a)


def ket(bits: str) -> StateVector:
    """Computational basis state from a bit string, e.g. ``ket("01")``."""
    return basis_state(2 ** len(bits), int(bits, 2))


def bell_state() -> StateVector:
    """(|00> + |11>)/sqrt(2)."""
    return StateVector.normalized([1, 0, 0, 1])


def maximally_mixed(dim: int) -> DensityOperator:
    return DensityOperator(np.eye(dim, dtype=complex) / dim)


def _as_density(obj: "DensityOperator | StateVector | Sequence") -> DensityOperator:
    if isinstance(obj, DensityOperator):
        return obj
    if isinstance(obj, StateVector):
        return pure_state(obj)
    return DensityOperator(obj)
