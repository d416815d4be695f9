"""Optimal binary decision granules for two-hypothesis state discrimination."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, QGCError
from .granules import Effect, membership
from .operators import eig_hermitian, trace_norm
from .states import DensityOperator

__all__ = [
    "BinaryHypothesis",
    "HelstromResult",
    "delta",
    "optimal_granule",
    "success_probability",
    "soft_memberships",
    "helstrom",
]

ZERO_EIG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class BinaryHypothesis:
    rho0: DensityOperator
    rho1: DensityOperator
    pi0: float = 0.5
    pi1: float = 0.5

    def __post_init__(self):
        if self.rho0.dim != self.rho1.dim:
            raise DimensionMismatchError("hypothesis states have different dimensions")
        if not (self.pi0 > 0 and self.pi1 > 0) or abs(self.pi0 + self.pi1 - 1) > 1e-12:
            raise QGCError(f"priors must be positive and sum to 1, got ({self.pi0}, {self.pi1})")

    @property
    def dim(self) -> int:
        return self.rho0.dim

    def swapped(self) -> "BinaryHypothesis":
        return BinaryHypothesis(self.rho1, self.rho0, self.pi1, self.pi0)


@dataclass(frozen=True, eq=False)
class HelstromResult:
    delta: np.ndarray
    optimal_granule: Effect
    optimal_value: float

    @property
    def trace_norm(self) -> float:
        return trace_norm(self.delta)


def delta(h: BinaryHypothesis) -> np.ndarray:
    """Weighted difference ``pi0 rho0 - pi1 rho1``."""
    return h.pi0 * h.rho0.matrix - h.pi1 * h.rho1.matrix


def optimal_granule(h: BinaryHypothesis, tol: float = ZERO_EIG_TOL) -> Effect:
    """Projector onto the strictly positive eigenspaces of the Helstrom operator.

    Eigenvalues with ``|lambda| <= tol * max(1, max|lambda|)`` are treated as
    zero and left out, which makes the returned projector the minimal optimum.
    """
    w, v = eig_hermitian(delta(h))
    scale = max(1.0, float(np.max(np.abs(w))))
    pos = v[:, w > tol * scale]
    return Effect(pos @ pos.conj().T)


def success_probability(h: BinaryHypothesis, e: Effect) -> float:
    """``pi0 Tr(rho0 E) + pi1 Tr(rho1 (I - E))``."""
    if e.dim != h.dim:
        raise DimensionMismatchError("effect and hypothesis dimensions differ")
    accept0 = float(np.einsum("ij,ji->", h.rho0.matrix, e.matrix).real)
    accept1 = float(np.einsum("ij,ji->", h.rho1.matrix, e.matrix).real)
    return h.pi0 * accept0 + h.pi1 * (1.0 - accept1)


def soft_memberships(rho: DensityOperator, e_star: Effect) -> tuple[float, float]:
    mu0 = membership(rho, e_star)
    return mu0, 1.0 - mu0


def helstrom(h: BinaryHypothesis, tol: float = ZERO_EIG_TOL) -> HelstromResult:
    d = delta(h)
    return HelstromResult(
        delta=d,
        optimal_granule=optimal_granule(h, tol),
        optimal_value=0.5 * (1.0 + trace_norm(d)),
    )
