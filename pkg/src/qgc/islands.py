"""Boolean islands: classical representations of commuting granule families."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, IncompatibleFamilyError, QGCError
from .granules import Effect, membership
from .operators import DEFAULT_TOL, commutator_norm, eig_hermitian
from .states import DensityOperator

__all__ = [
    "ClassicalRepresentation",
    "StateMeasure",
    "is_commuting_family",
    "worst_commutator",
    "boolean_island",
    "measure_for",
]

# fixed seed for the generic linear combination; any seed works almost surely
_COMBINATION_SEED = 20240521
OFFDIAG_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ClassicalRepresentation:
    """Sample space Omega = basis columns, with one [0, 1]-valued function per effect."""

    basis: np.ndarray
    functions: tuple[np.ndarray, ...]

    @property
    def omega_size(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class StateMeasure:
    weights: np.ndarray

    def expectation(self, f: np.ndarray) -> float:
        return float(np.dot(f, self.weights))


def _dims(effects: Sequence[Effect]) -> int:
    if not effects:
        raise QGCError("empty granule family")
    dim = effects[0].dim
    if any(e.dim != dim for e in effects):
        raise DimensionMismatchError("family members have different dimensions")
    return dim


def worst_commutator(effects: Sequence[Effect]) -> tuple[tuple[int, int] | None, float]:
    """Pair with the largest scaled commutator norm, and that (unscaled) norm."""
    _dims(effects)
    worst, worst_scaled, worst_norm = None, -1.0, 0.0
    for i, j in itertools.combinations(range(len(effects)), 2):
        a, b = effects[i].matrix, effects[j].matrix
        c = commutator_norm(a, b)
        scaled = c / max(1.0, np.linalg.norm(a) * np.linalg.norm(b))
        if scaled > worst_scaled:
            worst, worst_scaled, worst_norm = (i, j), scaled, c
    return worst, worst_norm


def is_commuting_family(effects: Sequence[Effect], tol: float = DEFAULT_TOL.commute_tol) -> bool:
    _dims(effects)
    for a, b in itertools.combinations(effects, 2):
        scale = max(1.0, np.linalg.norm(a.matrix) * np.linalg.norm(b.matrix))
        if commutator_norm(a.matrix, b.matrix) > tol * scale:
            return False
    return True


def _offdiag_mass(m: np.ndarray) -> float:
    return float(np.linalg.norm(m - np.diag(np.diag(m))))


def _diagonalizes(v: np.ndarray, effects: Sequence[Effect]) -> bool:
    for e in effects:
        d = v.conj().T @ e.matrix @ v
        if _offdiag_mass(d) > OFFDIAG_TOL * max(1.0, np.linalg.norm(e.matrix)):
            return False
    return True


def _refine(v: np.ndarray, effects: Sequence[Effect]) -> np.ndarray:
    """Split ``span(v)`` by the eigenspaces of each effect in turn."""
    if not effects or v.shape[1] <= 1:
        return v
    head, rest = effects[0], effects[1:]
    w, u = eig_hermitian(v.conj().T @ head.matrix @ v)
    # group numerically equal eigenvalues into eigenspaces
    groups, start = [], 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[k - 1] > 1e-7:
            groups.append(slice(start, k))
            start = k
    cols = [_refine(v @ u[:, g], rest) for g in groups]
    return np.hstack(cols)


def boolean_island(effects: Sequence[Effect]) -> ClassicalRepresentation:
    """Simultaneously diagonalize a commuting family.

    A random linear combination of the family is diagonalized first; if a
    degenerate collision leaves some member non-diagonal, recursive
    eigenspace refinement is used instead.
    """
    dim = _dims(effects)
    if not is_commuting_family(effects):
        pair, norm = worst_commutator(effects)
        raise IncompatibleFamilyError(pair, norm)
    coeffs = np.random.default_rng(_COMBINATION_SEED).standard_normal(len(effects))
    combo = sum(c * e.matrix for c, e in zip(coeffs, effects))
    _, v = eig_hermitian(combo)
    if not _diagonalizes(v, effects):
        v = _refine(np.eye(dim, dtype=complex), list(effects))
    functions = tuple(np.real(np.diag(v.conj().T @ e.matrix @ v)).copy() for e in effects)
    return ClassicalRepresentation(basis=v, functions=functions)


def measure_for(rep: ClassicalRepresentation, rho: DensityOperator) -> StateMeasure:
    """Probability measure on Omega induced by ``rho`` (diagonal of V^dag rho V)."""
    v = rep.basis
    if rho.dim != v.shape[0]:
        raise DimensionMismatchError(f"state dim {rho.dim} != island dim {v.shape[0]}")
    w = np.real(np.diag(v.conj().T @ rho.matrix @ v)).copy()
    return StateMeasure(weights=w)


def reconstruct_memberships(rep: ClassicalRepresentation, rho: DensityOperator) -> np.ndarray:
    """Classical expectations sum_w f_j(w) mu(w), one per family member."""
    mu = measure_for(rep, rho)
    return np.array([mu.expectation(f) for f in rep.functions])


def quantum_memberships(effects: Sequence[Effect], rho: DensityOperator) -> np.ndarray:
    return np.array([membership(rho, e) for e in effects])
