"""Dense complex matrix substrate.

Operators are plain ``numpy`` arrays of dtype ``complex128``.  The helpers here
validate shapes and Hermiticity at the boundary and implement the spectral
primitives (eigendecomposition, positivity, Loewner order, trace norm) that the
rest of the package builds on.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DimensionMismatchError, EigenSolverError, NotHermitianError, QGCError

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "PSD_FLOOR",
    "I2",
    "X",
    "Y",
    "Z",
    "PAULIS",
    "as_matrix",
    "hermitian",
    "dagger",
    "frobenius",
    "ket_projector",
    "eig_hermitian",
    "is_psd",
    "loewner_leq",
    "trace_norm",
    "tensor",
    "commutator_norm",
    "psd_power",
]


@dataclass(frozen=True)
class Tolerances:
    herm_tol: float = 1e-10
    psd_tol: float = 1e-9
    sum_tol: float = 1e-9
    commute_tol: float = 1e-9

    def __post_init__(self):
        for name in ("herm_tol", "psd_tol", "sum_tol", "commute_tol"):
            if not getattr(self, name) > 0:
                raise QGCError(f"tolerance {name} must be strictly positive")


DEFAULT_TOL = Tolerances()

# positivity thresholds never drop below this, whatever the caller's tol
PSD_FLOOR = 1e-12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (X, Y, Z)
for _m in (I2, X, Y, Z):
    _m.setflags(write=False)


def as_matrix(a, *, square: bool = False) -> np.ndarray:
    """Coerce ``a`` into a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or 0 in m.shape:
        raise DimensionMismatchError(f"expected a nonempty 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise QGCError("matrix has non-finite entries")
    return m


def hermitian(a, herm_tol: float = DEFAULT_TOL.herm_tol) -> np.ndarray:
    """Return ``a`` as a validated Hermitian matrix.

    Rejects inputs with ``||M - M^dagger||_F > herm_tol * max(1, ||M||_F)``.
    The returned array is exactly Hermitian (symmetrized) so downstream
    eigensolvers see clean input.
    """
    m = as_matrix(a, square=True)
    skew = np.linalg.norm(m - m.conj().T)
    if skew > herm_tol * max(1.0, np.linalg.norm(m)):
        raise NotHermitianError(f"matrix is not Hermitian (||M - M^dag||_F = {skew:.3e})")
    return 0.5 * (m + m.conj().T)


def dagger(a) -> np.ndarray:
    return np.asarray(a).conj().T


def frobenius(a) -> float:
    return float(np.linalg.norm(a))


def ket_projector(vec) -> np.ndarray:
    """Rank-one projector onto the normalized direction of ``vec``."""
    v = np.asarray(vec, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def eig_hermitian(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary matrix whose columns are
    the corresponding eigenvectors, so that ``h = V diag(w) V^dagger``.
    No ordering is promised inside degenerate eigenspaces.
    """
    m = hermitian(h)
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        cond = float(np.linalg.cond(m)) if np.all(np.isfinite(m)) else float("inf")
        raise EigenSolverError(str(exc), m.shape[0], cond) from exc
    return w, v


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"operator shapes differ: {a.shape} vs {b.shape}")


def is_psd(h, tol: float = DEFAULT_TOL.psd_tol) -> bool:
    """True iff the smallest eigenvalue is >= -tol * max(1, spectral radius)."""
    w = np.linalg.eigvalsh(hermitian(h))
    scale = max(1.0, float(np.max(np.abs(w))))
    return bool(w[0] >= -max(tol * scale, PSD_FLOOR))


def loewner_leq(a, b, tol: float = DEFAULT_TOL.psd_tol) -> bool:
    """Loewner order ``a <= b``, i.e. ``b - a`` positive semidefinite."""
    a, b = hermitian(a), hermitian(b)
    _check_same_dim(a, b)
    return is_psd(b - a, tol)


def trace_norm(h) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(hermitian(h)))))


def tensor(*mats) -> np.ndarray:
    """Kronecker product, first factor most significant."""
    if not mats:
        raise QGCError("tensor() needs at least one factor")
    return reduce(np.kron, (as_matrix(m) for m in mats))


def commutator_norm(a, b) -> float:
    """Frobenius norm of ``ab - ba``."""
    a, b = hermitian(a), hermitian(b)
    _check_same_dim(a, b)
    return frobenius(a @ b - b @ a)


def psd_power(h, power: float, cutoff: float = 1e-14) -> np.ndarray:
    """Matrix power of a PSD matrix through its spectrum.

    Eigenvalues at or below ``cutoff`` are treated as zero (and stay zero for
    negative powers, which gives the Moore-Penrose style pseudo-power).
    """
    w, v = eig_hermitian(h)
    wp = np.zeros_like(w)
    keep = w > cutoff
    wp[keep] = w[keep] ** power
    return (v * wp) @ v.conj().T
