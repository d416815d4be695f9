"""Quantum granules as effects, and the families built from them.

An effect is a Hermitian operator with spectrum in [0, 1]; the degree to
which a state belongs to a granule is the Born probability ``Tr(rho E)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np
from scipy.linalg import null_space

from .errors import (
    DimensionMismatchError,
    InvalidEffectError,
    InvalidPOVMError,
    NotSharpError,
    QGCError,
)
from .operators import (
    DEFAULT_TOL,
    I2,
    PAULIS,
    Z,
    eig_hermitian,
    hermitian,
    is_psd,
    ket_projector,
    loewner_leq,
    tensor,
)
from .states import DensityOperator, StateVector

__all__ = [
    "Effect",
    "POVM",
    "PVM",
    "QubitEffectBloch",
    "RoughGranulePair",
    "ThreeWayPOVM",
    "membership",
    "membership_raw",
    "membership_pure",
    "is_sharp",
    "coarse_grain",
    "qubit_effect",
    "lift_local",
    "complement",
    "projector_meet",
    "projector_join",
    "parity_effects",
    "computational_pvm",
    "P0",
    "P1",
]

SHARP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Effect:
    """Operator E with 0 <= E <= I (a quantum granule)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = hermitian(self.matrix)
        tol = DEFAULT_TOL.psd_tol
        if not is_psd(m, tol):
            raise InvalidEffectError("effect is not positive semidefinite")
        if not is_psd(np.eye(m.shape[0]) - m, tol):
            raise InvalidEffectError("effect exceeds the identity in Loewner order")
        m = np.array(m, copy=True)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "Effect":
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def zero(cls, dim: int) -> "Effect":
        return cls(np.zeros((dim, dim), dtype=complex))

    @classmethod
    def projector(cls, vec) -> "Effect":
        """Rank-one projector onto ``vec`` (a StateVector or raw amplitudes)."""
        if isinstance(vec, StateVector):
            vec = vec.amplitudes
        return cls(ket_projector(vec))


class POVM:
    """Nonempty family of equal-dimension effects summing to the identity."""

    def __init__(self, effects: Iterable[Effect | np.ndarray], sum_tol: float = DEFAULT_TOL.sum_tol):
        effects = tuple(e if isinstance(e, Effect) else Effect(e) for e in effects)
        if not effects:
            raise InvalidPOVMError("a POVM needs at least one effect")
        dim = effects[0].dim
        if any(e.dim != dim for e in effects):
            raise DimensionMismatchError("POVM effects have different dimensions")
        gap = np.linalg.norm(sum(e.matrix for e in effects) - np.eye(dim))
        if gap > sum_tol:
            raise InvalidPOVMError(f"effects sum to identity only within {gap:.3e}")
        self._effects = effects

    @property
    def effects(self) -> tuple[Effect, ...]:
        return self._effects

    @property
    def dim(self) -> int:
        return self._effects[0].dim

    def __len__(self) -> int:
        return len(self._effects)

    def __iter__(self):
        return iter(self._effects)

    def __getitem__(self, i) -> Effect:
        return self._effects[i]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(outcomes={len(self)}, dim={self.dim})"


class PVM(POVM):
    """POVM whose elements are pairwise-orthogonal projectors."""

    def __init__(self, projectors: Iterable[Effect | np.ndarray], sum_tol: float = DEFAULT_TOL.sum_tol):
        super().__init__(projectors, sum_tol)
        for i, p in enumerate(self.effects):
            if not is_sharp(p):
                raise NotSharpError(f"element {i} is not a projector")
        for i, p in enumerate(self.effects):
            for j in range(i + 1, len(self)):
                if np.linalg.norm(p.matrix @ self.effects[j].matrix) > SHARP_TOL:
                    raise InvalidPOVMError(f"projectors {i} and {j} are not orthogonal")

    @property
    def projectors(self) -> tuple[Effect, ...]:
        return self.effects


@dataclass(frozen=True)
class QubitEffectBloch:
    """Qubit effect ``alpha I + e . sigma`` in Bloch form."""

    alpha: float
    ex: float
    ey: float
    ez: float

    def __post_init__(self):
        n = self.e_norm
        if self.alpha - n < -1e-10 or self.alpha + n > 1 + 1e-10:
            raise InvalidEffectError(
                f"need 0 <= alpha +/- |e| <= 1, got alpha={self.alpha}, |e|={n:.12g}"
            )

    @property
    def e_norm(self) -> float:
        return math.sqrt(self.ex**2 + self.ey**2 + self.ez**2)

    @property
    def e(self) -> np.ndarray:
        return np.array([self.ex, self.ey, self.ez], dtype=float)


@dataclass(frozen=True, eq=False)
class RoughGranulePair:
    """Lower/upper effect approximation with lower <= upper."""

    lower: Effect
    upper: Effect

    def __post_init__(self):
        if self.lower.dim != self.upper.dim:
            raise DimensionMismatchError("rough pair effects have different dimensions")
        if not loewner_leq(self.lower.matrix, self.upper.matrix, DEFAULT_TOL.psd_tol):
            raise InvalidEffectError("lower effect is not below the upper effect")

    def boundary(self) -> np.ndarray:
        """Operator ``upper - lower`` (PSD by construction)."""
        return self.upper.matrix - self.lower.matrix


@dataclass(frozen=True, eq=False)
class ThreeWayPOVM:
    """Accept / reject / undecided triple forming a POVM."""

    accept: Effect
    reject: Effect
    undecided: Effect

    def __post_init__(self):
        self.as_povm()

    def as_povm(self) -> POVM:
        return POVM([self.accept, self.reject, self.undecided])


P0 = Effect(np.diag([1, 0]).astype(complex))
P1 = Effect(np.diag([0, 1]).astype(complex))


def _check_dims(rho_dim: int, e_dim: int) -> None:
    if rho_dim != e_dim:
        raise DimensionMismatchError(f"state has dim {rho_dim} but effect has dim {e_dim}")


def membership_raw(rho: DensityOperator, e: Effect) -> float:
    """Unclamped ``Tr(rho E)``; kept for diagnostics."""
    _check_dims(rho.dim, e.dim)
    return float(np.einsum("ij,ji->", rho.matrix, e.matrix).real)


def membership(rho: DensityOperator, e: Effect) -> float:
    """Born-rule membership of ``rho`` in granule ``e``, clamped to [0, 1]."""
    return min(1.0, max(0.0, membership_raw(rho, e)))


def membership_pure(psi: StateVector, e: Effect) -> float:
    """``<psi|E|psi>`` without forming the density operator."""
    _check_dims(psi.dim, e.dim)
    a = psi.amplitudes
    return min(1.0, max(0.0, float(np.vdot(a, e.matrix @ a).real)))


def is_sharp(e: Effect, tol: float = SHARP_TOL) -> bool:
    m = e.matrix
    return bool(np.linalg.norm(m @ m - m) <= tol)


def coarse_grain(p: POVM, s: Iterable[int]) -> Effect:
    """Sum of the selected outcomes' effects."""
    idx = sorted(set(int(i) for i in s))
    if not idx:
        raise QGCError("coarse-graining needs a nonempty index set")
    if idx[0] < 0 or idx[-1] >= len(p):
        raise QGCError(f"index set {idx} out of range for {len(p)} outcomes")
    return Effect(sum(p[i].matrix for i in idx))


def qubit_effect(b: QubitEffectBloch) -> Effect:
    return Effect(b.alpha * I2 + b.ex * PAULIS[0] + b.ey * PAULIS[1] + b.ez * PAULIS[2])


def lift_local(e_local: Effect, dims: tuple[int, int], which: Literal["A", "B"] = "A") -> Effect:
    """Embed a subsystem effect as ``E (x) I`` (which="A") or ``I (x) E`` (which="B")."""
    dim_a, dim_b = dims
    if which == "A":
        if e_local.dim != dim_a:
            raise DimensionMismatchError(f"effect dim {e_local.dim} != subsystem A dim {dim_a}")
        return Effect(tensor(e_local.matrix, np.eye(dim_b)))
    if which == "B":
        if e_local.dim != dim_b:
            raise DimensionMismatchError(f"effect dim {e_local.dim} != subsystem B dim {dim_b}")
        return Effect(tensor(np.eye(dim_a), e_local.matrix))
    raise ValueError(f"which must be 'A' or 'B', got {which!r}")


def complement(e: Effect) -> Effect:
    return Effect(np.eye(e.dim) - e.matrix)


def _range_basis(m: np.ndarray, complement_space: bool = False) -> np.ndarray:
    w, v = eig_hermitian(m)
    cut = 1e-9 * max(float(np.max(np.abs(w))), 1.0)
    mask = w <= cut if complement_space else w > cut
    return v[:, mask]


def _require_sharp(*effects: Effect) -> None:
    for e in effects:
        if not is_sharp(e):
            raise NotSharpError("meet/join are only defined for projectors")


def projector_meet(p: Effect, q: Effect) -> Effect:
    """Projector onto ran(P) intersected with ran(Q)."""
    _require_sharp(p, q)
    _check_dims(p.dim, q.dim)
    # v lies in both ranges iff it is orthogonal to both complements
    stacked = np.hstack([_range_basis(p.matrix, True), _range_basis(q.matrix, True)]).conj().T
    if stacked.shape[0] == 0:
        return Effect.identity(p.dim)
    basis = null_space(stacked, rcond=1e-9)
    return Effect(basis @ basis.conj().T)


def projector_join(p: Effect, q: Effect) -> Effect:
    """Projector onto the closed span of ran(P) and ran(Q)."""
    _require_sharp(p, q)
    _check_dims(p.dim, q.dim)
    return complement(projector_meet(complement(p), complement(q)))


def parity_effects() -> PVM:
    """Two-qubit even/odd parity projectors ``(I (x) I +/- Z (x) Z)/2``."""
    zz = tensor(Z, Z)
    return PVM([0.5 * (np.eye(4) + zz), 0.5 * (np.eye(4) - zz)])


def computational_pvm(dim: int) -> PVM:
    """Projectors onto the computational basis states."""
    eye = np.eye(dim, dtype=complex)
    return PVM([np.outer(eye[i], eye[i]) for i in range(dim)])


def as_effects(items: Sequence[Effect | np.ndarray]) -> list[Effect]:
    return [e if isinstance(e, Effect) else Effect(e) for e in items]
