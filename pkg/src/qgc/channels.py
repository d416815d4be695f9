"""Quantum channels in Kraus form, their Heisenberg adjoints and Choi matrices."""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .errors import DimensionMismatchError, InvalidChannelError, InvalidParameterError
from .granules import Effect
from .operators import DEFAULT_TOL, I2, X, Y, Z, as_matrix, hermitian, is_psd
from .states import DensityOperator

__all__ = [
    "KrausChannel",
    "ChoiMatrix",
    "apply",
    "adjoint_apply",
    "dressed_granule",
    "choi",
    "apply_choi",
    "same_channel",
    "identity_channel",
    "depolarizing",
    "amplitude_damping",
    "dephasing",
]


class KrausChannel:
    """Trace-preserving map ``rho -> sum_k K_k rho K_k^dag``.

    Each Kraus operator has shape (dim_out, dim_in).  Construction fails if
    ``sum_k K_k^dag K_k`` is not the identity within ``sum_tol``.
    """

    def __init__(self, kraus: Iterable, sum_tol: float = DEFAULT_TOL.sum_tol):
        ks = [as_matrix(k).copy() for k in kraus]
        if not ks:
            raise InvalidChannelError("a channel needs at least one Kraus operator")
        shape = ks[0].shape
        if any(k.shape != shape for k in ks):
            raise DimensionMismatchError("Kraus operators have different shapes")
        dim_out, dim_in = shape
        gap = np.linalg.norm(sum(k.conj().T @ k for k in ks) - np.eye(dim_in))
        if gap > sum_tol:
            raise InvalidChannelError(f"Kraus set is not trace preserving (defect {gap:.3e})")
        for k in ks:
            k.setflags(write=False)
        self._kraus = tuple(ks)
        self.dim_in = dim_in
        self.dim_out = dim_out

    @property
    def kraus(self) -> tuple[np.ndarray, ...]:
        return self._kraus

    def __repr__(self) -> str:
        return f"KrausChannel(dim_in={self.dim_in}, dim_out={self.dim_out}, rank={len(self._kraus)})"


class ChoiMatrix:
    """Normalized Choi operator on out (x) in, with unit trace."""

    def __init__(self, matrix, dim_in: int, dim_out: int):
        m = hermitian(matrix)
        if m.shape[0] != dim_in * dim_out:
            raise DimensionMismatchError("Choi matrix size does not match dim_in * dim_out")
        if not is_psd(m, DEFAULT_TOL.psd_tol):
            raise InvalidChannelError("Choi matrix is not PSD: the map is not completely positive")
        m.setflags(write=False)
        self.matrix = m
        self.dim_in = dim_in
        self.dim_out = dim_out

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])


def apply(ch: KrausChannel, rho: DensityOperator) -> DensityOperator:
    if rho.dim != ch.dim_in:
        raise DimensionMismatchError(f"channel input dim {ch.dim_in} != state dim {rho.dim}")
    r = rho.matrix
    return DensityOperator(sum(k @ r @ k.conj().T for k in ch.kraus))


def adjoint_apply(ch: KrausChannel, e: Effect) -> Effect:
    """Heisenberg picture ``E -> sum_k K_k^dag E K_k``."""
    if e.dim != ch.dim_out:
        raise DimensionMismatchError(f"channel output dim {ch.dim_out} != effect dim {e.dim}")
    m = e.matrix
    return Effect(sum(k.conj().T @ m @ k for k in ch.kraus))


def dressed_granule(ch: KrausChannel, e: Effect) -> Effect:
    """The granule that, measured before ``ch``, reproduces measuring ``e`` after it."""
    return adjoint_apply(ch, e)


def _unit(dim: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


def choi(ch: KrausChannel) -> ChoiMatrix:
    """``(E (x) id)(|Phi+><Phi+|)`` with |Phi+> carrying 1/sqrt(d) amplitudes."""
    d_in, d_out = ch.dim_in, ch.dim_out
    j = np.zeros((d_out * d_in, d_out * d_in), dtype=complex)
    for a in range(d_in):
        for b in range(d_in):
            eab = _unit(d_in, a, b)
            out = sum(k @ eab @ k.conj().T for k in ch.kraus)
            j += np.kron(out, eab)
    return ChoiMatrix(j / d_in, d_in, d_out)


def apply_choi(j: ChoiMatrix, rho: DensityOperator) -> DensityOperator:
    """Reconstruct the channel action from its Choi matrix.

    ``E(rho) = d * Tr_in[(I (x) rho^T) J]``.
    """
    d_in, d_out = j.dim_in, j.dim_out
    if rho.dim != d_in:
        raise DimensionMismatchError("state does not match the Choi input dimension")
    t = np.asarray(j.matrix).reshape(d_out, d_in, d_out, d_in)
    out = d_in * np.einsum("aibj,ji->ab", t, rho.matrix.T)
    return DensityOperator(out)


def same_channel(a: KrausChannel, b: KrausChannel, atol: float = 1e-9) -> bool:
    """Channel equality, decided on Choi matrices since Kraus sets are not unique."""
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        return False
    return bool(np.linalg.norm(choi(a).matrix - choi(b).matrix) <= atol)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel([np.eye(dim, dtype=complex)])


def _check_prob(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"{name} must lie in [0, 1], got {p}")
    return p


def depolarizing(p: float) -> KrausChannel:
    """Qubit depolarizing channel; p=1 maps every state to I/2."""
    p = _check_prob("p", p)
    return KrausChannel(
        [math.sqrt(1 - 3 * p / 4) * I2] + [math.sqrt(p / 4) * s for s in (X, Y, Z)]
    )


def amplitude_damping(gamma: float) -> KrausChannel:
    gamma = _check_prob("gamma", gamma)
    k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel([k0, k1])


def dephasing(p: float) -> KrausChannel:
    p = _check_prob("p", p)
    return KrausChannel([math.sqrt(1 - p / 2) * I2, math.sqrt(p / 2) * Z])
