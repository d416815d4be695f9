"""Exact random samplers for states, effects, measurements and channels.

Every sampler takes a ``numpy.random.Generator`` and produces objects that
satisfy their invariants by construction, so callers never need rejection
loops.  They drive the property tests and the Helstrom dominance search.
"""
from __future__ import annotations

import numpy as np

from .granules import POVM, PVM, Effect
from .operators import psd_power
from .states import DensityOperator, StateVector

__all__ = [
    "random_unitary",
    "random_hermitian",
    "random_pure",
    "random_density",
    "random_effect",
    "random_povm",
    "random_pvm",
    "random_kraus",
    "random_commuting_family",
]


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix with phase fix."""
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = _ginibre(rng, dim, dim)
    return 0.5 * (g + g.conj().T)


def random_pure(rng: np.random.Generator, dim: int) -> StateVector:
    return StateVector.normalized(_ginibre(rng, dim, 1).ravel())


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> DensityOperator:
    """Induced-measure mixed state; full rank unless ``rank`` is given."""
    g = _ginibre(rng, dim, rank or dim)
    rho = g @ g.conj().T
    return DensityOperator(rho / np.trace(rho).real)


def random_effect(rng: np.random.Generator, dim: int) -> Effect:
    """Affinely rescale a random Hermitian so its spectrum spans exactly [0, 1]."""
    h = random_hermitian(rng, dim)
    w = np.linalg.eigvalsh(h)
    lo, hi = w[0], w[-1]
    return Effect((h - lo * np.eye(dim)) / (hi - lo))


def random_povm(rng: np.random.Generator, dim: int, outcomes: int) -> POVM:
    """Normalize random PSD operators by ``S^{-1/2} A_j S^{-1/2}``, S their sum."""
    a = [g @ g.conj().T for g in (_ginibre(rng, dim, dim) for _ in range(outcomes))]
    s_inv_half = psd_power(sum(a), -0.5)
    effects = []
    for aj in a:
        e = s_inv_half @ aj @ s_inv_half
        effects.append(0.5 * (e + e.conj().T))
    return POVM(effects)


def random_pvm(rng: np.random.Generator, dim: int, outcomes: int | None = None) -> PVM:
    """Random orthonormal basis split into ``outcomes`` nonempty blocks."""
    outcomes = outcomes or dim
    outcomes = min(outcomes, dim)
    u = random_unitary(rng, dim)
    cuts = np.sort(rng.choice(np.arange(1, dim), size=outcomes - 1, replace=False))
    blocks = np.split(np.arange(dim), cuts)
    return PVM([u[:, b] @ u[:, b].conj().T for b in blocks])


def random_kraus(
    rng: np.random.Generator, dim_in: int, dim_out: int | None = None, env_dim: int = 2
) -> list[np.ndarray]:
    """Kraus operators as environment blocks of a random isometry.

    A Haar unitary on out (x) env is truncated to its first ``dim_in``
    columns (an isometry into out (x) env); block ``k`` over the environment
    index gives ``K_k``, so completeness holds up to rounding.
    """
    dim_out = dim_out or dim_in
    big = dim_out * env_dim
    if big < dim_in:
        raise ValueError("environment too small for an isometry")
    v = random_unitary(rng, big)[:, :dim_in]
    t = v.reshape(dim_out, env_dim, dim_in)
    return [np.ascontiguousarray(t[:, k, :]) for k in range(env_dim)]


def random_commuting_family(
    rng: np.random.Generator, dim: int, size: int, sharp: bool = False
) -> list[Effect]:
    """Effects diagonal in one shared random basis."""
    u = random_unitary(rng, dim)
    family = []
    for _ in range(size):
        d = rng.integers(0, 2, dim).astype(float) if sharp else rng.uniform(0, 1, dim)
        family.append(Effect((u * d) @ u.conj().T))
    return family
