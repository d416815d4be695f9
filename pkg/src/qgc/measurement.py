"""Outcome statistics, Lueders updates and simulated shot sampling.

Shot sampling uses numpy's PCG64 bit generator seeded directly with the
caller's 64-bit seed, and draws the multinomial by sequential binomial
conditioning, so counts are a pure function of (distribution, shots, seed).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, QGCError, ZeroProbabilityBranchError
from .granules import POVM, PVM, Effect, membership, membership_raw
from .states import DensityOperator

__all__ = [
    "RNG_ALGORITHM",
    "LUDERS_FLOOR",
    "OutcomeDistribution",
    "ShotRecord",
    "Branch",
    "outcome_probabilities",
    "luders_selective",
    "luders_nonselective",
    "refinement_decompose",
    "sample_shots",
]

RNG_ALGORITHM = "numpy.random.PCG64"
LUDERS_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Probability vector over measurement outcomes.

    Sums within 1e-9 of one are renormalized; larger deviations are errors.
    """

    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float).ravel()
        if p.size == 0 or np.any(p < -1e-10) or not np.all(np.isfinite(p)):
            raise QGCError(f"invalid probability vector {p}")
        total = p.sum()
        if abs(total - 1.0) > 1e-9:
            raise QGCError(f"probabilities sum to {total:.12g}, expected 1")
        p = np.clip(p, 0.0, None) / total
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    def __len__(self) -> int:
        return self.probabilities.size

    def __getitem__(self, i) -> float:
        return float(self.probabilities[i])


@dataclass(frozen=True)
class ShotRecord:
    counts: tuple[int, ...]
    shots: int
    seed: int

    def __post_init__(self):
        if sum(self.counts) != self.shots:
            raise QGCError("shot counts do not add up to the number of shots")

    def frequencies(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.shots

    def to_dict(self) -> dict:
        return {"counts": list(self.counts), "shots": self.shots, "seed": self.seed}


@dataclass(frozen=True, eq=False)
class Branch:
    """One PVM outcome in a refinement decomposition.

    ``conditional_membership`` is None for branches below the Lueders floor;
    those branches contribute nothing to the total.
    """

    probability: float
    conditional_membership: float | None
    state: DensityOperator | None = field(default=None, repr=False)

    @property
    def live(self) -> bool:
        return self.conditional_membership is not None


def _check(rho: DensityOperator, m: POVM) -> None:
    if rho.dim != m.dim:
        raise DimensionMismatchError(f"state dim {rho.dim} != measurement dim {m.dim}")


def outcome_probabilities(rho: DensityOperator, m: POVM) -> OutcomeDistribution:
    _check(rho, m)
    return OutcomeDistribution(np.array([membership(rho, e) for e in m]))


def luders_selective(
    rho: DensityOperator, m: PVM, i: int, floor: float = LUDERS_FLOOR
) -> tuple[float, DensityOperator]:
    """Outcome probability and conditional state ``P_i rho P_i / p_i``."""
    _check(rho, m)
    p = m[i].matrix
    unnorm = p @ rho.matrix @ p
    prob = float(np.trace(unnorm).real)
    if prob <= floor:
        raise ZeroProbabilityBranchError(i, prob)
    return prob, DensityOperator(unnorm / prob)


def luders_nonselective(rho: DensityOperator, m: PVM) -> DensityOperator:
    """``sum_i P_i rho P_i``."""
    _check(rho, m)
    out = sum(p.matrix @ rho.matrix @ p.matrix for p in m)
    return DensityOperator(out)


def refinement_decompose(
    rho: DensityOperator, m: PVM, e: Effect, floor: float = LUDERS_FLOOR
) -> list[Branch]:
    """Split the post-measurement membership of ``e`` into conditioned branches.

    ``sum(b.probability * b.conditional_membership for live b)`` equals
    ``membership(luders_nonselective(rho, m), e)``.
    """
    _check(rho, m)
    if e.dim != rho.dim:
        raise DimensionMismatchError("effect and state dimensions differ")
    branches = []
    for i in range(len(m)):
        try:
            p, rho_i = luders_selective(rho, m, i, floor)
        except ZeroProbabilityBranchError as exc:
            branches.append(Branch(max(exc.probability, 0.0), None))
            continue
        branches.append(Branch(p, membership_raw(rho_i, e), rho_i))
    return branches


def refinement_total(branches: Sequence[Branch]) -> float:
    return float(sum(b.probability * b.conditional_membership for b in branches if b.live))


def sample_shots(dist: OutcomeDistribution, shots: int, seed: int) -> ShotRecord:
    """Multinomial counts by sequential binomial conditioning."""
    if shots <= 0:
        raise QGCError("shots must be a positive integer")
    seed = int(seed) & 0xFFFF_FFFF_FFFF_FFFF
    gen = np.random.Generator(np.random.PCG64(seed))
    p = dist.probabilities
    tail = np.cumsum(p[::-1])[::-1]  # tail[k] = sum(p[k:])
    counts = []
    remaining = shots
    for k in range(p.size - 1):
        if remaining == 0 or tail[k] <= 0:
            counts.append(0)
            continue
        c = int(gen.binomial(remaining, min(1.0, p[k] / tail[k])))
        counts.append(c)
        remaining -= c
    counts.append(remaining)
    return ShotRecord(tuple(counts), shots, seed)
