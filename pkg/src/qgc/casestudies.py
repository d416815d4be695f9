"""Qubit, parity and noisy-channel case studies as data generators.

These return plain arrays/dicts; the CLI only formats them.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .channels import KrausChannel, apply, dressed_granule
from .errors import DimensionMismatchError, QGCError
from .granules import Effect, QubitEffectBloch, membership, membership_pure, parity_effects
from .operators import PAULIS
from .states import DensityOperator, StateVector, pure_qubit, pure_state

__all__ = [
    "qubit_sweep",
    "mixed_sweep",
    "contrast_by_radius",
    "bloch_form",
    "parity_report",
    "channel_dress",
]


def _check_steps(*steps: int) -> None:
    if any(s < 2 for s in steps):
        raise QGCError("sweeps need at least 2 steps per axis")


def qubit_sweep(theta_steps: int, phi_steps: int, effect: Effect) -> np.ndarray:
    """Membership of pure qubit states over a (theta, phi) grid.

    theta spans [0, pi] inclusive, phi spans [0, 2 pi) exclusive.  Rows are
    (theta, phi, membership) with angles in radians.
    """
    _check_steps(theta_steps, phi_steps)
    if effect.dim != 2:
        raise DimensionMismatchError("qubit sweep needs a qubit effect")
    thetas = np.linspace(0.0, math.pi, theta_steps)
    phis = np.linspace(0.0, 2 * math.pi, phi_steps, endpoint=False)
    rows = [
        (t, f, membership_pure(pure_qubit(t, f), effect)) for t in thetas for f in phis
    ]
    return np.array(rows)


def bloch_form(effect: Effect | QubitEffectBloch) -> QubitEffectBloch:
    """alpha = Tr(E)/2 and e_k = Tr(E sigma_k)/2 for a qubit effect."""
    if isinstance(effect, QubitEffectBloch):
        return effect
    if effect.dim != 2:
        raise DimensionMismatchError("Bloch form needs a qubit effect")
    m = effect.matrix
    alpha = 0.5 * float(np.trace(m).real)
    e = [0.5 * float(np.einsum("ij,ji->", m, s).real) for s in PAULIS]
    return QubitEffectBloch(alpha, *e)


def mixed_sweep(r_norm_steps: int, angle_steps: int, effect: Effect | QubitEffectBloch) -> np.ndarray:
    """Closed-form memberships ``alpha + r . e`` over Bloch vectors in the x-z plane.

    ``r = |r| (sin a, 0, cos a)`` with |r| in [0, 1] and polar angle a in
    [0, pi].  Rows are (|r|, a, membership).
    """
    _check_steps(r_norm_steps, angle_steps)
    b = bloch_form(effect)
    rows = []
    for r in np.linspace(0.0, 1.0, r_norm_steps):
        for a in np.linspace(0.0, math.pi, angle_steps):
            rx, rz = r * math.sin(a), r * math.cos(a)
            rows.append((r, a, b.alpha + rx * b.ex + rz * b.ez))
    return np.array(rows)


def contrast_by_radius(rows: np.ndarray) -> dict[float, float]:
    """max - min membership at each Bloch radius of a mixed sweep."""
    out = {}
    for r in np.unique(rows[:, 0]):
        col = rows[rows[:, 0] == r, 2]
        out[float(r)] = float(col.max() - col.min())
    return out


def parity_report(state: DensityOperator | StateVector) -> dict[str, float]:
    rho = pure_state(state) if isinstance(state, StateVector) else state
    if rho.dim != 4:
        raise DimensionMismatchError("parity needs a two-qubit state")
    even, _ = parity_effects()
    p_even = membership(rho, even)
    return {"p_even": p_even, "p_odd": 1.0 - p_even}


def channel_dress(
    channel: KrausChannel, effect: Effect, states: Sequence[DensityOperator]
) -> dict:
    """Compare Tr(E(rho) E) with Tr(rho E^dag(E)) state by state."""
    dressed = dressed_granule(channel, effect)
    rows = []
    for i, rho in enumerate(states):
        lhs = membership(apply(channel, rho), effect)
        rhs = membership(rho, dressed)
        rows.append({"state": i, "schrodinger": lhs, "heisenberg": rhs, "abs_diff": abs(lhs - rhs)})
    return {
        "dressed_effect": dressed,
        "rows": rows,
        "max_abs_diff": max((r["abs_diff"] for r in rows), default=0.0),
    }
