"""Quantum granular computing: effects as granules, Born-rule memberships,
measurement and channel transformations, Helstrom decision granules,
variational effect learning and granular decision pipelines."""

from .errors import QGCError
from .granules import POVM, PVM, Effect, membership, membership_pure
from .states import DensityOperator, StateVector, mixed_qubit, pure_qubit, pure_state

__version__ = "0.1.0"

__all__ = [
    "QGCError",
    "DensityOperator",
    "StateVector",
    "Effect",
    "POVM",
    "PVM",
    "membership",
    "membership_pure",
    "pure_state",
    "pure_qubit",
    "mixed_qubit",
]
