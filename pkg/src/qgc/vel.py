"""Variational effect learning.

A template POVM ``{F_j}`` is conjugated by a parametrized circuit unitary,
``E_j(theta) = U(theta)^dag F_j U(theta)``, which keeps every iterate a valid
POVM.  ``theta`` is fitted by plain gradient descent on an empirical risk
with central finite-difference gradients.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from .encoding import LabeledDataset
from .errors import DimensionMismatchError, InvalidParameterError, QGCError, TrainingError
from .granules import POVM
from .measurement import OutcomeDistribution
from .operators import I2, X, Y, Z
from .states import DensityOperator

log = logging.getLogger(__name__)

__all__ = [
    "Gate",
    "UnitaryAnsatz",
    "ParametrizedPOVM",
    "TrainingConfig",
    "TrainingReport",
    "hardware_efficient",
    "build_unitary",
    "effects_at",
    "probabilities",
    "loss",
    "success_rate",
    "accuracy",
    "train",
]

GENERATORS = ("RX", "RY", "RZ", "RZZ")
CE_EPS = 1e-12
MARGIN = 0.1

Encoder = Callable[[np.ndarray], DensityOperator]


@dataclass(frozen=True)
class Gate:
    generator: str
    targets: tuple[int, ...]

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise InvalidParameterError(f"unknown generator {self.generator!r}")
        want = 2 if self.generator == "RZZ" else 1
        if len(self.targets) != want or len(set(self.targets)) != want:
            raise InvalidParameterError(f"{self.generator} needs {want} distinct target(s)")


@dataclass(frozen=True)
class UnitaryAnsatz:
    """Layered circuit; ``layer`` is the gate list repeated ``layers`` times."""

    num_qubits: int
    layers: int
    layer: tuple[Gate, ...]

    def __post_init__(self):
        if self.num_qubits < 1 or self.layers < 1:
            raise InvalidParameterError("ansatz needs at least one qubit and one layer")
        for g in self.layer:
            if any(t < 0 or t >= self.num_qubits for t in g.targets):
                raise InvalidParameterError(f"gate {g} targets a qubit outside 0..{self.num_qubits - 1}")

    @property
    def num_params(self) -> int:
        return self.layers * len(self.layer)

    @property
    def dim(self) -> int:
        return 2**self.num_qubits

    @property
    def gates(self) -> list[Gate]:
        return list(self.layer) * self.layers


def hardware_efficient(num_qubits: int, layers: int = 1) -> UnitaryAnsatz:
    """RY then RZ on every qubit, followed by RZZ along a linear chain."""
    gates = []
    for q in range(num_qubits):
        gates += [Gate("RY", (q,)), Gate("RZ", (q,))]
    gates += [Gate("RZZ", (q, q + 1)) for q in range(num_qubits - 1)]
    return UnitaryAnsatz(num_qubits, layers, tuple(gates))


_PAULI = {"RX": X, "RY": Y, "RZ": Z}


def _gate_matrix(gate: Gate, angle: float, n: int) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if gate.generator == "RZZ":
        a, b = gate.targets
        idx = np.arange(2**n)
        za = 1 - 2 * ((idx >> (n - 1 - a)) & 1)
        zb = 1 - 2 * ((idx >> (n - 1 - b)) & 1)
        return np.diag(np.exp(-0.5j * angle * za * zb))
    local = c * I2 - 1j * s * _PAULI[gate.generator]
    (q,) = gate.targets
    return np.kron(np.kron(np.eye(2**q), local), np.eye(2 ** (n - q - 1)))


def build_unitary(ansatz: UnitaryAnsatz, theta: Sequence[float] | None = None) -> np.ndarray:
    """Circuit unitary; the first gate in the layout acts first on the state."""
    theta = np.zeros(ansatz.num_params) if theta is None else np.asarray(theta, dtype=float).ravel()
    if theta.size != ansatz.num_params:
        raise DimensionMismatchError(f"ansatz takes {ansatz.num_params} angles, got {theta.size}")
    u = np.eye(ansatz.dim, dtype=complex)
    for gate, angle in zip(ansatz.gates, theta):
        u = _gate_matrix(gate, float(angle), ansatz.num_qubits) @ u
    return u


@dataclass(frozen=True, eq=False)
class ParametrizedPOVM:
    template: POVM
    ansatz: UnitaryAnsatz

    def __post_init__(self):
        if self.template.dim != self.ansatz.dim:
            raise DimensionMismatchError(
                f"template dim {self.template.dim} != 2^{self.ansatz.num_qubits}"
            )

    @property
    def outcomes(self) -> int:
        return len(self.template)

    def _stack(self) -> np.ndarray:
        return np.stack([e.matrix for e in self.template])


def effects_at(p: ParametrizedPOVM, theta: Sequence[float]) -> POVM:
    u = build_unitary(p.ansatz, theta)
    return POVM([u.conj().T @ f.matrix @ u for f in p.template])


def _encode_all(data: LabeledDataset, encoder: Encoder) -> np.ndarray:
    return np.stack([encoder(x).matrix for x in data.features])


def _batch_probs(p: ParametrizedPOVM, rhos: np.ndarray, theta) -> np.ndarray:
    """(N, m) Born probabilities for a stack of N density matrices."""
    u = build_unitary(p.ansatz, theta)
    rotated = u @ rhos @ u.conj().T
    probs = np.einsum("nij,kji->nk", rotated, p._stack()).real
    return np.clip(probs, 0.0, 1.0)


def probabilities(p: ParametrizedPOVM, rho: DensityOperator, theta) -> OutcomeDistribution:
    if rho.dim != p.ansatz.dim:
        raise DimensionMismatchError(f"state dim {rho.dim} != POVM dim {p.ansatz.dim}")
    return OutcomeDistribution(_batch_probs(p, rho.matrix[None], theta)[0])


def _risk(probs: np.ndarray, labels: np.ndarray, kind: str) -> float:
    n = labels.size
    p_true = probs[np.arange(n), labels]
    if kind == "cross_entropy":
        return float(np.mean(-np.log(np.maximum(p_true, CE_EPS))))
    if kind == "margin":
        others = probs.copy()
        others[np.arange(n), labels] = -np.inf
        runner_up = others.max(axis=1) if probs.shape[1] > 1 else np.zeros(n)
        return float(np.mean(np.maximum(0.0, MARGIN - (p_true - runner_up))))
    raise InvalidParameterError(f"unknown loss {kind!r}")


def _check_classes(p: ParametrizedPOVM, data: LabeledDataset) -> None:
    if data.num_classes != p.outcomes:
        raise QGCError(f"dataset has {data.num_classes} classes but POVM has {p.outcomes} outcomes")


def loss(
    p: ParametrizedPOVM,
    data: LabeledDataset,
    encoder: Encoder,
    theta,
    kind: Literal["cross_entropy", "margin"] = "cross_entropy",
) -> float:
    _check_classes(p, data)
    return _risk(_batch_probs(p, _encode_all(data, encoder), theta), data.labels, kind)


def success_rate(p: ParametrizedPOVM, data: LabeledDataset, encoder: Encoder, theta) -> float:
    """Mean probability of the correct outcome (a single-shot success rate)."""
    _check_classes(p, data)
    probs = _batch_probs(p, _encode_all(data, encoder), theta)
    return float(np.mean(probs[np.arange(len(data)), data.labels]))


def accuracy(p: ParametrizedPOVM, data: LabeledDataset, encoder: Encoder, theta) -> float:
    """Fraction of examples whose argmax outcome (ties -> lowest index) is the label."""
    _check_classes(p, data)
    probs = _batch_probs(p, _encode_all(data, encoder), theta)
    return float(np.mean(np.argmax(probs, axis=1) == data.labels))


@dataclass(frozen=True)
class TrainingConfig:
    max_iters: int = 200
    learning_rate: float = 0.5
    fd_step: float = 1e-5
    seed: int = 0
    loss: Literal["cross_entropy", "margin"] = "cross_entropy"
    tolerance: float = 1e-10
    init: Literal["zeros", "random"] = "zeros"

    def __post_init__(self):
        if self.max_iters < 0:
            raise InvalidParameterError("max_iters must be nonnegative")
        for name in ("learning_rate", "fd_step", "tolerance"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive")
        if self.loss not in ("cross_entropy", "margin"):
            raise InvalidParameterError(f"unknown loss {self.loss!r}")


@dataclass
class TrainingReport:
    loss_trace: list[float]
    best_theta: np.ndarray
    final_accuracy: float
    iters_run: int
    success_rate: float = 0.0
    raw_loss_trace: list[float] = field(default_factory=list)
    validity_trace: list[tuple[float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "loss_trace": [float(v) for v in self.loss_trace],
            "best_theta": [float(v) for v in self.best_theta],
            "final_accuracy": float(self.final_accuracy),
            "success_rate": float(self.success_rate),
            "iters_run": int(self.iters_run),
        }


def povm_validity(povm: POVM) -> tuple[float, float]:
    """(completeness defect ||sum E - I||_F, smallest eigenvalue over all effects)."""
    defect = float(np.linalg.norm(sum(e.matrix for e in povm) - np.eye(povm.dim)))
    min_eig = min(float(np.linalg.eigvalsh(e.matrix)[0]) for e in povm)
    return defect, min_eig


def fd_gradient(objective: Callable[[np.ndarray], float], theta: np.ndarray, h: float) -> np.ndarray:
    grad = np.empty_like(theta)
    for k in range(theta.size):
        step = np.zeros_like(theta)
        step[k] = h
        grad[k] = (objective(theta + step) - objective(theta - step)) / (2 * h)
    return grad


def train(
    p: ParametrizedPOVM, data: LabeledDataset, encoder: Encoder, cfg: TrainingConfig = TrainingConfig()
) -> TrainingReport:
    """Gradient descent with best-so-far tracking.

    Stops after ``max_iters`` steps, or once the best loss improved by less
    than ``tolerance`` over the last 10 iterations.
    """
    _check_classes(p, data)
    rhos = _encode_all(data, encoder)
    labels = data.labels

    def objective(th: np.ndarray) -> float:
        value = _risk(_batch_probs(p, rhos, th), labels, cfg.loss)
        if not math.isfinite(value):
            raise TrainingError(f"non-finite loss at theta={th.tolist()}")
        return value

    if cfg.init == "random":
        theta = np.random.default_rng(cfg.seed).normal(scale=0.1, size=p.ansatz.num_params)
    else:
        theta = np.zeros(p.ansatz.num_params)

    current = objective(theta)
    best_loss, best_theta = current, theta.copy()
    trace, raw = [best_loss], [current]
    validity = [povm_validity(effects_at(p, theta))]
    iters = 0
    for it in range(cfg.max_iters):
        grad = fd_gradient(objective, theta, cfg.fd_step)
        theta = theta - cfg.learning_rate * grad
        current = objective(theta)
        validity.append(povm_validity(effects_at(p, theta)))
        if current < best_loss:
            best_loss, best_theta = current, theta.copy()
        trace.append(best_loss)
        raw.append(current)
        iters = it + 1
        if iters >= 10 and trace[-11] - best_loss < cfg.tolerance:
            log.debug("stopping at iteration %d: loss plateau %.3e", iters, best_loss)
            break

    probs = _batch_probs(p, rhos, best_theta)
    acc = float(np.mean(np.argmax(probs, axis=1) == labels))
    succ = float(np.mean(probs[np.arange(labels.size), labels]))
    return TrainingReport(
        loss_trace=trace,
        best_theta=best_theta,
        final_accuracy=acc,
        iters_run=iters,
        success_rate=succ,
        raw_loss_trace=raw,
        validity_trace=validity,
    )
