"""Quantum granular decision pipeline.

Input -> (granulate + encode) -> Born memberships, exact or shot-estimated ->
classical decision rule.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence, Union

import numpy as np

from .encoding import Encoder, LabeledDataset
from .errors import ConfigError, DimensionMismatchError, QGCError
from .granules import POVM, complement
from .helstrom import BinaryHypothesis, optimal_granule
from .measurement import OutcomeDistribution, ShotRecord, outcome_probabilities, sample_shots
from .states import DensityOperator, StateVector, pure_state
from .vel import ParametrizedPOVM, effects_at

__all__ = [
    "DecisionRule",
    "PipelineConfig",
    "Decision",
    "Metrics",
    "run",
    "evaluate",
    "helstrom_rule_from",
    "example_seed",
]

Label = Union[int, Literal["accept", "reject"]]


@dataclass(frozen=True)
class DecisionRule:
    """Maps a membership vector to a label.

    ``threshold`` is binary-only: accept iff ``p[index] >= cutoff``.
    ``argmax`` and ``helstrom_binary`` break ties towards the lowest index.
    """

    kind: Literal["argmax", "threshold", "helstrom_binary"] = "argmax"
    index: int = 0
    cutoff: float = 0.5

    def __post_init__(self):
        if self.kind not in ("argmax", "threshold", "helstrom_binary"):
            raise ConfigError(f"unknown decision rule {self.kind!r}")
        if not 0.0 <= self.cutoff <= 1.0:
            raise ConfigError("threshold cutoff must lie in [0, 1]")

    def arity(self) -> int | None:
        return None if self.kind == "argmax" else 2

    def apply(self, p: Sequence[float]) -> Label:
        p = np.asarray(p, dtype=float)
        if self.arity() is not None and p.size != 2:
            raise ConfigError(f"{self.kind} rule needs exactly two outcomes, got {p.size}")
        if self.kind == "threshold":
            return "accept" if p[self.index] >= self.cutoff else "reject"
        return int(np.argmax(p))

    @staticmethod
    def label_index(label: Label) -> int:
        """Class index of a label; accept -> 0, reject -> 1."""
        if label == "accept":
            return 0
        if label == "reject":
            return 1
        return int(label)


@dataclass(frozen=True, eq=False)
class PipelineConfig:
    input_mode: Literal["classical", "quantum"]
    measurement: Union[POVM, ParametrizedPOVM]
    rule: DecisionRule = DecisionRule()
    encoder: Encoder | None = None
    theta: tuple[float, ...] | None = None
    shots: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.input_mode not in ("classical", "quantum"):
            raise ConfigError(f"unknown input mode {self.input_mode!r}")
        if self.input_mode == "classical" and self.encoder is None:
            raise ConfigError("classical input mode requires an encoder")
        if self.shots is not None and self.shots <= 0:
            raise ConfigError("shots must be positive when given")
        if isinstance(self.measurement, ParametrizedPOVM):
            n = self.measurement.ansatz.num_params
            theta = tuple(self.theta) if self.theta is not None else (0.0,) * n
            if len(theta) != n:
                raise ConfigError(f"parametrized POVM needs {n} angles, got {len(theta)}")
            object.__setattr__(self, "theta", theta)
            povm = effects_at(self.measurement, theta)
        else:
            povm = self.measurement
        arity = self.rule.arity()
        if arity is not None and len(povm) != arity:
            raise ConfigError(f"{self.rule.kind} rule needs {arity} outcomes, POVM has {len(povm)}")
        object.__setattr__(self, "_povm", povm)

    @property
    def povm(self) -> POVM:
        return self._povm

    @property
    def num_labels(self) -> int:
        return 2 if self.rule.kind == "threshold" else len(self.povm)


@dataclass(frozen=True, eq=False)
class Decision:
    label: Label
    memberships: OutcomeDistribution
    exact: OutcomeDistribution
    shot_record: ShotRecord | None = None
    soft: tuple[float, float] | None = field(default=None)

    def to_dict(self) -> dict:
        d = {
            "label": self.label,
            "memberships": [float(v) for v in self.memberships.probabilities],
            "exact_memberships": [float(v) for v in self.exact.probabilities],
        }
        if self.soft is not None:
            d["mu0"], d["mu1"] = (float(v) for v in self.soft)
        if self.shot_record is not None:
            d["shot_record"] = self.shot_record.to_dict()
        return d


def example_seed(seed: int, index: int) -> int:
    """Per-example seed used by ``evaluate``; independent of processing order."""
    return (int(seed) ^ int(index)) & 0xFFFF_FFFF_FFFF_FFFF


def _prepare(cfg: PipelineConfig, inp) -> DensityOperator:
    if cfg.input_mode == "quantum":
        if isinstance(inp, StateVector):
            return pure_state(inp)
        if isinstance(inp, DensityOperator):
            return inp
        raise QGCError("quantum input mode expects a DensityOperator or StateVector")
    if isinstance(inp, (DensityOperator, StateVector)):
        raise QGCError("classical input mode expects a feature vector, got a quantum state")
    return cfg.encoder(np.asarray(inp, dtype=float))


def run(cfg: PipelineConfig, inp, seed: int | None = None) -> Decision:
    """Evaluate one input through the pipeline.

    With ``cfg.shots`` set, the decision uses empirical frequencies from a
    seeded multinomial draw (``seed`` overrides ``cfg.seed``).
    """
    rho = _prepare(cfg, inp)
    if rho.dim != cfg.povm.dim:
        raise DimensionMismatchError(f"encoded state dim {rho.dim} != POVM dim {cfg.povm.dim}")
    exact = outcome_probabilities(rho, cfg.povm)
    record = None
    used = exact
    if cfg.shots is not None:
        record = sample_shots(exact, cfg.shots, cfg.seed if seed is None else seed)
        used = OutcomeDistribution(record.frequencies())
    soft = None
    if cfg.rule.kind == "helstrom_binary":
        soft = (used[0], 1.0 - used[0])
    return Decision(cfg.rule.apply(used.probabilities), used, exact, record, soft)


@dataclass(frozen=True)
class Metrics:
    """Evaluation summary.

    ``success_rate`` is the mean membership assigned to the true label, i.e.
    the single-shot success probability of the measurement.
    """

    accuracy: float
    confusion: np.ndarray
    success_rate: float

    def to_dict(self) -> dict:
        return {
            "accuracy": float(self.accuracy),
            "success_rate": float(self.success_rate),
            "confusion": self.confusion.tolist(),
        }


def evaluate(cfg: PipelineConfig, data: LabeledDataset | Sequence[tuple[object, int]]) -> Metrics:
    """Accuracy and confusion matrix (rows true label, columns prediction)."""
    pairs = list(data)
    if not pairs:
        raise QGCError("cannot evaluate on an empty dataset")
    k = cfg.num_labels
    confusion = np.zeros((k, k), dtype=int)
    correct_mass = 0.0
    for i, (inp, label) in enumerate(pairs):
        label = int(label)
        if not 0 <= label < k:
            raise QGCError(f"label {label} out of range for {k} decision labels")
        d = run(cfg, inp, seed=example_seed(cfg.seed, i))
        confusion[label, DecisionRule.label_index(d.label)] += 1
        p = d.memberships.probabilities
        if cfg.rule.kind == "threshold":
            # label 0 <-> accept <-> p[index] >= cutoff
            hit = p[cfg.rule.index] if label == 0 else 1.0 - p[cfg.rule.index]
        else:
            hit = p[label]
        correct_mass += float(hit)
    n = len(pairs)
    return Metrics(float(np.trace(confusion)) / n, confusion, correct_mass / n)


def helstrom_rule_from(hyp: BinaryHypothesis) -> tuple[DecisionRule, POVM]:
    """Two-outcome POVM ``{E*, I - E*}`` with an argmax rule over it."""
    e_star = optimal_granule(hyp)
    return DecisionRule("helstrom_binary"), POVM([e_star, complement(e_star)])
