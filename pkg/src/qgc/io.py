"""JSON and CSV schemas used by the command line.

Matrices:       {"re": [[...]], "im": [[...]]}            ("im" optional)
States:         {"dim": n, "re": ..., "im": ...}          density operator
                {"amplitudes_re": [...], "amplitudes_im": [...]}  pure state
Effects:        the density-operator schema, {"alpha": a, "e": [ex, ey, ez]},
                or one of the names "P0", "P1", "I", "half"
POVMs:          JSON array of effects
Channels:       {"dim_in": n, "dim_out": m, "kraus": [matrix, ...]}
                or {"kind": "depolarizing"|"amplitude_damping"|"dephasing", "p": x}
Granule specs:  [{"kind": ..., "params": [...], "feature": i}, ...]
Ansatz:         {"qubits": n, "layers": l}
Datasets (CSV): header row, feature columns, integer "label" column
                (the last column if none is named "label").

The Choi matrices this package produces are normalized to unit trace.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from . import channels as ch
from .encoding import ClassicalGranule, Encoder, LabeledDataset
from .errors import ConfigError
from .granules import POVM, Effect, QubitEffectBloch, computational_pvm, parity_effects, qubit_effect
from .helstrom import BinaryHypothesis
from .pipeline import DecisionRule, PipelineConfig, helstrom_rule_from
from .states import DensityOperator, StateVector
from .vel import ParametrizedPOVM, hardware_efficient

SIG_DIGITS = 12


def fmt(x: float) -> str:
    return f"{float(x):.{SIG_DIGITS}g}"


def rounded(obj: Any) -> Any:
    """Recursively round floats to 12 significant digits for stable output."""
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(fmt(v)) if math.isfinite(v) else v
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return rounded(obj.tolist())
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


def load_json(path: str | Path) -> Any:
    with open(path) as fh:
        return json.load(fh)


# -- matrices and states ----------------------------------------------------

def matrix_from_json(d: dict) -> np.ndarray:
    if "re" not in d:
        raise ConfigError("matrix object needs an 're' field")
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape:
        raise ConfigError("'re' and 'im' parts have different shapes")
    return re + 1j * im


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def state_from_json(d: dict) -> DensityOperator | StateVector:
    if "amplitudes_re" in d:
        re = np.asarray(d["amplitudes_re"], dtype=float)
        im = np.asarray(d.get("amplitudes_im", np.zeros_like(re)), dtype=float)
        return StateVector(re + 1j * im)
    m = matrix_from_json(d)
    if "dim" in d and m.shape != (d["dim"], d["dim"]):
        raise ConfigError(f"declared dim {d['dim']} does not match matrix shape {m.shape}")
    return DensityOperator(m)


def density_from_json(d: dict) -> DensityOperator:
    s = state_from_json(d)
    if isinstance(s, StateVector):
        from .states import pure_state

        return pure_state(s)
    return s


def state_to_json(s: DensityOperator | StateVector) -> dict:
    if isinstance(s, StateVector):
        return {"amplitudes_re": s.amplitudes.real.tolist(), "amplitudes_im": s.amplitudes.imag.tolist()}
    return {"dim": s.dim, **matrix_to_json(s.matrix)}


# -- effects and measurements -------------------------------------------------

_NAMED = {
    "P0": lambda: Effect(np.diag([1.0, 0.0])),
    "P1": lambda: Effect(np.diag([0.0, 1.0])),
    "I": lambda: Effect.identity(2),
    "half": lambda: Effect(np.eye(2) / 2),
}


def bloch_effect_from_json(d: dict) -> QubitEffectBloch:
    e = list(d["e"])
    if len(e) != 3:
        raise ConfigError("Bloch effect needs a 3-component 'e'")
    return QubitEffectBloch(float(d["alpha"]), *map(float, e))


def effect_from_json(d: Any) -> Effect:
    if isinstance(d, str):
        if d not in _NAMED:
            raise ConfigError(f"unknown named effect {d!r}; expected one of {sorted(_NAMED)}")
        return _NAMED[d]()
    if "alpha" in d:
        return qubit_effect(bloch_effect_from_json(d))
    m = matrix_from_json(d)
    if "dim" in d and m.shape != (d["dim"], d["dim"]):
        raise ConfigError(f"declared dim {d['dim']} does not match matrix shape {m.shape}")
    return Effect(m)


def effect_to_json(e: Effect) -> dict:
    return {"dim": e.dim, **matrix_to_json(e.matrix)}


def povm_from_json(items: list) -> POVM:
    if not isinstance(items, list):
        raise ConfigError("a POVM is a JSON array of effects")
    return POVM([effect_from_json(e) for e in items])


# -- channels -----------------------------------------------------------------

def channel_from_json(d: dict) -> ch.KrausChannel:
    kind = d.get("kind")
    if kind is not None:
        makers = {
            "depolarizing": ch.depolarizing,
            "amplitude_damping": ch.amplitude_damping,
            "dephasing": ch.dephasing,
        }
        if kind == "identity":
            return ch.identity_channel(int(d.get("dim", 2)))
        if kind not in makers:
            raise ConfigError(f"unknown channel kind {kind!r}")
        return makers[kind](float(d.get("p", d.get("gamma", 0.0))))
    kraus = [matrix_from_json(k) for k in d["kraus"]]
    channel = ch.KrausChannel(kraus)
    if (channel.dim_in, channel.dim_out) != (d.get("dim_in", channel.dim_in), d.get("dim_out", channel.dim_out)):
        raise ConfigError("declared channel dimensions do not match the Kraus operators")
    return channel


def channel_to_json(c: ch.KrausChannel) -> dict:
    return {"dim_in": c.dim_in, "dim_out": c.dim_out, "kraus": [matrix_to_json(k) for k in c.kraus]}


# -- encoding and datasets ------------------------------------------------------

def granules_from_json(items: list) -> tuple[ClassicalGranule, ...]:
    return tuple(ClassicalGranule.from_dict(g) for g in items)


def read_dataset_csv(path: str | Path, num_classes: int | None = None) -> LabeledDataset:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise ConfigError(f"{path}: need a header row and at least one example")
    header = [h.strip() for h in rows[0]]
    li = header.index("label") if "label" in header else len(header) - 1
    feats, labels = [], []
    for r in rows[1:]:
        if len(r) != len(header):
            raise ConfigError(f"{path}: row has {len(r)} fields, header has {len(header)}")
        labels.append(int(r[li]))
        feats.append([float(v) for k, v in enumerate(r) if k != li])
    k = num_classes if num_classes is not None else max(labels) + 1
    return LabeledDataset(np.array(feats), np.array(labels), k)


def parse_row(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.split(",")])


def template_for(num_qubits: int, num_classes: int) -> POVM:
    """Computational basis split into ``num_classes`` contiguous blocks."""
    dim = 2**num_qubits
    if num_classes > dim:
        raise ConfigError(f"{num_classes} classes do not fit in {num_qubits} qubit(s)")
    basis = computational_pvm(dim)
    blocks = np.array_split(np.arange(dim), num_classes)
    return POVM([sum(basis[i].matrix for i in b) for b in blocks])


def ansatz_from_json(d: dict):
    return hardware_efficient(int(d["qubits"]), int(d.get("layers", 1)))


# -- pipeline config -----------------------------------------------------------

def _measurement_from_json(d: dict):
    if "povm" in d:
        return povm_from_json(d["povm"]), None, None
    if "computational" in d:
        return computational_pvm(int(d["computational"])), None, None
    if d.get("parity"):
        return parity_effects(), None, None
    if "helstrom" in d:
        h = d["helstrom"]
        pi0 = float(h.get("pi0", 0.5))
        hyp = BinaryHypothesis(density_from_json(h["rho0"]), density_from_json(h["rho1"]), pi0, 1.0 - pi0)
        rule, povm = helstrom_rule_from(hyp)
        return povm, None, rule
    if "ansatz" in d:
        ansatz = ansatz_from_json(d["ansatz"])
        template = d.get("template")
        if template is None:
            template = template_for(ansatz.num_qubits, int(d.get("classes", 2)))
        else:
            template = povm_from_json(template)
        theta = d.get("theta")
        return ParametrizedPOVM(template, ansatz), theta, None
    raise ConfigError("measurement needs one of: povm, computational, parity, helstrom, ansatz")


def pipeline_config_from_json(d: dict, seed: int | None = None) -> PipelineConfig:
    measurement, theta, implied_rule = _measurement_from_json(d.get("measurement", {}))
    rule_d = d.get("rule")
    if rule_d is not None:
        rule = DecisionRule(rule_d.get("kind", "argmax"), int(rule_d.get("index", 0)), float(rule_d.get("cutoff", 0.5)))
    else:
        rule = implied_rule or DecisionRule()
    mode = d.get("input_mode", "quantum")
    encoder = None
    if mode == "classical":
        encoder = Encoder(d.get("encoder", "amplitude"), granules_from_json(d.get("granules", [])))
    shots = d.get("shots")
    return PipelineConfig(
        input_mode=mode,
        measurement=measurement,
        rule=rule,
        encoder=encoder,
        theta=tuple(theta) if theta is not None else None,
        shots=int(shots) if shots is not None else None,
        seed=int(d["seed"]) if "seed" in d else (seed or 0),
    )
