"""``qgc`` command line.

Every subcommand writes JSON or CSV to stdout (or ``--out``) with numbers at
12 significant digits.  Failures exit with status 2 and a JSON object
``{"error": ..., "message": ...}`` on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .casestudies import channel_dress, mixed_sweep, parity_report, qubit_sweep
from .encoding import Encoder
from .errors import QGCError
from .granules import Effect, qubit_effect
from .helstrom import BinaryHypothesis, helstrom, soft_memberships
from .islands import boolean_island, is_commuting_family, worst_commutator
from .pipeline import evaluate, run
from .states import DensityOperator, bell_state, ket, pure_state
from .vel import ParametrizedPOVM, TrainingConfig, train


class CLIError(QGCError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(message)


def _default_seed() -> int:
    return int(os.environ.get("QGC_SEED", "0"))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(io.rounded(obj), indent=2) + "\n"


def _csv(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([io.fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _effect_arg(args) -> Effect:
    if args.bloch:
        parts = [float(v) for v in args.bloch.split(",")]
        if len(parts) != 4:
            raise CLIError("--bloch takes alpha,ex,ey,ez")
        return qubit_effect(io.bloch_effect_from_json({"alpha": parts[0], "e": parts[1:]}))
    spec = args.effect
    if Path(spec).is_file():
        return io.effect_from_json(io.load_json(spec))
    return io.effect_from_json(spec)


_PRESETS = {
    "bell": lambda: bell_state(),
    "00": lambda: ket("00"),
    "01": lambda: ket("01"),
    "10": lambda: ket("10"),
    "11": lambda: ket("11"),
}


def _state_arg(spec: str) -> DensityOperator:
    if spec in _PRESETS:
        return pure_state(_PRESETS[spec]())
    return io.density_from_json(io.load_json(spec))


# -- subcommands --------------------------------------------------------------

def cmd_qubit_sweep(args) -> None:
    rows = qubit_sweep(args.theta_steps, args.phi_steps, _effect_arg(args))
    if not args.radians:
        rows[:, :2] = np.degrees(rows[:, :2])
    _emit(_csv(["theta", "phi", "membership"], rows.tolist()), args.out)


def cmd_mixed_sweep(args) -> None:
    rows = mixed_sweep(args.r_steps, args.angle_steps, _effect_arg(args))
    if not args.radians:
        rows[:, 1] = np.degrees(rows[:, 1])
    _emit(_csv(["r_norm", "angle", "membership"], rows.tolist()), args.out)


def cmd_parity(args) -> None:
    _emit(_json(parity_report(_state_arg(args.state))), args.out)


def cmd_helstrom(args) -> None:
    hyp = BinaryHypothesis(_state_arg(args.rho0), _state_arg(args.rho1), args.pi0, 1.0 - args.pi0)
    res = helstrom(hyp)
    probe = _state_arg(args.probe) if args.probe else hyp.rho0
    mu0, mu1 = soft_memberships(probe, res.optimal_granule)
    _emit(
        _json(
            {
                "trace_norm": res.trace_norm,
                "optimal_value": res.optimal_value,
                "e_star": io.matrix_to_json(res.optimal_granule.matrix),
                "mu0": mu0,
                "mu1": mu1,
            }
        ),
        args.out,
    )


def cmd_island_check(args) -> None:
    effects = list(io.povm_from_json(io.load_json(args.effects)).effects) if args.povm else [
        io.effect_from_json(e) for e in io.load_json(args.effects)
    ]
    pair, norm = worst_commutator(effects)
    commuting = is_commuting_family(effects)
    report = {
        "commuting": commuting,
        "worst_pair": list(pair) if pair else None,
        "commutator_norm": norm,
        "functions": [f.tolist() for f in boolean_island(effects).functions] if commuting else None,
    }
    _emit(_json(report), args.out)


def cmd_channel_dress(args) -> None:
    channel = io.channel_from_json(io.load_json(args.channel))
    spec = args.effect
    effect = io.effect_from_json(io.load_json(spec) if Path(spec).is_file() else spec)
    states = [io.density_from_json(s) for s in io.load_json(args.states)]
    rep = channel_dress(channel, effect, states)
    rep["dressed_effect"] = io.effect_to_json(rep["dressed_effect"])
    _emit(_json(rep), args.out)


def cmd_vel_train(args) -> None:
    ansatz = io.ansatz_from_json(io.load_json(args.ansatz))
    data = io.read_dataset_csv(args.data, args.classes)
    granules = io.granules_from_json(io.load_json(args.granules)) if args.granules else ()
    template = (
        io.povm_from_json(io.load_json(args.template))
        if args.template
        else io.template_for(ansatz.num_qubits, data.num_classes)
    )
    cfg = TrainingConfig(
        max_iters=args.iters,
        learning_rate=args.lr,
        fd_step=args.fd_step,
        seed=args.seed if args.seed is not None else _default_seed(),
        loss=args.loss,
    )
    report = train(ParametrizedPOVM(template, ansatz), data, Encoder(args.encoder, granules), cfg)
    if args.trace:
        rows = [(i, best, raw) for i, (best, raw) in enumerate(zip(report.loss_trace, report.raw_loss_trace))]
        Path(args.trace).write_text(_csv(["iteration", "best_loss", "loss"], rows))
    _emit(_json(report.to_dict()), args.out)


def _config(args):
    seed = args.seed if args.seed is not None else _default_seed()
    return io.pipeline_config_from_json(io.load_json(args.config), seed=seed)


def cmd_pipeline_run(args) -> None:
    cfg = _config(args)
    if args.state:
        inp = io.state_from_json(io.load_json(args.state))
    elif args.row:
        inp = io.parse_row(args.row)
    else:
        raise CLIError("pipeline-run needs --state or --row")
    _emit(_json(run(cfg, inp).to_dict()), args.out)


def cmd_pipeline_eval(args) -> None:
    cfg = _config(args)
    if args.data:
        data = list(io.read_dataset_csv(args.data, cfg.num_labels))
    elif args.states:
        data = [(io.state_from_json(d["state"]), int(d["label"])) for d in io.load_json(args.states)]
    else:
        raise CLIError("pipeline-eval needs --data or --states")
    metrics = evaluate(cfg, data)
    if args.confusion:
        k = metrics.confusion.shape[0]
        Path(args.confusion).write_text(
            _csv(["true"] + [f"pred_{j}" for j in range(k)], [[i, *row] for i, row in enumerate(metrics.confusion.tolist())])
        )
    _emit(_json(metrics.to_dict()), args.out)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qgc", description="Quantum granular computing laboratory")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def effect_opts(sp, default="P0"):
        sp.add_argument("--effect", default=default, help="P0, P1, I, half, or an effect JSON file")
        sp.add_argument("--bloch", help="Bloch-form effect as alpha,ex,ey,ez")
        sp.add_argument("--radians", action="store_true", help="emit angles in radians instead of degrees")

    sp = sub.add_parser("qubit-sweep", help="pure-qubit memberships over a theta/phi grid")
    sp.add_argument("--theta-steps", type=int, default=181)
    sp.add_argument("--phi-steps", type=int, default=36)
    effect_opts(sp)
    sp.set_defaults(func=cmd_qubit_sweep)

    sp = sub.add_parser("mixed-sweep", help="mixed-qubit memberships over Bloch radius and angle")
    sp.add_argument("--r-steps", type=int, default=11)
    sp.add_argument("--angle-steps", type=int, default=19)
    effect_opts(sp)
    sp.set_defaults(func=cmd_mixed_sweep)

    sp = sub.add_parser("parity", help="two-qubit parity memberships")
    sp.add_argument("--state", default="bell", help="bell, 00, 01, 10, 11, or a state JSON file")
    sp.set_defaults(func=cmd_parity)

    sp = sub.add_parser("helstrom", help="optimal binary decision granule")
    sp.add_argument("--rho0", required=True)
    sp.add_argument("--rho1", required=True)
    sp.add_argument("--pi0", type=float, default=0.5)
    sp.add_argument("--probe", help="state whose soft memberships are reported (default rho0)")
    sp.set_defaults(func=cmd_helstrom)

    sp = sub.add_parser("island-check", help="commutativity test and classical representation")
    sp.add_argument("--effects", required=True, help="JSON array of effects")
    sp.add_argument("--povm", action="store_true", help="also require the effects to sum to I")
    sp.set_defaults(func=cmd_island_check)

    sp = sub.add_parser("channel-dress", help="Schroedinger vs Heisenberg memberships under a channel")
    sp.add_argument("--channel", required=True)
    sp.add_argument("--effect", required=True)
    sp.add_argument("--states", required=True, help="JSON array of states")
    sp.set_defaults(func=cmd_channel_dress)

    sp = sub.add_parser("vel-train", help="train a variational POVM")
    sp.add_argument("--data", required=True, help="dataset CSV")
    sp.add_argument("--ansatz", required=True, help='ansatz JSON {"qubits": n, "layers": l}')
    sp.add_argument("--granules", help="granule-spec JSON (default: raw features)")
    sp.add_argument("--template", help="template POVM JSON (default: computational blocks)")
    sp.add_argument("--encoder", choices=["amplitude", "angle"], default="angle")
    sp.add_argument("--classes", type=int)
    sp.add_argument("--iters", type=int, default=200)
    sp.add_argument("--lr", type=float, default=0.5)
    sp.add_argument("--fd-step", type=float, default=1e-5)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--loss", choices=["cross_entropy", "margin"], default="cross_entropy")
    sp.add_argument("--trace", help="write the loss trace CSV here")
    sp.set_defaults(func=cmd_vel_train)

    sp = sub.add_parser("pipeline-run", help="run one input through a decision pipeline")
    sp.add_argument("--config", required=True)
    sp.add_argument("--state", help="state JSON (quantum mode)")
    sp.add_argument("--row", help="comma-separated features (classical mode)")
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_pipeline_run)

    sp = sub.add_parser("pipeline-eval", help="evaluate a decision pipeline on a dataset")
    sp.add_argument("--config", required=True)
    sp.add_argument("--data", help="dataset CSV (classical mode)")
    sp.add_argument("--states", help='JSON array of {"state": ..., "label": k} (quantum mode)')
    sp.add_argument("--confusion", help="write the confusion matrix CSV here")
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_pipeline_eval)

    for sp in sub.choices.values():
        sp.add_argument("--out", help="write output here instead of stdout")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except (QGCError, ValueError, KeyError, TypeError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(err) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
