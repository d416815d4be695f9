import csv
import io
import json
import math
from pathlib import Path

import numpy as np
import pytest

from qgc.cli import main

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def _ok(capsys, *argv):
    code, out, err = _run(capsys, *argv)
    assert code == 0, err
    return out


def _close(a, b, tol=1e-12):
    if isinstance(a, dict):
        assert a.keys() == b.keys()
        for k in a:
            _close(a[k], b[k], tol)
    elif isinstance(a, list):
        assert len(a) == len(b)
        for x, y in zip(a, b):
            _close(x, y, tol)
    elif isinstance(a, float) or isinstance(b, float):
        assert a == pytest.approx(b, abs=tol)
    else:
        assert a == b


@pytest.mark.parametrize(
    "golden, argv",
    [
        ("helstrom_zero_plus.json", ["helstrom", "--rho0", DATA / "zero.json", "--rho1", DATA / "plus.json"]),
        ("parity_bell.json", ["parity", "--state", "bell"]),
        (
            "channel_dress_amp_damp.json",
            ["channel-dress", "--channel", DATA / "amp_damp.json", "--effect", "P0", "--states", DATA / "one.json"],
        ),
        (
            "pipeline_eval_helstrom.json",
            ["pipeline-eval", "--config", DATA / "helstrom_pipeline.json", "--states", DATA / "zero_plus_states.json"],
        ),
    ],
)
def test_golden_outputs(capsys, golden, argv):
    _close(json.loads(_ok(capsys, *argv)), json.loads((GOLDEN / golden).read_text()))


def test_golden_values_match_closed_forms():
    h = json.loads((GOLDEN / "helstrom_zero_plus.json").read_text())
    ceiling = 0.5 * (1 + 1 / math.sqrt(2))
    assert h["optimal_value"] == pytest.approx(ceiling, abs=1e-11)
    assert h["trace_norm"] == pytest.approx(1 / math.sqrt(2), abs=1e-11)
    # E* projects onto cos(pi/8)|0> - sin(pi/8)|1>
    v = np.array([math.cos(math.pi / 8), -math.sin(math.pi / 8)])
    np.testing.assert_allclose(h["e_star"]["re"], np.outer(v, v), atol=1e-11)
    assert json.loads((GOLDEN / "parity_bell.json").read_text()) == {"p_even": 1.0, "p_odd": 0.0}
    d = json.loads((GOLDEN / "channel_dress_amp_damp.json").read_text())
    assert d["dressed_effect"]["re"] == [[1.0, 0.0], [0.0, 0.5]]
    assert d["rows"][0]["schrodinger"] == d["rows"][0]["heisenberg"] == 0.5
    e = json.loads((GOLDEN / "pipeline_eval_helstrom.json").read_text())
    assert e["success_rate"] == pytest.approx(ceiling, abs=1e-11)


def test_output_uses_12_significant_digits(capsys):
    out = json.loads(_ok(capsys, "helstrom", "--rho0", DATA / "zero.json", "--rho1", DATA / "plus.json"))
    assert repr(out["optimal_value"]) == "0.853553390593"


def test_qubit_sweep_csv_degrees_and_radians(capsys):
    rows = list(csv.reader(io.StringIO(_ok(capsys, "qubit-sweep", "--theta-steps", 10, "--phi-steps", 2))))
    assert rows[0] == ["theta", "phi", "membership"]
    body = [[float(v) for v in r] for r in rows[1:]]
    assert len(body) == 20
    at40 = [r for r in body if abs(r[0] - 40) < 1e-9]
    assert at40 and all(abs(r[2] - 0.883022221559) < 1e-11 for r in at40)
    assert max(r[1] for r in body) == 180
    rad = list(csv.reader(io.StringIO(_ok(capsys, "qubit-sweep", "--theta-steps", 2, "--phi-steps", 2, "--radians"))))
    assert float(rad[-1][0]) == pytest.approx(math.pi, abs=1e-11)


def test_sweep_effect_options(capsys):
    half = list(csv.reader(io.StringIO(_ok(capsys, "qubit-sweep", "--theta-steps", 3, "--phi-steps", 3, "--effect", "half"))))
    assert {r[2] for r in half[1:]} == {"0.5"}
    bloch = list(csv.reader(io.StringIO(_ok(capsys, "mixed-sweep", "--r-steps", 2, "--angle-steps", 2, "--bloch", "0.5,0,0,0.5"))))
    assert [r[2] for r in bloch[1:]] == ["0.5", "0.5", "1", "0"]


def test_vel_train_and_trace(capsys, tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("x,label\n0,0\n0,0\n1,1\n1,1\n")
    ansatz = tmp_path / "a.json"
    ansatz.write_text('{"qubits": 1, "layers": 1}')
    trace = tmp_path / "t.csv"
    rep = json.loads(_ok(capsys, "vel-train", "--data", data, "--ansatz", ansatz, "--iters", 3, "--trace", trace))
    assert rep["final_accuracy"] == 1.0 and rep["iters_run"] == 3
    assert trace.read_text().splitlines()[0] == "iteration,best_loss,loss"


def test_pipeline_run_row_and_confusion(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "input_mode": "classical",
        "encoder": "amplitude",
        "measurement": {"computational": 2},
    }))
    d = json.loads(_ok(capsys, "pipeline-run", "--config", cfg, "--row", "0.6,0.8"))
    assert d["label"] == 1
    assert d["memberships"] == pytest.approx([0.36, 0.64], abs=1e-12)
    data = tmp_path / "d.csv"
    data.write_text("a,b,label\n0.6,0.8,1\n1,0,0\n0.9,0.1,1\n")
    conf = tmp_path / "conf.csv"
    m = json.loads(_ok(capsys, "pipeline-eval", "--config", cfg, "--data", data, "--confusion", conf))
    assert m["accuracy"] == pytest.approx(2 / 3)
    assert conf.read_text().splitlines() == ["true,pred_0,pred_1", "0,1,0", "1,1,1"]


def test_seed_env_fallback(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"measurement": {"computational": 2}, "shots": 40}))
    argv = ["pipeline-run", "--config", cfg, "--state", DATA / "plus.json"]
    monkeypatch.setenv("QGC_SEED", "17")
    from_env = json.loads(_ok(capsys, *argv))
    assert from_env["shot_record"]["seed"] == 17
    explicit = json.loads(_ok(capsys, *argv, "--seed", 17))
    assert explicit == from_env
    assert json.loads(_ok(capsys, *argv, "--seed", 18))["shot_record"]["seed"] == 18


def test_out_flag_writes_file(capsys, tmp_path):
    target = tmp_path / "p.json"
    assert _ok(capsys, "parity", "--state", "01", "--out", target) == ""
    assert json.loads(target.read_text()) == {"p_even": 0.0, "p_odd": 1.0}


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        [],
        ["parity", "--state", "missing.json"],
        ["qubit-sweep", "--theta-steps", "1"],
        ["qubit-sweep", "--effect", "P7"],
        ["qubit-sweep", "--bloch", "1,2"],
        ["helstrom", "--rho0", "00"],
        ["pipeline-run", "--config", str(DATA / "helstrom_pipeline.json")],
    ],
)
def test_errors_exit_2_with_json(capsys, argv):
    code, out, err = _run(capsys, *argv)
    assert code == 2
    payload = json.loads(err)
    assert set(payload) == {"error", "message"} and payload["message"]


def test_invalid_json_effect_is_reported(capsys, tmp_path):
    bad = tmp_path / "e.json"
    bad.write_text('{"re": [[2, 0], [0, 0]]}')
    code, _, err = _run(capsys, "qubit-sweep", "--effect", bad)
    assert code == 2
    assert json.loads(err)["error"] == "InvalidEffectError"
