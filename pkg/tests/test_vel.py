import math

import numpy as np
import pytest

from qgc.encoding import Encoder, LabeledDataset
from qgc.errors import DimensionMismatchError, InvalidParameterError, QGCError, TrainingError
from qgc.granules import computational_pvm, parity_effects
from qgc.helstrom import BinaryHypothesis, helstrom
from qgc.states import DensityOperator, StateVector, maximally_mixed, pure_state
from qgc.vel import (
    Gate,
    ParametrizedPOVM,
    TrainingConfig,
    UnitaryAnsatz,
    build_unitary,
    effects_at,
    fd_gradient,
    hardware_efficient,
    loss,
    probabilities,
    train,
)

ANGLE = Encoder("angle")
ONE_QUBIT = ParametrizedPOVM(computational_pvm(2), hardware_efficient(1, 1))


def _ry(t):
    return UnitaryAnsatz(1, 1, (Gate("RY", (0,)),)), [t]


def test_build_unitary_examples(rng):
    a = hardware_efficient(3, 2)
    np.testing.assert_allclose(build_unitary(a), np.eye(8))
    ans, th = _ry(math.pi)
    # exp(-i pi Y / 2) = -iY maps |0> to |1>
    np.testing.assert_allclose(np.abs(build_unitary(ans, th) @ [1, 0]), [0, 1], atol=1e-15)
    two_rz = UnitaryAnsatz(2, 1, (Gate("RZ", (0,)), Gate("RZ", (1,))))
    swapped = UnitaryAnsatz(2, 1, (Gate("RZ", (1,)), Gate("RZ", (0,))))
    np.testing.assert_allclose(build_unitary(two_rz, [0.3, 0.9]), build_unitary(swapped, [0.9, 0.3]))
    theta = rng.uniform(-3, 3, a.num_params)
    u = build_unitary(a, theta)
    assert np.linalg.norm(u.conj().T @ u - np.eye(8)) <= 1e-9


def test_rzz_is_exp_zz():
    from scipy.linalg import expm

    from qgc.operators import Z, tensor

    ans = UnitaryAnsatz(2, 1, (Gate("RZZ", (0, 1)),))
    np.testing.assert_allclose(build_unitary(ans, [0.7]), expm(-0.35j * tensor(Z, Z)), atol=1e-14)


def test_ansatz_validation():
    with pytest.raises(InvalidParameterError):
        UnitaryAnsatz(1, 1, (Gate("RZZ", (0, 1)),))
    with pytest.raises(InvalidParameterError):
        Gate("RW", (0,))
    with pytest.raises(DimensionMismatchError):
        build_unitary(hardware_efficient(1), [0.0])


def test_effects_at_examples(rng):
    p = ONE_QUBIT
    for e, f in zip(effects_at(p, [0, 0]), p.template):
        np.testing.assert_allclose(e.matrix, f.matrix)
    ans, th = _ry(math.pi / 2)
    rot = effects_at(ParametrizedPOVM(computational_pvm(2), ans), th)
    # U^dag P0 U with U = RY(pi/2): projector onto RY(-pi/2)|0> = (|0> - |1>)/sqrt 2
    minus = np.array([1, -1]) / math.sqrt(2)
    np.testing.assert_allclose(rot[0].matrix, np.outer(minus, minus), atol=1e-15)
    big = ParametrizedPOVM(computational_pvm(4), hardware_efficient(2, 2))
    for _ in range(20):
        theta = rng.uniform(-4, 4, big.ansatz.num_params)
        povm = effects_at(big, theta)
        assert np.linalg.norm(sum(e.matrix for e in povm) - np.eye(4)) <= 1e-10
        for e, f in zip(povm, big.template):
            assert np.trace(e.matrix).real == pytest.approx(np.trace(f.matrix).real, abs=1e-10)


def test_probabilities_examples(rng):
    rho = DensityOperator(np.diag([0.3, 0.7]))
    np.testing.assert_allclose(probabilities(ONE_QUBIT, rho, [0, 0]).probabilities, [0.3, 0.7])
    p = ParametrizedPOVM(parity_effects(), hardware_efficient(2, 1))
    theta = rng.uniform(-3, 3, p.ansatz.num_params)
    np.testing.assert_allclose(probabilities(p, maximally_mixed(4), theta).probabilities, [0.5, 0.5], atol=1e-12)
    ans, _ = _ry(0)
    for t in (0.3, 1.1, 2.5):
        got = probabilities(ParametrizedPOVM(computational_pvm(2), ans), pure_state(StateVector([1, 0])), [t])
        np.testing.assert_allclose(got.probabilities, [math.cos(t / 2) ** 2, math.sin(t / 2) ** 2], atol=1e-14)


def _data(mus, labels):
    return LabeledDataset(np.array(mus, dtype=float).reshape(-1, 1), labels, 2)


def test_loss_examples():
    sep = _data([0, 1], [0, 1])
    assert loss(ONE_QUBIT, sep, ANGLE, [0, 0]) == pytest.approx(0, abs=1e-12)
    assert loss(ONE_QUBIT, sep, ANGLE, [0, 0], "margin") == 0
    # |+> gives uniform probabilities under the Z basis: cross-entropy log 2
    uni = _data([0.5, 0.5], [0, 1])
    assert loss(ONE_QUBIT, uni, ANGLE, [0, 0]) == pytest.approx(math.log(2), abs=1e-12)
    assert loss(ONE_QUBIT, uni, ANGLE, [0, 0], "margin") == pytest.approx(0.1, abs=1e-12)
    with pytest.raises(QGCError):
        loss(ONE_QUBIT, LabeledDataset([[0.0]], [0], 3), ANGLE, [0, 0])


def test_train_zero_iterations():
    r = train(ONE_QUBIT, _data([0, 0.5], [0, 1]), ANGLE, TrainingConfig(max_iters=0))
    assert r.iters_run == 0
    np.testing.assert_array_equal(r.best_theta, [0, 0])
    assert r.loss_trace == [pytest.approx(0.5 * math.log(2))]


def test_train_orthogonal_classes():
    r = train(ONE_QUBIT, _data([0] * 5 + [1] * 5, [0] * 5 + [1] * 5), ANGLE, TrainingConfig())
    assert r.final_accuracy == 1.0
    assert r.loss_trace[-1] < 0.01
    assert r.iters_run <= 200


def test_train_zero_vs_plus_reaches_helstrom():
    data = _data([0] * 10 + [0.5] * 10, [0] * 10 + [1] * 10)
    r = train(ONE_QUBIT, data, ANGLE, TrainingConfig())
    zero = pure_state(StateVector([1, 0]))
    plus = pure_state(StateVector.normalized([1, 1]))
    ceiling = helstrom(BinaryHypothesis(zero, plus)).optimal_value
    assert 0.84 <= r.success_rate <= ceiling + 1e-9
    assert np.all(np.diff(r.loss_trace) <= 0)
    for defect, min_eig in r.validity_trace:
        assert defect <= 1e-9 and min_eig >= -1e-9


def test_train_deterministic():
    data = _data([0.1, 0.2, 0.7, 0.9], [0, 0, 1, 1])
    cfg = TrainingConfig(max_iters=30, seed=5, init="random")
    a = train(ONE_QUBIT, data, ANGLE, cfg)
    b = train(ONE_QUBIT, data, ANGLE, cfg)
    assert a.raw_loss_trace == b.raw_loss_trace


def test_fd_directional_derivative(rng):
    p = ParametrizedPOVM(computational_pvm(4), hardware_efficient(2, 1))
    data = LabeledDataset(rng.uniform(0, 1, (6, 2)), [0, 1, 2, 3, 0, 1], 4)

    def f(th):
        return loss(p, data, ANGLE, th)

    h = 1e-5
    for _ in range(5):
        theta = rng.uniform(-1, 1, p.ansatz.num_params)
        v = rng.normal(size=theta.size)
        v /= np.linalg.norm(v)
        directional = fd_gradient(f, theta, h) @ v
        oracle = (f(theta + h * v) - f(theta - h * v)) / (2 * h)
        assert directional == pytest.approx(oracle, rel=1e-4, abs=1e-8)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_nonfinite_loss_aborts():
    cfg = TrainingConfig(max_iters=1, learning_rate=float("inf"))
    with pytest.raises(TrainingError):
        train(ONE_QUBIT, _data([0.5, 0.5], [0, 1]), ANGLE, cfg)
