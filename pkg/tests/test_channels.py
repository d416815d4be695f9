import numpy as np
import pytest

from qgc.channels import (
    KrausChannel,
    adjoint_apply,
    amplitude_damping,
    apply,
    apply_choi,
    choi,
    dephasing,
    depolarizing,
    dressed_granule,
    identity_channel,
    same_channel,
)
from qgc.errors import DimensionMismatchError, InvalidChannelError, InvalidParameterError
from qgc.granules import P0, Effect, membership
from qgc.operators import loewner_leq
from qgc.sampling import random_density, random_effect, random_kraus
from qgc.states import DensityOperator, StateVector, pure_state

PLUS = pure_state(StateVector.normalized([1, 1]))


def test_apply_examples(rng):
    rho = random_density(rng, 2)
    np.testing.assert_allclose(apply(identity_channel(2), rho).matrix, rho.matrix)
    np.testing.assert_allclose(apply(depolarizing(1), rho).matrix, np.eye(2) / 2, atol=1e-10)
    np.testing.assert_allclose(apply(amplitude_damping(1), rho).matrix, np.diag([1, 0]), atol=1e-12)
    with pytest.raises(DimensionMismatchError):
        apply(identity_channel(2), random_density(rng, 3))


def test_adjoint_examples(rng):
    e = random_effect(rng, 2)
    np.testing.assert_allclose(adjoint_apply(identity_channel(2), e).matrix, e.matrix)
    np.testing.assert_allclose(adjoint_apply(depolarizing(1), P0).matrix, np.eye(2) / 2, atol=1e-12)
    for g in (0.0, 0.3, 1.0):
        # K0^dag P0 K0 + K1^dag P0 K1 = diag(1, 0) + diag(0, g)
        np.testing.assert_allclose(adjoint_apply(amplitude_damping(g), P0).matrix, np.diag([1, g]), atol=1e-12)


def test_choi_examples():
    phi = np.zeros(4)
    phi[[0, 3]] = 1 / np.sqrt(2)
    j = choi(identity_channel(2))
    np.testing.assert_allclose(j.matrix, np.outer(phi, phi), atol=1e-15)
    assert np.linalg.matrix_rank(j.matrix) == 1
    np.testing.assert_allclose(choi(depolarizing(1)).matrix, np.eye(4) / 4, atol=1e-12)


def test_choi_trace_and_reconstruction(rng):
    for _ in range(30):
        d_in, d_out = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        ch = KrausChannel(random_kraus(rng, d_in, d_out, env_dim=3))
        j = choi(ch)
        assert np.trace(j.matrix).real == pytest.approx(1, abs=1e-12)
        assert j.min_eigenvalue() >= -1e-10
        rho = random_density(rng, d_in)
        np.testing.assert_allclose(apply_choi(j, rho).matrix, apply(ch, rho).matrix, atol=1e-9)


def test_dressed_granule_examples(rng):
    rho, e = random_density(rng, 2), random_effect(rng, 2)
    ident = identity_channel(2)
    assert membership(apply(ident, rho), e) == pytest.approx(membership(rho, dressed_granule(ident, e)), abs=1e-12)
    ch, e_plus = dephasing(1), Effect(PLUS.matrix)
    assert membership(apply(ch, PLUS), e_plus) == pytest.approx(0.5, abs=1e-12)
    assert membership(PLUS, dressed_granule(ch, e_plus)) == pytest.approx(0.5, abs=1e-12)


def test_constructors():
    assert same_channel(depolarizing(0), identity_channel(2))
    np.testing.assert_allclose(apply(amplitude_damping(1), DensityOperator(np.diag([0, 1]))).matrix, np.diag([1, 0]))
    np.testing.assert_allclose(adjoint_apply(dephasing(1), Effect(PLUS.matrix)).matrix, np.eye(2) / 2, atol=1e-12)
    for make in (depolarizing, amplitude_damping, dephasing):
        with pytest.raises(InvalidParameterError):
            make(1.5)


def test_kraus_nonuniqueness():
    # the same dephasing channel as projective Kraus operators
    p = 1.0
    alt = KrausChannel([np.diag([1, 0]), np.diag([0, 1])])
    assert same_channel(dephasing(p), alt)
    assert not same_channel(dephasing(0.5), alt)


def test_corrupted_kraus_rejected(rng):
    ks = random_kraus(rng, 2)
    ks[0] = 1.5 * ks[0]
    with pytest.raises(InvalidChannelError):
        KrausChannel(ks)


def test_duality_and_monotonicity(rng):
    for _ in range(60):
        d = int(rng.choice([2, 4]))
        ch = KrausChannel(random_kraus(rng, d, env_dim=int(rng.integers(1, 4)) + 1))
        rho, e = random_density(rng, d), random_effect(rng, d)
        lhs = membership(apply(ch, rho), e)
        rhs = membership(rho, adjoint_apply(ch, e))
        assert abs(lhs - rhs) <= 1e-10
        f = Effect(e.matrix + rng.uniform() * (np.eye(d) - e.matrix))
        assert loewner_leq(adjoint_apply(ch, e).matrix, adjoint_apply(ch, f).matrix)
        np.testing.assert_allclose(adjoint_apply(ch, Effect.identity(d)).matrix, np.eye(d), atol=1e-10)
