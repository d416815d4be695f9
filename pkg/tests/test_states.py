import math

import numpy as np
import pytest

from qgc.errors import DimensionMismatchError, InvalidBlochVectorError, InvalidStateError, NormalizationError
from qgc.operators import tensor
from qgc.sampling import random_density, random_pure
from qgc.states import (
    BlochVector,
    DensityOperator,
    StateVector,
    bell_state,
    bloch_of,
    ket,
    maximally_mixed,
    mixed_qubit,
    mixture,
    partial_trace,
    pure_qubit,
    pure_state,
)

PLUS = StateVector.normalized([1, 1])


def test_pure_state_examples():
    np.testing.assert_allclose(pure_state(ket("0")).matrix, np.diag([1, 0]))
    np.testing.assert_allclose(pure_state(PLUS).matrix, np.full((2, 2), 0.5), atol=1e-15)
    bell = pure_state(bell_state()).matrix
    expected = np.zeros((4, 4))
    for i in (0, 3):
        for j in (0, 3):
            expected[i, j] = 0.5
    np.testing.assert_allclose(bell, expected, atol=1e-15)


def test_pure_state_rejects_unnormalized():
    with pytest.raises(NormalizationError):
        StateVector([1.0, 1.0])


def test_pure_qubit():
    np.testing.assert_allclose(pure_qubit(0, 1.3).amplitudes, [1, 0])
    np.testing.assert_allclose(pure_qubit(math.pi, 0).amplitudes, [0, 1], atol=1e-16)
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(pure_qubit(math.pi / 2, 0).amplitudes, [s, s])


def test_mixed_qubit_examples():
    np.testing.assert_allclose(mixed_qubit(BlochVector(0, 0, 0)).matrix, np.eye(2) / 2)
    np.testing.assert_allclose(mixed_qubit(BlochVector(0, 0, 1)).matrix, np.diag([1, 0]))
    r = BlochVector.polar(0.75, math.radians(40))
    np.testing.assert_allclose(mixed_qubit(r).eigenvalues(), [0.125, 0.875], atol=1e-12)


def test_invalid_bloch():
    with pytest.raises(InvalidBlochVectorError):
        BlochVector(0.8, 0.8, 0)


def test_mixture_examples():
    np.testing.assert_allclose(mixture([(1, ket("0"))]).matrix, np.diag([1, 0]))
    np.testing.assert_allclose(mixture([(0.5, ket("0")), (0.5, ket("1"))]).matrix, np.eye(2) / 2)
    np.testing.assert_allclose(
        mixture([(0.5, ket("0")), (0.5, PLUS)]).matrix, [[0.75, 0.25], [0.25, 0.25]], atol=1e-15
    )


def test_mixture_errors():
    with pytest.raises(InvalidStateError):
        mixture([(0.6, ket("0")), (0.6, ket("1"))])
    with pytest.raises(DimensionMismatchError):
        mixture([(0.5, ket("0")), (0.5, ket("00"))])


def test_mixture_spectrum_in_unit_interval(rng):
    for _ in range(50):
        d = int(rng.integers(2, 6))
        w = rng.dirichlet(np.ones(4))
        rho = mixture([(wk, random_pure(rng, d)) for wk in w])
        ev = rho.eigenvalues()
        assert ev.min() >= -1e-10 and ev.max() <= 1 + 1e-10


def test_density_trace_renormalization():
    rho = DensityOperator(np.diag([0.5 + 5e-9, 0.5]))
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(InvalidStateError):
        DensityOperator(np.diag([0.6, 0.5]))
    with pytest.raises(InvalidStateError):
        DensityOperator(np.diag([1.5, -0.5]))


def test_partial_trace_examples():
    bell = pure_state(bell_state())
    np.testing.assert_allclose(partial_trace(bell, 2, 2, "A").matrix, np.eye(2) / 2)
    prod = DensityOperator(tensor(np.diag([1, 0]), np.eye(2) / 2))
    np.testing.assert_allclose(partial_trace(prod, 2, 2, "A").matrix, np.diag([1, 0]))
    np.testing.assert_allclose(partial_trace(pure_state(ket("01")), 2, 2, "B").matrix, np.diag([0, 1]))


def test_partial_trace_product_and_trace(rng):
    for _ in range(30):
        a, b = random_density(rng, 2), random_density(rng, 3)
        ab = DensityOperator(tensor(a.matrix, b.matrix))
        np.testing.assert_allclose(partial_trace(ab, 2, 3, "A").matrix, a.matrix, atol=1e-12)
        np.testing.assert_allclose(partial_trace(ab, 2, 3, "B").matrix, b.matrix, atol=1e-12)
        rho = random_density(rng, 6)
        red = partial_trace(rho, 3, 2, "B")
        assert abs(np.trace(red.matrix) - 1) <= 1e-10


def test_partial_trace_bad_dims():
    with pytest.raises(DimensionMismatchError):
        partial_trace(maximally_mixed(4), 3, 2)


def test_bloch_of_examples():
    assert bloch_of(maximally_mixed(2)) == BlochVector(0, 0, 0)
    assert bloch_of(pure_state(ket("0"))) == BlochVector(0, 0, 1)
    r = bloch_of(DensityOperator([[0.75, 0.25], [0.25, 0.25]]))
    np.testing.assert_allclose([r.rx, r.ry, r.rz], [0.5, 0, 0.5], atol=1e-15)
    with pytest.raises(DimensionMismatchError):
        bloch_of(maximally_mixed(4))


def test_bloch_round_trip(rng):
    for _ in range(100):
        rho = random_density(rng, 2)
        back = mixed_qubit(bloch_of(rho))
        np.testing.assert_allclose(back.matrix, rho.matrix, atol=1e-10)


def test_pure_states_idempotent(rng):
    for _ in range(50):
        rho = pure_state(random_pure(rng, int(rng.integers(2, 8)))).matrix
        assert np.linalg.norm(rho @ rho - rho) <= 1e-9
