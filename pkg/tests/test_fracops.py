import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jfrft.errors import BranchCutEigenvalue, ZeroEigenvalue
from jfrft.fracops import (
    dft_matrix,
    frac_derivative,
    frac_power,
    hermite_indices,
    identity_fracop,
    make_graph_fracop,
    make_time_fracop,
)
from jfrft.graphs import gft_factorize
from jfrft.signals import make_rng

from conftest import graph_op_for, rel_err


def test_identity_base():
    op = make_graph_fracop(np.eye(4))
    np.testing.assert_allclose(op.generator, 0, atol=1e-15)
    for a in (-1.3, 0.4, 2.0):
        np.testing.assert_allclose(frac_power(op, a), np.eye(4), atol=1e-14)
        np.testing.assert_allclose(frac_derivative(op, a), 0, atol=1e-15)


def test_scalar_principal_log():
    op = make_graph_fracop(np.diag([1j, -1j]))
    np.testing.assert_allclose(np.diag(op.generator), [1j * np.pi / 2, -1j * np.pi / 2])
    np.testing.assert_allclose(frac_power(op, 0.5), np.diag([np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4)]))


def test_scalar_derivative():
    op = make_graph_fracop(np.array([[1j]]))
    for a in (0.0, 0.3, 1.7):
        np.testing.assert_allclose(frac_derivative(op, a), [[1j * np.pi / 2 * np.exp(a * 1j * np.pi / 2)]])


def test_symmetric_additivity():
    a = make_rng(2).standard_normal((6, 6))
    op = make_graph_fracop(gft_factorize(a + a.T))
    assert rel_err(frac_power(op, 0.55) @ frac_power(op, 0.45), op.base) <= 1e-8


def test_branch_policies():
    f = np.diag([1.0, -1.0, 1j])
    snapped = make_graph_fracop(f)
    assert snapped.snapped == 1
    assert rel_err(snapped.power(1.0), f) <= 1e-12
    assert rel_err(snapped.power(0.5) @ snapped.power(0.5), f) <= 1e-12
    with pytest.raises(BranchCutEigenvalue):
        make_graph_fracop(f, branch="raise")
    with pytest.raises(ValueError):
        make_graph_fracop(f, branch="wrap")


def test_zero_eigenvalue():
    with pytest.raises(ZeroEigenvalue):
        make_graph_fracop(np.diag([1.0, 0.0]))


@pytest.mark.parametrize("seed,directed", [(0, True), (1, True), (2, False), (3, False)])
def test_graph_operator_invariants(seed, directed):
    op = graph_op_for(6, seed, directed)
    assert rel_err(op.power(1.0), op.base) <= 1e-8
    np.testing.assert_allclose(op.power(0.0), np.eye(6), atol=1e-12)
    t, f = op.generator, op.base
    assert np.linalg.norm(t @ f - f @ t) <= 1e-8 * np.linalg.norm(t) * np.linalg.norm(f)


@pytest.mark.parametrize("n", range(2, 33))
def test_time_order_one_is_dft(n):
    op = make_time_fracop(n)
    assert rel_err(op.power(1.0), dft_matrix(n)) <= 1e-8
    np.testing.assert_allclose(op.power(0.0), np.eye(n), atol=1e-12)


@pytest.mark.parametrize("n", [2, 5, 6, 9])
def test_time_order_two_is_parity(n):
    x = make_rng(n).standard_normal(n)
    f = dft_matrix(n)
    np.testing.assert_allclose(f @ f @ x, x[(-np.arange(n)) % n], atol=1e-12)
    np.testing.assert_allclose(make_time_fracop(n).power(2.0) @ x, x[(-np.arange(n)) % n], atol=1e-10)


def test_hermite_indices():
    np.testing.assert_array_equal(hermite_indices(4), [0, 1, 2, 4])
    np.testing.assert_array_equal(hermite_indices(5), [0, 1, 2, 3, 4])


def test_time_too_short():
    with pytest.raises(ValueError):
        make_time_fracop(1)


@pytest.mark.parametrize("axis", ["graph", "time"])
def test_additivity_and_inverse(axis):
    op = graph_op_for(6, 4) if axis == "graph" else make_time_fracop(7)
    rng = make_rng(11)
    for a, b in rng.uniform(-2, 2, size=(20, 2)):
        target = op.power(a + b)
        assert np.linalg.norm(op.power(a) @ op.power(b) - target) <= 1e-8 * np.linalg.norm(target)
        assert rel_err(op.power(-a) @ op.power(a), np.eye(op.n)) <= 1e-8


def test_unitary_preservation():
    time_op = make_time_fracop(8)
    graph_op = graph_op_for(6, 5, directed=False)
    for a in np.linspace(-2, 2, 13):
        for op in (time_op, graph_op):
            u = op.power(a)
            assert rel_err(u.conj().T @ u, np.eye(op.n)) <= 1e-8


@pytest.mark.parametrize("axis", ["graph", "time"])
def test_derivative_finite_differences(axis):
    op = graph_op_for(5, 6) if axis == "graph" else make_time_fracop(6)
    h = 1e-6
    for a in make_rng(21).uniform(-2, 2, 10):
        fd = (op.power(a + h) - op.power(a - h)) / (2 * h)
        assert rel_err(frac_derivative(op, a), fd) <= 1e-5


def test_derivative_elementwise_at_07():
    op = graph_op_for(5, 7)
    h = 1e-6
    fd = (op.power(0.7 + h) - op.power(0.7 - h)) / (2 * h)
    d = frac_derivative(op, 0.7)
    big = np.abs(fd) > 1e-6
    assert np.max(np.abs(d - fd)[big] / np.abs(fd)[big]) <= 1e-5


def test_identity_fracop():
    op = identity_fracop(3)
    np.testing.assert_array_equal(op.power(0.3), np.eye(3))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.floats(-2, 2), st.floats(-2, 2))
def test_time_additivity_property(n, a, b):
    op = make_time_fracop(n)
    assert rel_err(op.power(a) @ op.power(b), op.power(a + b)) <= 1e-8
