import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from jfrft import numkit
from jfrft.errors import DimensionOverflow, NearDefective, Singular
from jfrft.signals import make_rng


def test_eig_identity():
    res = numkit.eig_decompose(np.eye(3))
    np.testing.assert_allclose(res.values, np.ones(3))
    np.testing.assert_allclose(res.reconstruct(), np.eye(3), atol=1e-14)


def test_eig_diagonal_gives_permuted_identity():
    res = numkit.eig_decompose(np.diag([2.0, -1.0, 0.5]))
    assert sorted(res.values.real) == [-1.0, 0.5, 2.0]
    v = np.abs(res.vectors)
    np.testing.assert_allclose(np.sort(v, axis=0), np.vstack([np.zeros((2, 3)), np.ones((1, 3))]), atol=1e-14)


def test_eig_cycle_against_characteristic_polynomial():
    c4 = np.roll(np.eye(4), 1, axis=1) + np.roll(np.eye(4), -1, axis=1)
    lam = sympy.symbols("lam")
    poly = sympy.Matrix(c4.astype(int)).charpoly(lam)
    roots = sorted(float(r) for r in sympy.roots(poly.as_expr(), lam, multiple=True))
    assert roots == [-2.0, 0.0, 0.0, 2.0]
    res = numkit.eig_decompose(c4)
    np.testing.assert_allclose(res.values, [2, 0, 0, -2], atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(res.vectors, axis=0), 1.0)


@pytest.mark.parametrize("n", range(2, 11))
def test_eig_reconstruction_random(n):
    m = make_rng(n).standard_normal((n, n)) + 1j * make_rng(n + 50).standard_normal((n, n))
    res = numkit.eig_decompose(m)
    assert np.linalg.norm(res.reconstruct() - m) <= 1e-8 * np.linalg.norm(m)
    for k in range(n):
        r = m @ res.vectors[:, k] - res.values[k] * res.vectors[:, k]
        assert np.linalg.norm(r) <= 1e-8 * np.linalg.norm(m)
    assert 1 <= res.cond_v < np.inf


def test_eig_rejects_defective():
    with pytest.raises(NearDefective):
        numkit.eig_decompose(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_solve_identity_and_diagonal():
    b = make_rng(0).standard_normal((3, 2))
    np.testing.assert_allclose(numkit.solve_linear(np.eye(3), b), b)
    np.testing.assert_allclose(numkit.solve_linear(np.diag([2.0, 4.0]), np.array([2.0, 4.0])), [1, 1])


def test_solve_random_residual():
    rng = make_rng(3)
    a = rng.standard_normal((5, 5)) + 5 * np.eye(5)
    b = rng.standard_normal((5, 3))
    x = numkit.solve_linear(a, b)
    assert np.linalg.norm(a @ x - b) <= 1e-8 * (np.linalg.norm(a) * np.linalg.norm(x) + np.linalg.norm(b))


def test_solve_recovers_known_solution():
    rng = make_rng(4)
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    a = q @ np.diag(np.logspace(0, 5, 6)) @ q.T
    x0 = rng.standard_normal(6)
    x = numkit.solve_linear(a, a @ x0)
    assert np.linalg.norm(x - x0) <= 1e-8 * np.linalg.norm(x0)


def test_solve_singular():
    with pytest.raises(Singular):
        numkit.solve_linear(np.array([[1.0, 2.0], [2.0, 4.0]]), np.ones(2))


def test_kron_identity_and_shape():
    np.testing.assert_array_equal(numkit.kron(np.eye(2), np.eye(3)), np.eye(6))
    assert numkit.kron(np.ones((2, 3)), np.ones((4, 5))).shape == (8, 15)


def test_kron_blocks():
    a = make_rng(1).standard_normal((2, 3))
    b = make_rng(2).standard_normal((4, 5))
    k = numkit.kron(a, b)
    for i in range(2):
        for j in range(3):
            np.testing.assert_allclose(k[4 * i : 4 * i + 4, 5 * j : 5 * j + 5], a[i, j] * b)


@pytest.mark.parametrize("size", [2, 3])
def test_kron_mixed_product_and_inverse(size):
    rng = make_rng(size)
    a, b, c, d = (rng.standard_normal((size, size)) + 2 * np.eye(size) for _ in range(4))
    lhs = numkit.kron(a, b) @ numkit.kron(c, d)
    assert np.linalg.norm(lhs - numkit.kron(a @ c, b @ d)) <= 1e-8 * np.linalg.norm(lhs)
    inv = numkit.inverse(numkit.kron(a, b))
    expect = numkit.kron(numkit.inverse(a), numkit.inverse(b))
    assert np.linalg.norm(inv - expect) <= 1e-8 * np.linalg.norm(expect)


def test_kron_cap():
    with pytest.raises(DimensionOverflow):
        numkit.kron(np.ones((10, 10)), np.ones((10, 10)), cap=9999)


def test_frob_norm_examples():
    assert numkit.frob_norm(np.zeros((3, 3))) == 0
    assert numkit.frob_norm(np.eye(4)) == 2
    assert numkit.frob_norm(np.array([[3, 4]])) == 5


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        numkit.as_matrix(np.array([[np.nan, 0], [0, 1]]))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5))
def test_vec_unvec_round_trip(rows, cols):
    m = np.arange(rows * cols, dtype=float).reshape(rows, cols)
    v = numkit.vec(m)
    np.testing.assert_array_equal(v[:rows], m[:, 0])
    np.testing.assert_array_equal(numkit.unvec(v, rows, cols), m)
