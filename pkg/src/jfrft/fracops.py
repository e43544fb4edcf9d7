"""Fractional operators for the graph and time axes.

Both axes are represented the same way: a generator ``T`` diagonalized as
``T = E diag(g) E^-1`` so that ``F^a = E diag(exp(a g)) E^-1`` and
``dF^a/da = T F^a``.

Graph axis
    ``T = log(F_G)`` on the principal branch, which is what the
    hyper-differential GFRFT reduces to once ``D_G^2`` is expanded.
Time axis
    ``T = E diag(-j pi k / 2) E^T`` with ``E`` the discrete Hermite-Gaussian
    eigenvectors of the unitary DFT (commuting-matrix construction), so that
    the order-1 operator is exactly the DFT.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import numkit
from .errors import BranchCutEigenvalue, CommutingMatrixDegenerate, ZeroEigenvalue
from .graphs import GftFactorization

ZERO_EIG_TOL = 1e-10
BRANCH_TOL = 1e-8
DEGENERACY_TOL = 1e-9


class Axis(str, enum.Enum):
    GRAPH = "graph"
    TIME = "time"


@dataclass(frozen=True, eq=False)
class FractionalOperator:
    base: np.ndarray
    eig_basis: np.ndarray
    eig_basis_inv: np.ndarray
    gen_eigenvalues: np.ndarray
    axis: Axis
    snapped: int = 0
    generator: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        gen = (self.eig_basis * self.gen_eigenvalues) @ self.eig_basis_inv
        object.__setattr__(self, "generator", gen)

    @property
    def n(self) -> int:
        return self.base.shape[0]

    def power(self, order: float) -> np.ndarray:
        if order == 0:
            return np.eye(self.n, dtype=np.complex128)
        return (self.eig_basis * np.exp(order * self.gen_eigenvalues)) @ self.eig_basis_inv

    def derivative(self, order: float) -> np.ndarray:
        g = self.gen_eigenvalues
        return (self.eig_basis * (g * np.exp(order * g))) @ self.eig_basis_inv


def frac_power(op: FractionalOperator, order: float) -> np.ndarray:
    """``F^order = E diag(exp(order * g)) E^-1``."""
    return op.power(order)


def frac_derivative(op: FractionalOperator, order: float) -> np.ndarray:
    """``d/d(order) F^order = T exp(order * T)``."""
    return op.derivative(order)


def identity_fracop(n: int, axis: Axis = Axis.GRAPH) -> FractionalOperator:
    eye = np.eye(n, dtype=np.complex128)
    return FractionalOperator(eye, eye, eye, np.zeros(n, dtype=np.complex128), Axis(axis))


def _principal_log(lam: np.ndarray, branch: str) -> tuple[np.ndarray, int]:
    if np.any(np.abs(lam) < ZERO_EIG_TOL):
        raise ZeroEigenvalue("F_G has an eigenvalue at zero; its logarithm is undefined")
    ang = np.angle(lam)
    near_cut = np.pi - np.abs(ang) < BRANCH_TOL
    if np.any(near_cut):
        if branch == "raise":
            raise BranchCutEigenvalue(
                f"{int(near_cut.sum())} eigenvalue(s) of F_G lie on the negative real axis"
            )
        ang = np.where(near_cut, np.pi, ang)
    return np.log(np.abs(lam)) + 1j * ang, int(near_cut.sum())


def make_graph_fracop(gft: GftFactorization | np.ndarray, *, branch: str = "snap") -> FractionalOperator:
    """Graph fractional operator ``F_G^a = exp(a log F_G)``.

    ``branch`` controls eigenvalues of ``F_G`` on the negative real axis:
    ``"snap"`` assigns them the argument ``+pi``; ``"raise"`` aborts with
    :class:`BranchCutEigenvalue`.
    """
    if branch not in ("snap", "raise"):
        raise ValueError(f"unknown branch policy {branch!r}")
    f_g = gft.f_g if isinstance(gft, GftFactorization) else numkit.as_matrix(gft)
    if numkit.is_normal(f_g):
        # unitary eigenbasis even when eigenvalues repeat
        t, q = scipy.linalg.schur(f_g, output="complex")
        lam = np.diag(t).copy()
        basis, basis_inv = q, q.conj().T
    else:
        eig = numkit.eig_decompose(f_g, sort=False)
        lam = eig.values
        basis = eig.vectors
        basis_inv = numkit.inverse(basis)
    logs, snapped = _principal_log(lam, branch)
    return FractionalOperator(f_g, basis, basis_inv, logs, Axis.GRAPH, snapped=snapped)


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT, ``F[m, k] = exp(-2j pi m k / n) / sqrt(n)``."""
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def hermite_indices(n: int) -> np.ndarray:
    """Hermite orders ``0..n`` with ``n - 1 + (n mod 2)`` left out."""
    skip = n - 1 + (n % 2)
    return np.array([k for k in range(n + 1) if k != skip])


def hermite_gaussian_basis(n: int) -> np.ndarray:
    """Discrete Hermite-Gaussian eigenvectors of the DFT, columns ordered by Hermite index.

    The matrix ``S`` (ones on the circular off-diagonals, ``2 cos(2 pi m / n)``
    on the diagonal) commutes with the DFT. It is split into even and odd
    parts with respect to ``m -> -m mod n``; within each part eigenvectors
    are sorted by descending eigenvalue, which orders them by zero crossings.
    """
    m = np.arange(n)
    s = np.diag(2.0 * np.cos(2.0 * np.pi * m / n))
    s[m, (m + 1) % n] += 1.0
    s[m, (m - 1) % n] += 1.0

    # orthogonal even/odd splitting matrix
    r = n // 2
    even = n % 2 == 0
    p = np.zeros((n, n))
    p[0, 0] = 1.0
    for i in range(1, r - even + 1):
        p[i, i] = p[i, n - i] = 1 / np.sqrt(2)
    if even:
        p[r, r] = 1.0
    for i in range(r + 1, n):
        p[i, i] = -1 / np.sqrt(2)
        p[i, n - i] = 1 / np.sqrt(2)

    cs = p @ s @ p.T
    ne = n // 2 + 1
    ev_vals, ev_vecs = np.linalg.eigh(cs[:ne, :ne])
    od_vals, od_vecs = np.linalg.eigh(cs[ne:, ne:])
    for vals in (ev_vals, od_vals):
        if vals.size > 1 and np.min(np.diff(vals)) < DEGENERACY_TOL * max(1.0, np.abs(vals).max()):
            raise CommutingMatrixDegenerate(f"repeated commuting-matrix eigenvalue for n={n}")
    ev_vecs = ev_vecs[:, ::-1]
    od_vecs = od_vecs[:, ::-1]

    # columns follow hermite_indices(n): for even n the last even order is n, not n - 2
    if even:
        ev_cols = list(range(0, n - 1, 2)) + [n - 1]
        od_cols = list(range(1, n - 2, 2))
    else:
        ev_cols = list(range(0, n, 2))
        od_cols = list(range(1, n, 2))
    basis = np.zeros((n, n))
    basis[:, ev_cols] = p.T[:, :ne] @ ev_vecs
    basis[:, od_cols] = p.T[:, ne:] @ od_vecs
    # deterministic sign: first non-negligible entry positive
    idx = np.argmax(np.abs(basis) > 1e-12 * np.abs(basis).max(axis=0), axis=0)
    signs = np.sign(basis[idx, np.arange(n)])
    return basis * signs


def make_time_fracop(t_len: int) -> FractionalOperator:
    """Discrete fractional Fourier operator of size ``t_len``."""
    if t_len < 2:
        raise ValueError(f"time length must be at least 2, got {t_len}")
    basis = hermite_gaussian_basis(t_len).astype(np.complex128)
    k = hermite_indices(t_len)
    gen = -1j * np.pi * k / 2
    return FractionalOperator(dft_matrix(t_len), basis, basis.T.copy(), gen.astype(np.complex128), Axis.TIME)
