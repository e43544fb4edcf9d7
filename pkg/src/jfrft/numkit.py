"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128`` in
C (row-major) order. Everything here is a pure function.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionOverflow, NearDefective, NonConvergence, Singular

EIG_TOL = 1e-8
COND_LIMIT = 1e10
SINGULAR_PIVOT = 1e-14
KRON_ELEMENT_CAP = 2**26


def as_matrix(m, *, name: str = "matrix") -> np.ndarray:
    """Validate and convert ``m`` to a finite 2-D complex array."""
    a = np.array(m, dtype=np.complex128, order="C")
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def frob_norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m), ord=None))


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    m = np.asarray(m)
    if m.shape[0] != m.shape[1]:
        return False
    scale = max(frob_norm(m), 1.0)
    return frob_norm(m - m.conj().T) <= tol * scale


def is_normal(m: np.ndarray, tol: float = 1e-10) -> bool:
    m = np.asarray(m)
    mh = m.conj().T
    return frob_norm(m @ mh - mh @ m) <= tol * max(frob_norm(m) ** 2, 1.0)


@dataclass(frozen=True)
class EigResult:
    values: np.ndarray
    vectors: np.ndarray
    cond_v: float

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return solve_linear(v.T, (v * self.values).T).T


def _canonical_phase(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    # unit columns, first non-negligible entry rotated onto the positive real axis
    v = v / np.linalg.norm(v, axis=0, keepdims=True)
    for k in range(v.shape[1]):
        col = v[:, k]
        idx = np.flatnonzero(np.abs(col) > tol)
        if idx.size:
            c = col[idx[0]]
            v[:, k] = col * (abs(c) / c)
    return v


def sort_eigenpairs(values: np.ndarray, vectors: np.ndarray):
    """Order by descending real part, ties by descending imaginary part."""
    re = np.round(values.real, 10)
    im = np.round(values.imag, 10)
    order = np.lexsort((-im, -re))
    return values[order], vectors[:, order]


def eig_decompose(m, *, sort: bool = True) -> EigResult:
    """Eigendecomposition of a diagonalizable square matrix.

    Hermitian input goes through ``eigh`` so that the eigenvector matrix is
    unitary even inside degenerate eigenspaces.

    Raises
    ------
    NonConvergence
        LAPACK did not converge.
    NearDefective
        The eigenvector matrix has condition number above ``COND_LIMIT``.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"eig_decompose needs a square matrix, got {a.shape}")
    try:
        if is_hermitian(a):
            w, v = np.linalg.eigh((a + a.conj().T) / 2)
            w = w.astype(np.complex128)
            v = v.astype(np.complex128)
        else:
            w, v = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    if sort:
        w, v = sort_eigenpairs(w, v)
    v = _canonical_phase(v)
    cond = float(np.linalg.cond(v))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NearDefective(f"eigenvector matrix condition number {cond:.3g} exceeds {COND_LIMIT:.0e}")
    return EigResult(values=w, vectors=v, cond_v=cond)


def solve_linear(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` by partial-pivot LU.

    Raises ``Singular`` when a pivot falls below ``1e-14 * ||a||_F``.
    """
    a = as_matrix(a, name="a")
    b = np.asarray(b, dtype=np.complex128)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"solve_linear needs a square matrix, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"right-hand side has {b.shape[0]} rows, expected {a.shape[0]}")
    with warnings.catch_warnings():
        # exact zero pivots are reported through Singular below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min(initial=np.inf) < SINGULAR_PIVOT * frob_norm(a):
        raise Singular(f"pivot {pivots.min():.3g} below threshold")
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def inverse(a) -> np.ndarray:
    a = as_matrix(a)
    return solve_linear(a, np.eye(a.shape[0], dtype=np.complex128))


def kron(a, b, *, cap: int = KRON_ELEMENT_CAP) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    size = a.shape[0] * b.shape[0] * a.shape[1] * b.shape[1]
    if size > cap:
        raise DimensionOverflow(f"Kronecker product would have {size} elements (cap {cap})")
    return np.kron(a, b)


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    return np.asarray(v).reshape(rows, cols, order="F")
