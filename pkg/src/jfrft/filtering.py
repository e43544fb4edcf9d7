"""Diagonal filters in the joint fractional domain.

The estimator is ``x_hat = F_J^{-a,-b} diag(h) F_J^{a,b} y``. For the
Wiener filter we write ``z = F_J y`` and ``W = F_J^{-1}``; the columns of
``S = W diag(z)`` are the ``s_k`` of the normal equations, so

    T = E{S^H S} = (W^H W) * conj(E{z z^H})      (elementwise product)
    q = E{S^H x} = diag(W^H E{x y^H} F_J^H)

and ``h = T^-1 q``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .errors import ShapeMismatch, SingularNormalMatrix, ZeroReference
from .signals import TimeVertexSignal
from .transform import JointTransform, two_sided

SNR_INF = float("inf")
WIENER_COND_LIMIT = 1e14


class FilterMode(str, enum.Enum):
    FIXED = "fixed"
    LEARNABLE = "learnable"
    WIENER = "wiener"


@dataclass(frozen=True)
class DiagonalFilter:
    coeffs: np.ndarray
    mode: FilterMode = FilterMode.LEARNABLE

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128).reshape(-1)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "mode", FilterMode(self.mode))
        if self.mode is FilterMode.FIXED and not np.all(np.isin(c, (0, 1))):
            raise ValueError("fixed filter coefficients must be 0 or 1")

    def __len__(self) -> int:
        return self.coeffs.size

    def as_matrix(self, n: int, t: int) -> np.ndarray:
        """Coefficients laid out on the ``(N, T)`` transform grid."""
        if self.coeffs.size != n * t:
            raise ShapeMismatch(f"filter has {self.coeffs.size} coefficients, expected {n * t}")
        return numkit.unvec(self.coeffs, n, t)

    def to_json(self) -> str:
        return json.dumps(
            {"mode": self.mode.value, "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs]}
        )

    @classmethod
    def from_json(cls, text: str) -> "DiagonalFilter":
        raw = json.loads(text)
        coeffs = np.array([complex(re, im) for re, im in raw["coeffs"]])
        return cls(coeffs, FilterMode(raw["mode"]))


def fixed_lowpass(n: int, t: int, k_band: int, l_band: int) -> DiagonalFilter:
    """Ideal low-pass: pass vertex index ``< k_band`` and time index ``< l_band``."""
    if not (1 <= k_band <= n and 1 <= l_band <= t):
        raise ValueError(f"band ({k_band}, {l_band}) outside 1..({n}, {t})")
    m = np.zeros((n, t))
    m[:k_band, :l_band] = 1.0
    return DiagonalFilter(numkit.vec(m), FilterMode.FIXED)


def _vec_blocks(x: np.ndarray) -> np.ndarray:
    # (..., N, T) -> (..., N*T), column stacking
    return np.swapaxes(x, -1, -2).reshape(*x.shape[:-2], -1)


def _unvec_blocks(v: np.ndarray, n: int, t: int) -> np.ndarray:
    return np.swapaxes(v.reshape(*v.shape[:-1], t, n), -1, -2)


@dataclass(frozen=True)
class CorrelationModel:
    """Second-order statistics of ``y = (G_T^T kron G_G) x + n``."""

    rxx: np.ndarray
    rnn: np.ndarray
    rxn: np.ndarray | None = None
    g_t: np.ndarray | None = None
    g_g: np.ndarray | None = None
    rnx: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rxx = numkit.as_matrix(self.rxx, name="rxx")
        rnn = numkit.as_matrix(self.rnn, name="rnn")
        if rxx.shape != rnn.shape or rxx.shape[0] != rxx.shape[1]:
            raise ShapeMismatch(f"rxx {rxx.shape} and rnn {rnn.shape} must be equal square matrices")
        rxn = np.zeros_like(rxx) if self.rxn is None else numkit.as_matrix(self.rxn, name="rxn")
        for name, r in (("rxx", rxx), ("rnn", rnn)):
            if not numkit.is_hermitian(r, tol=1e-8):
                raise ValueError(f"{name} is not Hermitian")
        object.__setattr__(self, "rxx", rxx)
        object.__setattr__(self, "rnn", rnn)
        object.__setattr__(self, "rxn", rxn)
        object.__setattr__(self, "rnx", rxn.conj().T)

    @property
    def size(self) -> int:
        return self.rxx.shape[0]

    def observation_matrix(self) -> np.ndarray:
        n_total = self.size
        if self.g_t is None and self.g_g is None:
            return np.eye(n_total, dtype=np.complex128)
        g_t = np.asarray(self.g_t, dtype=np.complex128)
        g_g = np.asarray(self.g_g, dtype=np.complex128)
        g = np.kron(g_t.T, g_g)
        if g.shape != (n_total, n_total):
            raise ShapeMismatch(f"G_T^T kron G_G has shape {g.shape}, expected {(n_total, n_total)}")
        return g

    def ryy(self) -> np.ndarray:
        g = self.observation_matrix()
        gh = g.conj().T
        return g @ self.rxx @ gh + g @ self.rxn + self.rnx @ gh + self.rnn

    def rxy(self) -> np.ndarray:
        return self.rxx @ self.observation_matrix().conj().T + self.rxn

    @classmethod
    def from_blocks(cls, x_blocks, n_blocks, *, include_cross: bool = False) -> "CorrelationModel":
        """Block means of the auto- (and optionally cross-) correlations.

        ``x_blocks`` and ``n_blocks`` are ``(M, N, T)`` stacks. Without
        ``include_cross`` signal and noise are treated as uncorrelated.
        """
        xv = _vec_blocks(np.asarray(x_blocks, dtype=np.complex128))
        nv = _vec_blocks(np.asarray(n_blocks, dtype=np.complex128))
        m = xv.shape[0]
        rxx = xv.T @ xv.conj() / m
        rnn = nv.T @ nv.conj() / m
        rxn = xv.T @ nv.conj() / m if include_cross else None
        return cls((rxx + rxx.conj().T) / 2, (rnn + rnn.conj().T) / 2, rxn)


def wiener_system(fj: np.ndarray, fj_inv: np.ndarray, ryy: np.ndarray, rxy: np.ndarray):
    """Normal equations ``(T, q)``; ``fj``/``fj_inv`` may carry a leading batch axis."""
    fjh = np.conj(np.swapaxes(fj, -1, -2))
    winvh = np.conj(np.swapaxes(fj_inv, -1, -2))
    gram = winvh @ fj_inv
    rzz = fj @ ryy @ fjh
    tmat = gram * np.conj(rzz)
    q = np.einsum("...ij,...ji->...i", winvh @ rxy, fjh)
    return tmat, q


def _solve_normal(tmat: np.ndarray, q: np.ndarray) -> np.ndarray:
    try:
        h = np.linalg.solve(tmat, q[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularNormalMatrix(str(exc)) from exc
    if not np.all(np.isfinite(h)):
        raise SingularNormalMatrix("non-finite Wiener coefficients")
    return h


def wiener_solve(
    jt: JointTransform,
    corr: CorrelationModel | None = None,
    *,
    samples: tuple | None = None,
    tie_time: bool = False,
) -> DiagonalFilter:
    """Wiener-optimal diagonal filter at the orders of ``jt``.

    Either pass a :class:`CorrelationModel` (analytic expectations) or
    ``samples=(x_vecs, y_vecs)``, two ``(M, N*T)`` arrays whose block means
    replace the expectations. ``tie_time`` restricts ``h`` to one
    coefficient per vertex shared over time (graph-only filtering).
    """
    fj = jt.matrix()
    fj_inv = jt.with_orders(-jt.alpha, -jt.beta).matrix()
    if (corr is None) == (samples is None):
        raise ValueError("give exactly one of corr or samples")
    if corr is not None:
        if corr.size != fj.shape[0]:
            raise ShapeMismatch(f"correlation size {corr.size} != transform size {fj.shape[0]}")
        ryy, rxy = corr.ryy(), corr.rxy()
    else:
        xv = np.atleast_2d(np.asarray(samples[0], dtype=np.complex128))
        yv = np.atleast_2d(np.asarray(samples[1], dtype=np.complex128))
        if xv.shape != yv.shape or xv.shape[1] != fj.shape[0]:
            raise ShapeMismatch(f"sample shapes {xv.shape}, {yv.shape} do not match size {fj.shape[0]}")
        ryy = yv.T @ yv.conj() / yv.shape[0]
        rxy = xv.T @ yv.conj() / yv.shape[0]
    tmat, q = wiener_system(fj, fj_inv, ryy, rxy)
    if tie_time:
        tie = np.kron(np.ones((jt.t, 1)), np.eye(jt.n))
        tmat, q = tie.T @ tmat @ tie, tie.T @ q
    if np.linalg.cond(tmat) > WIENER_COND_LIMIT:
        raise SingularNormalMatrix("Wiener normal matrix is numerically singular")
    h = _solve_normal(tmat, q)
    if tie_time:
        h = np.tile(h, jt.t)
    return DiagonalFilter(h, FilterMode.WIENER)


def apply_filter_chain(jt: JointTransform, h: DiagonalFilter | np.ndarray, y) -> np.ndarray:
    """``F_J^{-a,-b} diag(h) F_J^{a,b} y`` computed matrix-free.

    ``y`` is one vectorized block (length ``N*T``) or a stack ``(M, N*T)``.
    """
    coeffs = h.coeffs if isinstance(h, DiagonalFilter) else np.asarray(h, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    nt = jt.n * jt.t
    if y.shape[-1] != nt or coeffs.size != nt:
        raise ShapeMismatch(f"expected length {nt}, got signal {y.shape} and filter {coeffs.size}")
    hm = numkit.unvec(coeffs, jt.n, jt.t)
    a, b = jt.factors()
    ai, bi = jt.inverse_factors()
    z = two_sided(a, _unvec_blocks(y, jt.n, jt.t), b)
    return _vec_blocks(two_sided(ai, hm * z, bi))


def filter_signal(jt: JointTransform, h: DiagonalFilter | np.ndarray, y: TimeVertexSignal) -> TimeVertexSignal:
    """Apply the filter chain to every block of ``y``."""
    coeffs = h.coeffs if isinstance(h, DiagonalFilter) else np.asarray(h)
    a, b = jt.factors()
    ai, bi = jt.inverse_factors()
    out = two_sided(ai, numkit.unvec(coeffs, jt.n, jt.t) * two_sided(a, y.blocks(), b), bi)
    return TimeVertexSignal.from_blocks(out)


def snr_db(x_true, x_est) -> float:
    """``10 log10(||X||_F^2 / ||X - X_hat||_F^2)``; ``inf`` for a perfect estimate."""
    xt = x_true.data if isinstance(x_true, TimeVertexSignal) else np.asarray(x_true)
    xe = x_est.data if isinstance(x_est, TimeVertexSignal) else np.asarray(x_est)
    if xt.shape != xe.shape:
        raise ShapeMismatch(f"shapes differ: {xt.shape} vs {xe.shape}")
    ref = float(np.sum(np.abs(xt) ** 2))
    if ref == 0.0:
        raise ZeroReference("reference signal is all zero")
    err = float(np.sum(np.abs(xt - xe) ** 2))
    if np.sqrt(err) < 1e-300:
        return SNR_INF
    return 10.0 * np.log10(ref / err)
