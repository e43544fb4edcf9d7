"""Joint time-vertex fractional transform ``F^beta (x) F_G^alpha``.

A time-vertex signal ``X`` has shape ``(N, T)``; its column-stacked vector
satisfies ``vec(F_G^a X (F^b)^T) = (F^b kron F_G^a) vec(X)``. Batches of
blocks are arrays of shape ``(M, N, T)``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import numkit
from .errors import ShapeMismatch
from .fracops import FractionalOperator


@dataclass(frozen=True)
class JointTransform:
    alpha: float
    beta: float
    graph_op: FractionalOperator
    time_op: FractionalOperator

    @property
    def n(self) -> int:
        return self.graph_op.n

    @property
    def t(self) -> int:
        return self.time_op.n

    def with_orders(self, alpha: float, beta: float) -> "JointTransform":
        return replace(self, alpha=float(alpha), beta=float(beta))

    def factors(self) -> tuple[np.ndarray, np.ndarray]:
        """``(F_G^alpha, F^beta)``."""
        return self.graph_op.power(self.alpha), self.time_op.power(self.beta)

    def inverse_factors(self) -> tuple[np.ndarray, np.ndarray]:
        return self.graph_op.power(-self.alpha), self.time_op.power(-self.beta)

    def matrix(self) -> np.ndarray:
        return assemble_joint(self)

    def forward(self, x: np.ndarray) -> np.ndarray:
        return apply_joint(self, x)

    def inverse(self, x: np.ndarray) -> np.ndarray:
        return apply_joint(self.with_orders(-self.alpha, -self.beta), x)


def _check_blocks(jt: JointTransform, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    if x.shape[-2:] != (jt.n, jt.t):
        raise ShapeMismatch(f"expected trailing shape ({jt.n}, {jt.t}), got {x.shape}")
    return x


def two_sided(a: np.ndarray, x: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a @ x @ b.T`` broadcast over leading block axes."""
    return a @ x @ b.T


def apply_joint(jt: JointTransform, x) -> np.ndarray:
    """Matrix-free ``F_G^alpha X (F^beta)^T`` on one block or a stack of blocks."""
    x = _check_blocks(jt, x)
    a, b = jt.factors()
    return two_sided(a, x, b)


def assemble_joint(jt: JointTransform, *, cap: int = numkit.KRON_ELEMENT_CAP) -> np.ndarray:
    a, b = jt.factors()
    return numkit.kron(b, a, cap=cap)


def joint_partials(jt: JointTransform, *, cap: int = numkit.KRON_ELEMENT_CAP):
    """Dense ``(dF_J/dalpha, dF_J/dbeta)``."""
    a, b = jt.factors()
    da = jt.graph_op.derivative(jt.alpha)
    db = jt.time_op.derivative(jt.beta)
    return numkit.kron(b, da, cap=cap), numkit.kron(db, a, cap=cap)
