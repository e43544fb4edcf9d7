"""Graphs, shift operators and the graph Fourier transform."""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import numkit
from .errors import DuplicatePoints, IsolatedVertex, ParseError

ORDERING_RULE = "desc-real,desc-imag"


class ShiftKind(str, enum.Enum):
    ADJACENCY = "adjacency"
    LAPLACIAN = "laplacian"
    ROW_NORM_ADJACENCY = "row-norm-adjacency"
    SYM_NORM_ADJACENCY = "sym-norm-adjacency"
    NORM_LAPLACIAN = "norm-laplacian"


@dataclass(frozen=True)
class Graph:
    adjacency: np.ndarray
    directed: bool = True

    def __post_init__(self):
        a = numkit.as_matrix(self.adjacency, name="adjacency")
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got {a.shape}")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency must have a zero diagonal")
        if not self.directed and numkit.frob_norm(a - a.T) > 1e-12 * max(numkit.frob_norm(a), 1.0):
            raise ValueError("undirected graph needs a symmetric adjacency")
        object.__setattr__(self, "adjacency", a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @classmethod
    def from_edges(cls, n: int, edges, *, directed: bool = True) -> "Graph":
        a = np.zeros((n, n))
        for src, dst, w in edges:
            # A[m, n] != 0 means an edge from n to m
            a[int(dst), int(src)] = float(w)
            if not directed:
                a[int(src), int(dst)] = float(w)
        return cls(a, directed=directed)


def knn_graph(coords, k: int, symmetrize: bool = True) -> Graph:
    """Binary k-nearest-neighbour graph under the Euclidean metric.

    Row ``i`` of the adjacency marks the ``k`` nearest neighbours of vertex
    ``i``. With ``symmetrize`` the result is ``max(A, A.T)``.
    """
    pts = np.asarray(coords, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < {n}, got {k}")
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff**2).sum(-1))
    off = dist + np.diag(np.full(n, np.inf))
    dup = np.argwhere(off == 0)
    if dup.size:
        i, j = dup[0]
        raise DuplicatePoints(f"points {i} and {j} coincide")
    a = np.zeros((n, n))
    for i in range(n):
        # stable sort so equal distances resolve to the lower index
        nbrs = np.argsort(off[i], kind="stable")[:k]
        a[i, nbrs] = 1.0
    if symmetrize:
        a = np.maximum(a, a.T)
    return Graph(a, directed=not symmetrize)


def random_weighted_graph(n: int, seed: int, *, directed: bool = True) -> Graph:
    """Dense graph with i.i.d. U(0, 1) edge weights and no self loops."""
    rng = np.random.Generator(np.random.PCG64(seed))
    a = rng.uniform(size=(n, n))
    if not directed:
        a = np.triu(a, 1)
        a = a + a.T
    np.fill_diagonal(a, 0.0)
    return Graph(a, directed=directed)


def shift_operator(g: Graph, kind: ShiftKind | str) -> np.ndarray:
    kind = ShiftKind(kind)
    a = g.adjacency
    deg = a.sum(axis=1).real
    if kind is ShiftKind.ADJACENCY:
        return a.copy()
    if kind is ShiftKind.LAPLACIAN:
        return np.diag(deg).astype(np.complex128) - a
    if np.any(deg <= 0):
        raise IsolatedVertex(f"vertex {int(np.argmax(deg <= 0))} has no outgoing weight")
    if kind is ShiftKind.ROW_NORM_ADJACENCY:
        return a / deg[:, None]
    s = 1.0 / np.sqrt(deg)
    if kind is ShiftKind.SYM_NORM_ADJACENCY:
        return s[:, None] * a * s[None, :]
    lap = np.diag(deg).astype(np.complex128) - a
    return s[:, None] * lap * s[None, :]


@dataclass(frozen=True)
class GftFactorization:
    shift: np.ndarray
    eigenvalues: np.ndarray
    v: np.ndarray
    f_g: np.ndarray
    ordering: str = ORDERING_RULE

    @property
    def n(self) -> int:
        return self.shift.shape[0]


def gft_factorize(z) -> GftFactorization:
    """Factor a shift operator as ``Z = V diag(lam) V^-1`` and set ``F_G = V^-1``."""
    z = numkit.as_matrix(z, name="shift")
    eig = numkit.eig_decompose(z)
    f_g = numkit.inverse(eig.vectors)
    return GftFactorization(shift=z, eigenvalues=eig.values, v=eig.vectors, f_g=f_g)


def load_edge_list(path, n: int | None = None, *, directed: bool = True) -> Graph:
    """Read an edge-list CSV with rows ``src,dst,weight`` (0-based)."""
    edges = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].strip().startswith("#"):
                continue
            if lineno == 1 and not _is_number(row[0]):
                continue  # header
            if len(row) not in (2, 3):
                raise ParseError(f"{path}:{lineno}: expected src,dst[,weight], got {len(row)} fields")
            try:
                src, dst = int(row[0]), int(row[1])
                w = float(row[2]) if len(row) == 3 else 1.0
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            if src < 0 or dst < 0:
                raise ParseError(f"{path}:{lineno}: negative vertex index")
            edges.append((src, dst, w))
    if n is None:
        n = 1 + max(max(s, d) for s, d, _ in edges) if edges else 0
    return Graph.from_edges(n, edges, directed=directed)


def load_coordinates(path) -> np.ndarray:
    """Read one vertex per row as ``x,y[,z...]``."""
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if lineno == 1 and not _is_number(row[0]):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise ParseError(f"{path}: ragged coordinate rows")
    return np.array(rows)


def save_edge_list(g: Graph, path) -> None:
    a = g.adjacency.real
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["src", "dst", "weight"])
        for dst, src in zip(*np.nonzero(a)):
            w.writerow([src, dst, repr(float(a[dst, src]))])


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True
