"""Time-vertex signals: block layout, synthetic generation and CSV I/O.

Random draws come from ``numpy.random.Generator(PCG64(seed))`` so runs are
bit-reproducible for a fixed seed.
"""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import numkit
from .errors import ParseError, ShapeMismatch
from .transform import JointTransform, two_sided


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class TimeVertexSignal:
    """An ``N x (M*T)`` signal split into ``M`` blocks of ``T`` columns."""

    data: np.ndarray
    t: int

    def __post_init__(self):
        d = np.asarray(self.data)
        if d.ndim != 2:
            raise ShapeMismatch(f"signal data must be 2-D, got shape {d.shape}")
        if self.t < 1 or d.shape[1] % self.t:
            raise ShapeMismatch(f"{d.shape[1]} columns do not split into blocks of {self.t}")
        if not np.all(np.isfinite(d)):
            raise ValueError("signal has non-finite entries")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def m(self) -> int:
        return self.data.shape[1] // self.t

    def block(self, i: int) -> np.ndarray:
        return self.data[:, i * self.t : (i + 1) * self.t]

    def blocks(self) -> np.ndarray:
        """Stacked blocks, shape ``(M, N, T)``."""
        return self.data.reshape(self.n, self.m, self.t).transpose(1, 0, 2).copy()

    @classmethod
    def from_blocks(cls, blocks: np.ndarray) -> "TimeVertexSignal":
        blocks = np.asarray(blocks)
        m, n, t = blocks.shape
        return cls(blocks.transpose(1, 0, 2).reshape(n, m * t), t)


def blockify(x: TimeVertexSignal) -> list[np.ndarray]:
    """Column-stacked vector of every block."""
    return [numkit.vec(x.block(i)) for i in range(x.m)]


def unblockify(vectors, n: int, t: int) -> TimeVertexSignal:
    blocks = np.stack([numkit.unvec(v, n, t) for v in vectors])
    return TimeVertexSignal.from_blocks(blocks)


@dataclass(frozen=True)
class BandSpec:
    k_band: int
    l_band: int

    def validate(self, n: int, t: int) -> None:
        if not (1 <= self.k_band <= n and 1 <= self.l_band <= t):
            raise ValueError(f"band ({self.k_band}, {self.l_band}) outside 1..({n}, {t})")

    def mask(self, n: int, t: int) -> np.ndarray:
        self.validate(n, t)
        m = np.zeros((n, t), dtype=bool)
        m[: self.k_band, : self.l_band] = True
        return m


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float
    support: np.ndarray  # boolean (N, T) mask in the transform domain
    seed: int

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        object.__setattr__(self, "support", np.asarray(self.support, dtype=bool))


def highfreq_support(n: int, t: int, band: BandSpec, overlap: int) -> np.ndarray:
    """Noise mask covering everything outside the leading ``(K-o) x (L-o)`` corner.

    With ``overlap == 0`` the mask is exactly the complement of the signal
    band; each unit of overlap shares one more trailing row and column of
    the band with the noise.
    """
    band.validate(n, t)
    if not 0 <= overlap <= min(band.k_band, band.l_band):
        raise ValueError(f"overlap must be in 0..{min(band.k_band, band.l_band)}, got {overlap}")
    mask = np.ones((n, t), dtype=bool)
    mask[: band.k_band - overlap, : band.l_band - overlap] = False
    return mask


def gen_bandlimited(jt: JointTransform, band: BandSpec, m: int, seed: int) -> TimeVertexSignal:
    """Signal whose transform at ``(jt.alpha, jt.beta)`` lives in the leading ``K x L`` corner."""
    band.validate(jt.n, jt.t)
    rng = make_rng(seed)
    coeffs = np.zeros((m, jt.n, jt.t), dtype=np.complex128)
    coeffs[:, : band.k_band, : band.l_band] = rng.standard_normal((m, band.k_band, band.l_band))
    ai, bi = jt.inverse_factors()
    return TimeVertexSignal.from_blocks(two_sided(ai, coeffs, bi))


def gen_highfreq_noise(jt: JointTransform, spec: NoiseSpec, m: int) -> TimeVertexSignal:
    """Gaussian noise placed on ``spec.support`` in the transform domain, mapped back to vertices."""
    if spec.support.shape != (jt.n, jt.t):
        raise ShapeMismatch(f"noise support shape {spec.support.shape} != ({jt.n}, {jt.t})")
    rng = make_rng(spec.seed)
    coeffs = np.zeros((m, jt.n, jt.t), dtype=np.complex128)
    k = int(spec.support.sum())
    coeffs[:, spec.support] = spec.sigma * rng.standard_normal((m, k))
    ai, bi = jt.inverse_factors()
    return TimeVertexSignal.from_blocks(two_sided(ai, coeffs, bi))


@dataclass(frozen=True)
class SyntheticSpec:
    """JSON sidecar ``{sigma, overlap, k_band, l_band, seed}``."""

    sigma: float
    overlap: int
    k_band: int
    l_band: int
    seed: int

    @property
    def band(self) -> BandSpec:
        return BandSpec(self.k_band, self.l_band)

    def noise_spec(self, n: int, t: int, seed_offset: int = 1) -> NoiseSpec:
        return NoiseSpec(self.sigma, highfreq_support(n, t, self.band, self.overlap), self.seed + seed_offset)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SyntheticSpec":
        raw = json.loads(text)
        unknown = set(raw) - {"sigma", "overlap", "k_band", "l_band", "seed"}
        if unknown:
            raise ParseError(f"unknown sidecar keys: {sorted(unknown)}")
        return cls(
            sigma=float(raw["sigma"]),
            overlap=int(raw["overlap"]),
            k_band=int(raw["k_band"]),
            l_band=int(raw["l_band"]),
            seed=int(raw["seed"]),
        )


def _parse_cell(cell: str) -> complex:
    cell = cell.strip()
    try:
        return float(cell)
    except ValueError:
        return complex(cell.replace(" ", ""))


def _format_cell(v: complex) -> str:
    if v.imag == 0:
        return repr(float(v.real))
    return f"{v.real!r}{v.imag:+.17g}j"


def load_timeseries_csv(
    path,
    t: int,
    n_expected: int | None = None,
    cols_expected: int | None = None,
    *,
    zscore: bool = False,
) -> TimeVertexSignal:
    """Read an ``N x (M*T)`` numeric CSV, one row per vertex.

    Cells may be real (``1.5``) or complex (``1.5-0.25j``). With ``zscore``
    each vertex is standardized to zero mean and unit variance.
    """
    rows: list[list[complex]] = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([_parse_cell(c) for c in row])
            except ValueError as exc:
                raise ParseError(f"{path}: row {lineno}: non-numeric cell ({exc})") from exc
            if len(rows[-1]) != len(rows[0]):
                raise ParseError(f"{path}: row {lineno} has {len(rows[-1])} columns, expected {len(rows[0])}")
    if not rows:
        raise ParseError(f"{path}: empty file")
    data = np.array(rows, dtype=np.complex128)
    if not np.all(np.isfinite(data)):
        raise ParseError(f"{path}: non-finite value")
    if n_expected is not None and data.shape[0] != n_expected:
        raise ParseError(f"{path}: {data.shape[0]} rows, expected {n_expected}")
    if cols_expected is not None and data.shape[1] != cols_expected:
        raise ParseError(f"{path}: {data.shape[1]} columns, expected {cols_expected}")
    if data.shape[1] % t:
        raise ParseError(f"{path}: {data.shape[1]} columns do not split into blocks of {t}")
    if zscore:
        mu = data.mean(axis=1, keepdims=True)
        sd = data.std(axis=1, keepdims=True)
        data = (data - mu) / np.where(sd > 0, sd, 1.0)
    return TimeVertexSignal(data, t)


def write_timeseries_csv(x: TimeVertexSignal | np.ndarray, path) -> None:
    data = x.data if isinstance(x, TimeVertexSignal) else np.asarray(x)
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        for row in data:
            w.writerow([_format_cell(complex(v)) for v in row])
