"""Grid-search baseline over order pairs and runtime benchmarks."""
from __future__ import annotations

import csv
import json
import statistics
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import EmptyReport, SingularNormalMatrix
from .filtering import CorrelationModel, DiagonalFilter, FilterMode, wiener_system
from .fracops import FractionalOperator, make_graph_fracop, make_time_fracop
from .graphs import gft_factorize, random_weighted_graph, shift_operator
from .learn import TrainConfig, train_denoiser
from .signals import SyntheticSpec, TimeVertexSignal, gen_bandlimited, gen_highfreq_noise
from .transform import JointTransform


@dataclass(frozen=True)
class GridSpec:
    alpha_range: tuple[float, float, float] = (-2.0, 2.0, 0.01)
    beta_range: tuple[float, float, float] = (-2.0, 2.0, 0.01)

    def __post_init__(self):
        for lo, hi, step in (self.alpha_range, self.beta_range):
            if not step > 0 or lo > hi:
                raise ValueError(f"bad range ({lo}, {hi}, {step})")

    @staticmethod
    def _axis(lo: float, hi: float, step: float) -> np.ndarray:
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return np.round(lo + step * np.arange(count), 10)

    def alphas(self) -> np.ndarray:
        return self._axis(*self.alpha_range)

    def betas(self) -> np.ndarray:
        return self._axis(*self.beta_range)

    @property
    def cells(self) -> int:
        return self.alphas().size * self.betas().size

    @classmethod
    def around(cls, alpha: float, beta: float, radius: float, step: float) -> "GridSpec":
        return cls((alpha - radius, alpha + radius, step), (beta - radius, beta + radius, step))


@dataclass
class CellRecord:
    alpha: float
    beta: float
    snr: float | None
    wall_time: float
    error: str | None = None


@dataclass
class BenchReport:
    method: str
    cells: list[CellRecord] = field(default_factory=list)
    total_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def best(self) -> CellRecord:
        """Highest SNR; ties go to the smallest alpha, then the smallest beta."""
        ok = [c for c in self.cells if c.snr is not None]
        if not ok:
            raise EmptyReport(f"{self.method}: no cell produced a result")
        return min(ok, key=lambda c: (-c.snr, c.alpha, c.beta))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["alpha", "beta", "snr", "wall_time", "error"])
            for c in self.cells:
                w.writerow([c.alpha, c.beta, "" if c.snr is None else c.snr, c.wall_time, c.error or ""])

    def summary(self) -> dict:
        out = {"method": self.method, "total_time": self.total_time, **self.extra}
        if self.cells:
            out["cells"] = len(self.cells)
            out["skipped"] = sum(c.snr is None for c in self.cells)
            try:
                out["best"] = asdict(self.best)
            except EmptyReport:
                out["best"] = None
        return out

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2)


def _batched_kron(b_stack: np.ndarray, a: np.ndarray) -> np.ndarray:
    k, t, _ = b_stack.shape
    n = a.shape[0]
    return np.einsum("kij,ab->kiajb", b_stack, a).reshape(k, t * n, t * n)


def _chunk_size(nt: int, budget: int = 2**22) -> int:
    return max(1, budget // (nt * nt))


def _row_cells(graph_op, time_op, alpha, betas, yb, xb, policy, hm_fixed, ryy, rxy, tie_time):
    """Filter and score every ``(alpha, beta)`` for one alpha; returns (snrs, errors)."""
    n, t = graph_op.n, time_op.n
    nt = n * t
    a = graph_op.power(alpha)
    ai = graph_op.power(-alpha)
    snrs = np.full(betas.size, np.nan)
    errors: list[str | None] = [None] * betas.size
    ref = float(np.sum(np.abs(xb) ** 2))
    step = _chunk_size(nt)
    for start in range(0, betas.size, step):
        sl = slice(start, start + step)
        bs = np.stack([time_op.power(b) for b in betas[sl]])
        bis = np.stack([time_op.power(-b) for b in betas[sl]])
        z = a @ yb[None] @ np.swapaxes(bs, -1, -2)[:, None]
        if policy is FilterMode.WIENER:
            fj = _batched_kron(bs, a)
            fj_inv = _batched_kron(bis, ai)
            tmat, q = wiener_system(fj, fj_inv, ryy, rxy)
            if tie_time:
                tie = np.kron(np.ones((t, 1)), np.eye(n))
                tmat, q = tie.T @ tmat @ tie, q @ tie
            h = np.full(q.shape, np.nan, dtype=np.complex128)
            cond = np.linalg.cond(tmat)
            good = cond < 1e14
            if good.any():
                h[good] = np.linalg.solve(tmat[good], q[good][..., None])[..., 0]
            for i in np.flatnonzero(~good):
                errors[start + i] = "singular Wiener normal matrix"
            if tie_time:
                h = np.tile(h, (1, t))
            hm = np.swapaxes(h.reshape(-1, t, n), -1, -2)[:, None]
        else:
            hm = hm_fixed
        x_hat = ai @ (hm * z) @ np.swapaxes(bis, -1, -2)[:, None]
        err = np.sum(np.abs(x_hat - xb[None]) ** 2, axis=(1, 2, 3))
        with np.errstate(divide="ignore", invalid="ignore"):
            snrs[sl] = 10 * np.log10(ref / err)
    return snrs, errors


def grid_search(
    x_clean: TimeVertexSignal,
    y_noisy: TimeVertexSignal,
    grid: GridSpec,
    filter_policy: FilterMode | str,
    graph_op: FractionalOperator,
    time_op: FractionalOperator,
    *,
    fixed_filter: DiagonalFilter | None = None,
    include_cross: bool = False,
    graph_only: bool = False,
) -> BenchReport:
    """Score every order pair of ``grid`` and keep the best.

    ``filter_policy`` is ``fixed`` (``fixed_filter`` applied at every cell)
    or ``wiener`` (Wiener filter per cell from block-mean correlations of
    the clean signal and the noise ``y - x``). ``graph_only`` searches
    alpha alone with ``beta = 0`` and a filter tied across time.
    """
    policy = FilterMode(filter_policy)
    if policy is FilterMode.LEARNABLE:
        raise ValueError("grid search uses fixed or wiener filters")
    n, t = y_noisy.n, y_noisy.t
    yb = y_noisy.blocks()
    xb = x_clean.blocks()
    hm_fixed = ryy = rxy = None
    if policy is FilterMode.FIXED:
        if fixed_filter is None:
            raise ValueError("fixed policy needs fixed_filter")
        hm_fixed = fixed_filter.as_matrix(n, t)
    else:
        corr = CorrelationModel.from_blocks(xb, yb - xb, include_cross=include_cross)
        ryy, rxy = corr.ryy(), corr.rxy()
    alphas = grid.alphas()
    betas = np.array([0.0]) if graph_only else grid.betas()
    report = BenchReport(method="GFRFT-search" if graph_only else "JFRFT-search")
    t0 = time.perf_counter()
    for alpha in alphas:
        r0 = time.perf_counter()
        try:
            snrs, errors = _row_cells(
                graph_op, time_op, alpha, betas, yb, xb, policy, hm_fixed, ryy, rxy, graph_only
            )
        except (np.linalg.LinAlgError, SingularNormalMatrix) as exc:
            snrs, errors = np.full(betas.size, np.nan), [str(exc)] * betas.size
        per_cell = (time.perf_counter() - r0) / betas.size
        for beta, snr, err in zip(betas, snrs, errors):
            ok = err is None and np.isfinite(snr) or snr == np.inf
            report.cells.append(
                CellRecord(float(alpha), float(beta), float(snr) if ok else None, per_cell, None if ok else (err or "non-finite SNR"))
            )
    report.total_time = time.perf_counter() - t0
    report.best  # raises EmptyReport when every cell failed
    return report


def refine_search(x_clean, y_noisy, graph_op, time_op, *, coarse: float = 0.1, fine: float = 0.01, span=(-2.0, 2.0), **kw) -> BenchReport:
    """Coarse grid over ``span`` followed by a fine grid around the coarse optimum."""
    lo, hi = span
    first = grid_search(x_clean, y_noisy, GridSpec((lo, hi, coarse), (lo, hi, coarse)), FilterMode.WIENER, graph_op, time_op, **kw)
    b = first.best
    second = grid_search(
        x_clean, y_noisy, GridSpec.around(b.alpha, b.beta, coarse, fine), FilterMode.WIENER, graph_op, time_op, **kw
    )
    second.cells = first.cells + second.cells
    second.total_time += first.total_time
    return second


# -- runtime benchmark --------------------------------------------------------


@dataclass
class SyntheticProblem:
    x: TimeVertexSignal
    y: TimeVertexSignal
    graph_op: FractionalOperator
    time_op: FractionalOperator
    spec: SyntheticSpec
    true_orders: tuple[float, float]


def synthetic_problem(
    n: int = 6,
    t: int = 6,
    m: int = 6,
    *,
    sigma: float = 0.2,
    overlap: int = 0,
    k_band: int = 4,
    l_band: int = 4,
    orders: tuple[float, float] = (0.55, 0.45),
    seed: int = 0,
    shift: str = "adjacency",
    directed: bool = True,
) -> SyntheticProblem:
    """Bandlimited signal plus high-frequency noise on a random weighted graph."""
    g = random_weighted_graph(n, seed, directed=directed)
    graph_op = make_graph_fracop(gft_factorize(shift_operator(g, shift)))
    time_op = make_time_fracop(t)
    jt = JointTransform(orders[0], orders[1], graph_op, time_op)
    spec = SyntheticSpec(sigma=sigma, overlap=overlap, k_band=k_band, l_band=l_band, seed=seed)
    x = gen_bandlimited(jt, spec.band, m, seed)
    noise = gen_highfreq_noise(jt, spec.noise_spec(n, t), m)
    y = TimeVertexSignal(x.data + noise.data, t)
    return SyntheticProblem(x, y, graph_op, time_op, spec, orders)


METHODS = ("JFRFT-learn", "JFRFT-search", "GFRFT-learn", "GFRFT-search")


def runtime_bench(
    sizes,
    methods=("JFRFT-learn", "JFRFT-search"),
    *,
    epochs: int = 10_000,
    grid_step: float = 0.1,
    m: int = 4,
    repeats: int = 3,
    seed: int = 0,
) -> list[BenchReport]:
    """Median wall-clock of each method at each ``(N, T)``.

    Learn methods train a learnable filter from ``(0.1, 0.1)`` for
    ``epochs`` epochs; search methods run a Wiener grid over ``[-2, 2]``
    with ``grid_step``. Runs execute serially.
    """
    reports = []
    for n, t in sizes:
        prob = synthetic_problem(n, t, m, k_band=max(1, 2 * n // 3), l_band=max(1, 2 * t // 3), seed=seed)
        for method in methods:
            if method not in METHODS:
                raise ValueError(f"unknown method {method!r}")
            graph_only = method.startswith("GFRFT")
            times = []
            snr = None
            for _ in range(repeats):
                t0 = time.perf_counter()
                if method.endswith("learn"):
                    cfg = TrainConfig(learning_rate=5e-3, epochs=epochs, init_orders=(0.1, 0.1), seed=seed)
                    rep = train_denoiser(prob.x, prob.y, prob.graph_op, prob.time_op, "learnable", cfg, graph_only=graph_only)
                    snr = rep.snr_out
                else:
                    g = GridSpec((-2, 2, grid_step), (-2, 2, grid_step))
                    rep = grid_search(prob.x, prob.y, g, "wiener", prob.graph_op, prob.time_op, graph_only=graph_only)
                    snr = rep.best.snr
                times.append(time.perf_counter() - t0)
            total = statistics.median(times)
            extra = {"n": n, "t": t, "m": m, "repeats": repeats, "best_snr": float(snr)}
            if method.endswith("learn"):
                extra["epochs"] = epochs
                extra["per_epoch_time"] = total / epochs
            else:
                extra["grid_step"] = grid_step
            reports.append(BenchReport(method=method, total_time=total, extra=extra))
    return reports
