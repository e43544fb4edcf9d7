"""``jfrft`` command-line entry point.

Every subcommand resolves its parameters as defaults < ``--config`` JSON
< explicit flags, echoes the merged config into ``report.json`` and prints a
short summary. Exit codes: 0 success, 1 configuration error, 2 numerical
failure. ``JFRFT_NUM_THREADS`` caps the BLAS thread pool.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from contextlib import nullcontext
from pathlib import Path

import numpy as np

from . import __version__
from .bench import GridSpec, grid_search, refine_search, runtime_bench, synthetic_problem
from .errors import ConfigError, JfrftError, NumericalError, ParseError
from .filtering import fixed_lowpass, snr_db
from .fracops import make_graph_fracop, make_time_fracop
from .graphs import ShiftKind, gft_factorize, load_edge_list, random_weighted_graph, shift_operator
from .learn import TrainConfig, default_layer_inits, train_denoiser, train_transform
from .signals import SyntheticSpec, load_timeseries_csv, make_rng

THREADS_ENV = "JFRFT_NUM_THREADS"
REFINE_COARSE_STEP = 0.1

# Per-command defaults. Each reproduces the reference protocol for its command.
DEFAULTS: dict[str, dict] = {
    "transform-learn": {
        "n": 20, "t": 6, "alpha": 0.45, "beta": 0.55, "layers": 1,
        "epochs": 1200, "lr": 1e-3, "seed": 0, "shift": "adjacency",
    },
    "denoise-synth": {
        "n": 6, "t": 6, "m": 6, "sigma": 0.2, "overlap": 0, "k_band": 4, "l_band": 4,
        "alpha": 0.55, "beta": 0.45, "filter": "learnable", "epochs": 10000, "lr": 5e-3,
        "init_alpha": 0.1, "init_beta": 0.1, "restarts": 1, "seed": 0,
        "shift": "adjacency", "undirected": False, "graph_only": False,
    },
    "denoise-file": {
        "noisy": None, "clean": None, "graph": None, "sidecar": None, "t": 6,
        "undirected": False, "filter": "learnable", "epochs": 10000, "lr": 5e-3,
        "init_alpha": None, "init_beta": None, "restarts": 20, "seed": 0,
        "shift": "adjacency", "zscore": False, "graph_only": False,
    },
    "grid-search": {
        "n": 6, "t": 6, "m": 6, "sigma": 0.2, "overlap": 2, "k_band": 4, "l_band": 4,
        "alpha": 0.55, "beta": 0.45, "filter": "wiener", "order_min": -2.0, "order_max": 2.0,
        "step": 0.01, "refine": False, "include_cross": False, "graph_only": False,
        "seed": 0, "shift": "adjacency", "undirected": False,
    },
    "bench-runtime": {
        "sizes": "10x10,15x15,20x20", "methods": "JFRFT-learn,JFRFT-search",
        "epochs": 10000, "grid_step": 0.1, "m": 4, "repeats": 3, "seed": 0,
    },
    "selftest": {},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(f"{self.prog}: {message}")


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jfrft", description="Trainable joint time-vertex fractional Fourier transform")
    parser.add_argument("--version", action="version", version=f"jfrft {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "transform-learn": "learn order pairs of a multi-layer transform network",
        "denoise-synth": "denoise a synthetic bandlimited signal",
        "denoise-file": "denoise a CSV time-vertex signal on a given graph",
        "grid-search": "exhaustive order-pair search with fixed or Wiener filters",
        "bench-runtime": "time learn and search methods at several sizes",
        "selftest": "run the built-in invariant checks",
    }
    for name, defaults in DEFAULTS.items():
        p = sub.add_parser(name, help=helps[name], argument_default=argparse.SUPPRESS)
        p.add_argument("--config", type=Path, help="JSON file with parameter values")
        p.add_argument("--out", type=Path, help="directory for report.json, cells.csv and loss.csv")
        for key, value in defaults.items():
            if isinstance(value, bool):
                p.add_argument(_flag(key), type=_bool, nargs="?", const=True, dest=key)
            elif isinstance(value, int):
                p.add_argument(_flag(key), type=int, dest=key)
            elif isinstance(value, float):
                p.add_argument(_flag(key), type=float, dest=key)
            elif key in ("init_alpha", "init_beta"):
                p.add_argument(_flag(key), type=float, dest=key)
            else:
                p.add_argument(_flag(key), type=str, dest=key)
    return parser


def resolve_config(command: str, flags: dict, config_path: Path | None) -> dict:
    """Merge defaults, the JSON file and explicit flags; unknown keys are errors."""
    cfg = dict(DEFAULTS[command])
    if config_path is not None:
        try:
            raw = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(raw) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update(raw)
    cfg.update(flags)
    for key in ("filter",):
        if key in cfg and cfg[key] not in ("fixed", "learnable", "wiener"):
            raise ConfigError(f"filter must be fixed, learnable or wiener, got {cfg[key]!r}")
    if "shift" in cfg:
        try:
            ShiftKind(cfg["shift"])
        except ValueError:
            raise ConfigError(f"unknown shift {cfg['shift']!r}; choose from {[k.value for k in ShiftKind]}") from None
    return cfg


def _graph_ops(n, t, seed, shift, directed):
    g = random_weighted_graph(n, seed, directed=directed)
    return make_graph_fracop(gft_factorize(shift_operator(g, shift))), make_time_fracop(t)


def _init_orders(cfg):
    a, b = cfg.get("init_alpha"), cfg.get("init_beta")
    if a is None and b is None:
        return None
    if a is None or b is None:
        raise ConfigError("give both init_alpha and init_beta, or neither")
    return (float(a), float(b))


def _train_config(cfg) -> TrainConfig:
    return TrainConfig(
        learning_rate=float(cfg["lr"]),
        epochs=int(cfg["epochs"]),
        init_orders=_init_orders(cfg),
        restarts=int(cfg.get("restarts", 1)),
        seed=int(cfg["seed"]),
    )


def cmd_transform_learn(cfg):
    n, t = int(cfg["n"]), int(cfg["t"])
    target_orders = (float(cfg["alpha"]), float(cfg["beta"]))
    layers = int(cfg["layers"])
    graph_op, time_op = _graph_ops(n, t, int(cfg["seed"]), cfg["shift"], True)
    x = make_rng(int(cfg["seed"]) + 1).uniform(size=(n, t))
    target = graph_op.power(target_orders[0]) @ x @ time_op.power(target_orders[1]).T
    train_cfg = TrainConfig(learning_rate=float(cfg["lr"]), epochs=int(cfg["epochs"]), seed=int(cfg["seed"]))
    rep = train_transform(x, target, graph_op, time_op, train_cfg, layers=layers,
                          init_layers=default_layer_inits(target_orders, layers))
    result = rep.summary()
    result["target_orders"] = list(target_orders)
    line = "learned orders ({:.4f}, {:.4f}), final loss {:.3e}, {:.2f} s".format(
        *rep.learned_orders, rep.final_loss, rep.wall_time
    )
    return result, {"loss": rep.loss_curve}, line


def _denoise_summary(rep, x, y):
    result = rep.summary()
    result["snr_in"] = snr_db(x, y)
    line = "orders ({:.4f}, {:.4f}), SNR in {:.2f} dB, out {:.2f} dB, {:.2f} s".format(
        *rep.learned_orders, result["snr_in"], rep.snr_out, rep.wall_time
    )
    return result, {"loss": rep.loss_curve}, line


def cmd_denoise_synth(cfg):
    if cfg["filter"] == "wiener":
        raise ConfigError("denoise-synth trains fixed or learnable filters; use grid-search for Wiener")
    prob = synthetic_problem(
        int(cfg["n"]), int(cfg["t"]), int(cfg["m"]), sigma=float(cfg["sigma"]), overlap=int(cfg["overlap"]),
        k_band=int(cfg["k_band"]), l_band=int(cfg["l_band"]), orders=(float(cfg["alpha"]), float(cfg["beta"])),
        seed=int(cfg["seed"]), shift=cfg["shift"], directed=not cfg["undirected"],
    )
    fixed = fixed_lowpass(prob.x.n, prob.x.t, int(cfg["k_band"]), int(cfg["l_band"])) if cfg["filter"] == "fixed" else None
    rep = train_denoiser(prob.x, prob.y, prob.graph_op, prob.time_op, cfg["filter"], _train_config(cfg),
                         fixed_filter=fixed, graph_only=bool(cfg["graph_only"]))
    return _denoise_summary(rep, prob.x, prob.y)


def cmd_denoise_file(cfg):
    for key in ("noisy", "clean", "graph"):
        if not cfg.get(key):
            raise ConfigError(f"denoise-file needs --{key}")
    t = int(cfg["t"])
    y = load_timeseries_csv(cfg["noisy"], t, zscore=bool(cfg["zscore"]))
    x = load_timeseries_csv(cfg["clean"], t, n_expected=y.n, cols_expected=y.data.shape[1], zscore=bool(cfg["zscore"]))
    g = load_edge_list(cfg["graph"], y.n, directed=not cfg["undirected"])
    graph_op = make_graph_fracop(gft_factorize(shift_operator(g, cfg["shift"])))
    time_op = make_time_fracop(t)
    fixed = None
    if cfg["filter"] == "fixed":
        if not cfg.get("sidecar"):
            raise ConfigError("a fixed filter needs --sidecar with the signal band")
        try:
            spec = SyntheticSpec.from_json(Path(cfg["sidecar"]).read_text())
        except (OSError, KeyError, ValueError) as exc:
            raise ParseError(f"bad sidecar {cfg['sidecar']}: {exc}") from exc
        fixed = fixed_lowpass(y.n, t, spec.k_band, spec.l_band)
    elif cfg["filter"] == "wiener":
        raise ConfigError("denoise-file trains fixed or learnable filters")
    rep = train_denoiser(x, y, graph_op, time_op, cfg["filter"], _train_config(cfg),
                         fixed_filter=fixed, graph_only=bool(cfg["graph_only"]))
    return _denoise_summary(rep, x, y)


def cmd_grid_search(cfg):
    if cfg["filter"] == "learnable":
        raise ConfigError("grid-search uses fixed or wiener filters")
    prob = synthetic_problem(
        int(cfg["n"]), int(cfg["t"]), int(cfg["m"]), sigma=float(cfg["sigma"]), overlap=int(cfg["overlap"]),
        k_band=int(cfg["k_band"]), l_band=int(cfg["l_band"]), orders=(float(cfg["alpha"]), float(cfg["beta"])),
        seed=int(cfg["seed"]), shift=cfg["shift"], directed=not cfg["undirected"],
    )
    lo, hi, step = float(cfg["order_min"]), float(cfg["order_max"]), float(cfg["step"])
    kw = {"include_cross": bool(cfg["include_cross"]), "graph_only": bool(cfg["graph_only"])}
    if cfg["refine"]:
        if cfg["filter"] != "wiener":
            raise ConfigError("refine applies to the wiener policy")
        if not step < REFINE_COARSE_STEP:
            raise ConfigError(f"refine needs step below the coarse step {REFINE_COARSE_STEP}")
        rep = refine_search(prob.x, prob.y, prob.graph_op, prob.time_op, coarse=REFINE_COARSE_STEP, fine=step,
                            span=(lo, hi), **kw)
    else:
        fixed = fixed_lowpass(prob.x.n, prob.x.t, int(cfg["k_band"]), int(cfg["l_band"])) if cfg["filter"] == "fixed" else None
        rep = grid_search(prob.x, prob.y, GridSpec((lo, hi, step), (lo, hi, step)), cfg["filter"],
                          prob.graph_op, prob.time_op, fixed_filter=fixed, **kw)
    best = rep.best
    result = rep.summary()
    result["snr_in"] = snr_db(prob.x, prob.y)
    line = f"best ({best.alpha:.2f}, {best.beta:.2f}) SNR {best.snr:.2f} dB over {len(rep.cells)} cells, {rep.total_time:.2f} s"
    return result, {"cells": rep}, line


def _parse_sizes(text: str):
    sizes = []
    for part in str(text).split(","):
        try:
            n, t = part.lower().split("x")
            sizes.append((int(n), int(t)))
        except ValueError:
            raise ConfigError(f"sizes must look like 10x10,15x15; got {part!r}") from None
    return sizes


def cmd_bench_runtime(cfg):
    methods = [m.strip() for m in str(cfg["methods"]).split(",") if m.strip()]
    try:
        reports = runtime_bench(
            _parse_sizes(cfg["sizes"]), methods, epochs=int(cfg["epochs"]), grid_step=float(cfg["grid_step"]),
            m=int(cfg["m"]), repeats=int(cfg["repeats"]), seed=int(cfg["seed"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = [r.summary() for r in reports]
    line = "; ".join(f"{r['method']} {r['n']}x{r['t']}: {r['total_time']:.2f} s" for r in rows)
    return {"runs": rows}, {}, line


def cmd_selftest(cfg):
    from .selftest import run_checks

    results = run_checks()
    failed = [name for name, ok, _ in results if not ok]
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    if failed:
        raise NumericalError(f"selftest failed: {', '.join(failed)}")
    return {"checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in results]}, {}, f"{len(results)} checks passed"


COMMANDS = {
    "transform-learn": cmd_transform_learn,
    "denoise-synth": cmd_denoise_synth,
    "denoise-file": cmd_denoise_file,
    "grid-search": cmd_grid_search,
    "bench-runtime": cmd_bench_runtime,
    "selftest": cmd_selftest,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def write_outputs(out: Path, report: dict, extras: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(_jsonable(report), indent=2) + "\n")
    if "loss" in extras:
        with open(out / "loss.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "loss"])
            for i, v in enumerate(extras["loss"]):
                w.writerow([i, repr(float(v))])
    if "cells" in extras:
        extras["cells"].write_csv(out / "cells.csv")


def _thread_limit():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return nullcontext()
    try:
        count = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if count < 1:
        raise ConfigError(f"{THREADS_ENV} must be at least 1")
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=count)


def run_command(argv=None) -> int:
    try:
        args = vars(build_parser().parse_args(argv))
        command = args.pop("command")
        config_path = args.pop("config", None)
        out = args.pop("out", None)
        cfg = resolve_config(command, args, config_path)
        with _thread_limit():
            result, extras, line = COMMANDS[command](cfg)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except JfrftError as exc:  # pragma: no cover - every subclass is handled above
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = {"command": command, "version": __version__, "config": cfg, "result": result}
    if out is not None:
        write_outputs(out, report, extras)
    print(f"{command}: {line}")
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
