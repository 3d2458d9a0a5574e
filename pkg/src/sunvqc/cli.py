"""Command-line front end.

Usage::

    sunvqc autoencode --ansatz sun --iters 3000 --ensemble 5 --seed 7 --out runs/ae
    sunvqc classify --ansatz he --out runs/clf
    sunvqc bp-scan --out runs/bp
    sunvqc grad-check --ansatz sun --qubits 6 --trials 50 --seed 1
    sunvqc dla-dim --generators "XI,IX,ZI,IZ,ZZ"

Every flag mirrors a key of the flat ``key = value`` config file passed with
``--config``; flags override file values. Exit status is 2 for an invalid
configuration and 1 for a runtime failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .data import STREAM_TRAIN, haar_state, two_moons
from .gradients import exact_gradient, finite_difference, shift_gradient
from .linalg import ValidationError
from .ansatz import brickwall_layout
from .objectives import TrashInfidelity, ZExpectation
from .pauli import lie_closure_dim
from .training import (
    NonFiniteError,
    TrainConfig,
    bp_scan,
    ensemble_autoencode,
    log10_slope,
    train_classifier,
)

log = logging.getLogger("sunvqc")

COMMANDS = ("autoencode", "classify", "bp-scan", "grad-check", "dla-dim")

COMMAND_DEFAULTS = {
    "autoencode": {},
    "classify": {"qubits": 4, "iters": 500, "eta": 0.05, "ensemble": 1},
    "bp-scan": {"input": "product"},
    "grad-check": {},
    "dla-dim": {},
}

WRITES_FILES = ("autoencode", "classify", "bp-scan")
FIELDS = {f.name: f for f in dataclasses.fields(TrainConfig)}
# Keys accepted in config files and as flags but not part of TrainConfig.
RUN_KEYS = {"out": str}


class ConfigError(ValueError):
    pass


def _coerce(key: str, value):
    kind = RUN_KEYS.get(key) or FIELDS[key].type
    kind = {"int": int, "float": float, "str": str}.get(kind, kind)
    if isinstance(value, str):
        value = value.strip()
    try:
        if kind is int and isinstance(value, str) and not value.lstrip("-").isdigit():
            raise ValueError
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected {kind.__name__}, got {value!r}") from None


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string("[run]\n" + path.read_text())
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    return dict(parser["run"])


def parse_config(command: str, path=None, flags: dict | None = None) -> tuple[TrainConfig, dict]:
    """Resolve defaults, then the config file, then flags.

    Returns the training config and the run-level keys (``out``).

    Raises
    ------
    ConfigError
        On unknown keys, type mismatches, invalid values or a missing ``out``
        for commands that write files.
    """
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    values: dict = dict(COMMAND_DEFAULTS[command])
    sources = [read_config_file(path)] if path else []
    sources.append({k: v for k, v in (flags or {}).items() if v is not None})
    for source in sources:
        for key, value in source.items():
            key = key.strip().replace("-", "_")
            if key not in FIELDS and key not in RUN_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = _coerce(key, value)
    if "threads" not in values and os.environ.get("SUNVQC_THREADS"):
        values["threads"] = _coerce("threads", os.environ["SUNVQC_THREADS"])
    run = {k: values.pop(k) for k in list(values) if k in RUN_KEYS}
    if command in WRITES_FILES and not run.get("out"):
        raise ConfigError("missing required field 'out'")
    try:
        cfg = TrainConfig(**values)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None
    return cfg, run


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


class Manifest:
    """``manifest.json``: written when a run starts and finalised when it ends."""

    def __init__(self, out: Path, command: str, cfg: TrainConfig):
        self.path = out / "manifest.json"
        self.started = time.time()
        self.data = {
            "command": command,
            "version": __version__,
            "seed": cfg.seed,
            "config": dataclasses.asdict(cfg),
            "status": "running",
            "outputs": [],
        }
        out.mkdir(parents=True, exist_ok=True)
        self._write()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            self.finish([], status="failed", error=str(exc))
        return False

    def _write(self):
        self.path.write_text(json.dumps(self.data, indent=2, sort_keys=True) + "\n")

    def finish(self, outputs, status: str = "complete", **extra):
        self.data.update(extra)
        self.data["status"] = status
        self.data["outputs"] = sorted(str(p.name if p.parent == self.path.parent else p.relative_to(self.path.parent)) for p in outputs)
        self.data["wall_clock_s"] = round(time.time() - self.started, 3)
        self._write()


def _logged_rows(n_iters: int, every: int):
    return list(range(0, n_iters + 1, every)) + ([n_iters] if n_iters % every else [])


def cmd_autoencode(cfg: TrainConfig, out: Path) -> int:
    with Manifest(out, "autoencode", cfg) as manifest:
        stats = ensemble_autoencode(cfg)
        idx = _logged_rows(cfg.iters, cfg.log_interval)
        outputs = [write_csv(
            out / "curve.csv",
            ["iter", "mean_loss", "std_loss", "schmidt_bound"],
            ([t, stats.mean[t], stats.std[t], stats.schmidt_bound] for t in idx),
        )]
        for r, run in enumerate(stats.runs):
            outputs.append(write_csv(
                out / "runs" / f"{r}.csv",
                ["iter", "loss", "grad_norm", "schmidt_bound"],
                ([t, run.loss[t], run.grad_norm[t], run.extra["schmidt_bound"]] for t in idx),
            ))
        manifest.finish(
            outputs,
            final_mean_loss=stats.final_mean,
            mean_schmidt_bound=stats.schmidt_bound,
            final_mean_gap=stats.final_mean - stats.schmidt_bound,
        )
    print(f"final mean infidelity {stats.final_mean:.6g} (mean Schmidt bound {stats.schmidt_bound:.6g})")
    return 0


def cmd_classify(cfg: TrainConfig, out: Path) -> int:
    with Manifest(out, "classify", cfg) as manifest:
        results = [train_classifier(dataclasses.replace(cfg, seed=cfg.seed + r)) for r in range(cfg.ensemble)]
        idx = _logged_rows(cfg.iters, cfg.log_interval)
        header = ["epoch", "train_acc", "test_acc", "loss"]
        outputs = []
        for r, res in enumerate(results):
            outputs.append(write_csv(
                out / "runs" / f"{r}.csv", header,
                ([t, res.train_accuracy[t], res.test_accuracy[t], res.trace.loss[t]] for t in idx),
            ))
        train = np.mean([r.train_accuracy for r in results], axis=0)
        test = np.mean([r.test_accuracy for r in results], axis=0)
        loss = np.mean([r.trace.loss for r in results], axis=0)
        outputs.append(write_csv(
            out / "classifier.csv", header,
            ([t, train[t], test[t], loss[t]] for t in idx),
        ))
        X, y = two_moons(cfg.n_train, cfg.noise, cfg.seed, STREAM_TRAIN)
        outputs.append(write_csv(out / "dataset.csv", ["x1", "x2", "label"], ([a, b, int(c)] for (a, b), c in zip(X, y))))
        finals = [float(r.test_accuracy[-1]) for r in results]
        lo, hi = results[0].scaling
        manifest.finish(outputs, final_test_accuracy=finals, feature_min=lo.tolist(), feature_max=hi.tolist())
    print(f"final test accuracy: median {np.median(finals):.4f} over {len(finals)} seed(s)")
    return 0


def cmd_bp_scan(cfg: TrainConfig, out: Path) -> int:
    with Manifest(out, "bp-scan", cfg) as manifest:
        rows = bp_scan(cfg)
        outputs = [write_csv(
            out / "bpscan.csv", ["ansatz", "n", "variance", "samples"],
            ([r.ansatz, r.n, r.variance, r.samples] for r in rows),
        )]
        slopes = {a: log10_slope(rows, a) for a in sorted({r.ansatz for r in rows})}
        manifest.finish(outputs, log10_slopes=slopes)
    for a, s in slopes.items():
        print(f"{a}: log10 variance slope {s:.4f} per qubit")
    return 0


def cmd_grad_check(cfg: TrainConfig) -> int:
    """Compare shift-rule and finite-difference gradients against the adjoint route."""
    layout = brickwall_layout(cfg.qubits, cfg.reps, cfg.ansatz, cfg.boundary)
    cost = TrashInfidelity() if cfg.qubits == 6 else ZExpectation(0)
    rng = np.random.default_rng(cfg.seed)
    worst_shift = worst_fd = 0.0
    for trial in range(cfg.trials):
        theta = rng.uniform(-np.pi, np.pi, layout.n_params)
        psi = haar_state(cfg.qubits, cfg.seed * 1_000_003 + trial)
        exact = exact_gradient(layout, theta, cost, psi)
        worst_shift = max(worst_shift, float(np.max(np.abs(shift_gradient(layout, theta, cost, psi) - exact))))
        worst_fd = max(worst_fd, float(np.max(np.abs(finite_difference(layout, theta, cost, psi) - exact))))
    print(f"max |shift - exact| = {worst_shift:.3e}")
    print(f"max |fd - exact|    = {worst_fd:.3e}")
    return 0 if worst_shift < 1e-8 else 1


def cmd_dla_dim(cfg: TrainConfig) -> int:
    words = [w for w in cfg.generators.replace(" ", "").split(",") if w]
    if not words:
        raise ConfigError("dla-dim needs --generators, e.g. \"XI,IX,ZZ\"")
    try:
        print(lie_closure_dim(words))
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sunvqc", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("-v", "--verbose", action="store_true")
        for key in list(FIELDS) + list(RUN_KEYS):
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    flags = {k: v for k, v in vars(args).items() if k in FIELDS or k in RUN_KEYS}
    try:
        cfg, extra = parse_config(args.command, args.config, flags)
        if args.command == "grad-check":
            return cmd_grad_check(cfg)
        if args.command == "dla-dim":
            return cmd_dla_dim(cfg)
        out = Path(extra["out"])
        handler = {"autoencode": cmd_autoencode, "classify": cmd_classify, "bp-scan": cmd_bp_scan}
        return handler[args.command](cfg, out)
    except (ConfigError, ValidationError) as exc:
        print(f"sunvqc: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (NonFiniteError, FloatingPointError, RuntimeError, OSError) as exc:
        print(f"sunvqc: run failed: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
