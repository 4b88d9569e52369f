"""Benchmark harness: four algorithms over seeded corpora, deterministic CSV outputs.

The comparison set: a static batch network frozen after the initial data, a
plain sequential network that updates forever and never resets, a paired
two-model scheme that resets eagerly on any short-over-long win, and the full
alternating controller.
"""

from __future__ import annotations

import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .controller import (
    ControllerConfig,
    PerfQueue,
    StepRecord,
    records_to_csv,
    run_stream,
    _unpack_stream,
)
from .drift_sim import Stream, StreamSpec, gen_corpus, gen_stream, save_corpus
from .elm import train_batch
from .features import Standardizer, init_hidden
from .metrics import RunSummary, sensitivity_grid, summarize
from .numerics import as_targets
from .oselm import oselm_init, oselm_update, warm_restart

ALGORITHMS = ("static_elm", "oselm", "paired_learner", "alternating")


@dataclass(frozen=True)
class ExperimentConfig:
    """One benchmark run: corpus recipe, controller knobs, algorithm list, outputs."""

    n_abrupt: int = 20
    n_gradual: int = 20
    corpus_seed: int = 0
    stream_len: int = 2000
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    algorithms: tuple[str, ...] = ALGORITHMS
    out_dir: str = "results"
    n_jobs: int = 1
    sweep_thresholds: tuple[float, ...] = ()
    sweep_windows: tuple[int, ...] = ()

    def validate(self) -> None:
        if self.n_abrupt < 0 or self.n_gradual < 0:
            raise ValueError("corpus counts must be >= 0")
        if self.n_abrupt + self.n_gradual < 1:
            raise ValueError("corpus must contain at least one stream")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        if not self.algorithms:
            raise ValueError("algorithm list must be nonempty")
        if self.n_jobs < 1:
            raise ValueError("n_jobs must be >= 1")
        self.controller.validate()
        if self.stream_len <= self.controller.init_batches * self.controller.batch_size:
            raise ValueError("streams must be longer than the initial phase")
        if bool(self.sweep_thresholds) != bool(self.sweep_windows):
            raise ValueError("sweep needs both thresholds and windows")

    def to_dict(self) -> dict:
        d = {
            "n_abrupt": self.n_abrupt,
            "n_gradual": self.n_gradual,
            "corpus_seed": self.corpus_seed,
            "stream_len": self.stream_len,
            "algorithms": list(self.algorithms),
            "out_dir": self.out_dir,
            "n_jobs": self.n_jobs,
            "sweep_thresholds": list(self.sweep_thresholds),
            "sweep_windows": list(self.sweep_windows),
            "controller": {
                "hidden_width": self.controller.hidden_width,
                "window": self.controller.window,
                "reset_threshold": self.controller.reset_threshold,
                "acceptable_err": self.controller.acceptable_err,
                "least_wait": self.controller.least_wait,
                "batch_size": self.controller.batch_size,
                "init_batches": self.controller.init_batches,
                "ridge": self.controller.ridge,
                "seed": self.controller.seed,
                "activation": self.controller.activation,
                "metric": self.controller.metric if isinstance(self.controller.metric, str)
                else getattr(self.controller.metric, "__name__", "custom"),
                "shared_layer": self.controller.shared_layer,
                "reset_simple_learner": self.controller.reset_simple_learner,
            },
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        ctrl = ControllerConfig(**d.pop("controller", {}))
        d["algorithms"] = tuple(d.get("algorithms", ALGORITHMS))
        d["sweep_thresholds"] = tuple(d.get("sweep_thresholds", ()))
        d["sweep_windows"] = tuple(d.get("sweep_windows", ()))
        return cls(controller=ctrl, **d)


def _baseline_record(index, y_true, y_pred, err, selector, q_bit=0, reset=False, err_short=float("nan")):
    return StepRecord(
        index=index,
        y_true=y_true.copy(),
        y_pred=np.array(y_pred, dtype=float),
        err_long=float(err),
        err_short=float(err_short),
        q_bit=q_bit,
        reset=reset,
        selector=selector,
    )


def run_static_elm(stream, cfg: ControllerConfig) -> list[StepRecord]:
    """Regularized batch network trained once on the initial data, never updated."""
    X, Y = _unpack_stream(stream)
    n_init = cfg.init_batches * cfg.batch_size
    if X.shape[0] < n_init:
        raise ValueError("stream shorter than the initial phase")
    standardizer = Standardizer.fit(X[:n_init])
    layer = init_hidden(X.shape[1], cfg.hidden_width, cfg.seed, cfg.activation)
    model = train_batch(layer, standardizer.transform(X[:n_init]), Y[:n_init], cfg.ridge)
    metric = cfg.metric_fn()
    records = []
    for start in range(n_init, X.shape[0], cfg.batch_size):
        stop = min(start + cfg.batch_size, X.shape[0])
        yb = as_targets(Y[start:stop])
        y_hat = model.predict(standardizer.transform(X[start:stop]))
        records.append(_baseline_record(start, yb, y_hat, metric(y_hat, yb), "static"))
    return records


def run_plain_oselm(stream, cfg: ControllerConfig) -> list[StepRecord]:
    """Sequential network that absorbs every batch and never resets."""
    X, Y = _unpack_stream(stream)
    n_init = cfg.init_batches * cfg.batch_size
    if X.shape[0] < n_init:
        raise ValueError("stream shorter than the initial phase")
    standardizer = Standardizer.fit(X[:n_init])
    layer = init_hidden(X.shape[1], cfg.hidden_width, cfg.seed, cfg.activation)
    state = oselm_init(layer, standardizer.transform(X[:n_init]), Y[:n_init], cfg.ridge)
    metric = cfg.metric_fn()
    records = []
    for start in range(n_init, X.shape[0], cfg.batch_size):
        stop = min(start + cfg.batch_size, X.shape[0])
        xs = standardizer.transform(X[start:stop])
        yb = as_targets(Y[start:stop])
        y_hat = state.predict(xs)
        records.append(_baseline_record(start, yb, y_hat, metric(y_hat, yb), "oselm"))
        oselm_update(state, xs, yb)
    return records


def run_paired_learner(stream, cfg: ControllerConfig) -> list[StepRecord]:
    """Two-model scheme without the acceptability threshold, wait gate, or overfit guard.

    Registers 1 whenever the short model beats the long one; resets as soon as
    the queue carries more than reset_threshold * window ones. Always emits
    the long (sequential network) prediction.
    """
    X, Y = _unpack_stream(stream)
    n_init = cfg.init_batches * cfg.batch_size
    if X.shape[0] < n_init:
        raise ValueError("stream shorter than the initial phase")
    standardizer = Standardizer.fit(X[:n_init])
    xs0 = standardizer.transform(X[:n_init])
    y0 = as_targets(Y[:n_init])
    layer = init_hidden(X.shape[1], cfg.hidden_width, cfg.seed, cfg.activation)
    long_state = oselm_init(layer, xs0, y0, cfg.ridge)
    tail = min(cfg.window, n_init)
    sw_x, sw_y = xs0[-tail:].copy(), y0[-tail:].copy()
    short_model = train_batch(layer, sw_x, sw_y, cfg.ridge)
    queue = PerfQueue(cfg.window)
    metric = cfg.metric_fn()
    records = []
    for start in range(n_init, X.shape[0], cfg.batch_size):
        stop = min(start + cfg.batch_size, X.shape[0])
        xs = standardizer.transform(X[start:stop])
        yb = as_targets(Y[start:stop])
        y_long = long_state.predict(xs)
        y_short = short_model.predict(xs)
        err_long = float(metric(y_long, yb))
        err_short = float(metric(y_short, yb))
        bit = 1 if err_short < err_long else 0
        queue.push(bit)
        did_reset = False
        if sum(queue.bits) > cfg.reset_threshold * cfg.window:
            long_state = warm_restart(layer, sw_x, sw_y, cfg.ridge)
            queue.clear()
            did_reset = True
        records.append(
            _baseline_record(start, yb, y_long, err_long, "oselm", q_bit=bit, reset=did_reset, err_short=err_short)
        )
        oselm_update(long_state, xs, yb)
        sw_x = np.vstack([sw_x, xs])[-cfg.window :]
        sw_y = np.vstack([sw_y, yb])[-cfg.window :]
        short_model = train_batch(layer, sw_x, sw_y, cfg.ridge)
    return records


def run_alternating(stream, cfg: ControllerConfig) -> list[StepRecord]:
    return run_stream(cfg, stream)


RUNNERS = {
    "static_elm": run_static_elm,
    "oselm": run_plain_oselm,
    "paired_learner": run_paired_learner,
    "alternating": run_alternating,
}


def _run_stream_all(args) -> tuple[int, dict[str, list[StepRecord]]]:
    sid, spec, algorithms, ctrl = args
    stream = gen_stream(spec)  # one materialization shared by every algorithm
    return sid, {algo: RUNNERS[algo](stream, ctrl) for algo in algorithms}


def run_experiment(config: ExperimentConfig) -> Path:
    """Generate the corpus, run every algorithm on every stream, write all CSVs.

    Outputs are byte-for-byte reproducible from the config: no timestamps, a
    fixed float format, and results written in stream order regardless of the
    parallelism degree.
    """
    config.validate()
    out = Path(config.out_dir)
    records_dir = out / "records"
    records_dir.mkdir(parents=True, exist_ok=True)

    specs = gen_corpus(config.n_abrupt, config.n_gradual, config.corpus_seed, n=config.stream_len)
    save_corpus(specs, out / "corpus.json")
    (out / "config.json").write_text(json.dumps(config.to_dict(), indent=2) + "\n")
    manifest = {
        "package": "altlearn",
        "version": __version__,
        "python": ".".join(str(v) for v in sys.version_info[:3]),
        "numpy": np.__version__,
        "corpus_seed": config.corpus_seed,
        "controller_seed": config.controller.seed,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")

    tasks = [(sid, spec, config.algorithms, config.controller) for sid, spec in enumerate(specs)]
    if config.n_jobs > 1:
        with ProcessPoolExecutor(max_workers=config.n_jobs) as pool:
            results = dict(pool.map(_run_stream_all, tasks))
    else:
        results = dict(map(_run_stream_all, tasks))

    step_errors: dict[str, list[list[float]]] = {a: [] for a in config.algorithms}
    reset_indices: dict[str, list[list[int]]] = {a: [] for a in config.algorithms}
    for sid, spec in enumerate(specs):
        for algo in config.algorithms:
            recs = results[sid][algo]
            records_to_csv(recs, records_dir / f"{algo}_{sid:03d}.csv")
            step_errors[algo].append([r.err_long for r in recs])
            reset_indices[algo].append([r.index for r in recs if r.reset])

    with (out / "stream_mapes.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("algorithm", "stream_id", "kind", "mape", "resets"))
        for algo in config.algorithms:
            for sid, spec in enumerate(specs):
                writer.writerow(
                    (
                        algo,
                        sid,
                        spec.kind,
                        repr(float(np.mean(step_errors[algo][sid]))),
                        len(reset_indices[algo][sid]),
                    )
                )

    summaries = summarize(step_errors, reset_indices)
    write_summary_csv(summaries, out / "summary.csv")

    if config.sweep_thresholds and config.sweep_windows:
        rows, cells = sensitivity_grid(config.sweep_thresholds, config.sweep_windows, specs, config.controller)
        write_sensitivity_csv(rows, cells, out)
    return out


def write_summary_csv(summaries: Sequence[RunSummary], path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("algorithm", "n_streams", "mean_mape", "sd_mape", "total_resets"))
        for s in summaries:
            writer.writerow((s.algorithm, len(s.stream_means), repr(s.mean), repr(s.sd), sum(s.reset_counts)))


def write_sensitivity_csv(rows, cells, out_dir) -> None:
    """Long-format rows (delta, W, stream_id, mape) plus per-cell distribution summaries."""
    out_dir = Path(out_dir)
    with (out_dir / "sensitivity.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("delta", "W", "stream_id", "mape"))
        for thr, win, sid, val in rows:
            writer.writerow((repr(thr), win, sid, repr(val)))
    with (out_dir / "sensitivity_cells.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("delta", "W", "n", "mean", "q1", "median", "q3", "lo", "hi"))
        for c in cells:
            writer.writerow(
                (repr(c.reset_threshold), c.window, c.n, repr(c.mean), repr(c.q1), repr(c.median), repr(c.q3), repr(c.lo), repr(c.hi))
            )
