"""Alternating-learners state machine: predict, compare, register, reset, update.

One wide sequential network carries the long memory, a small window model
carries the short memory, and a linear fallback covers the window right after
a reset while the network would still be overfit. A FIFO bit queue records
steps where the long model was both unacceptable and beaten by the short
model; when those bits dominate, the long window is truncated to the short
window and the long learners warm-restart from it.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .elm import ElmModel, train_batch
from .features import HiddenLayer, Standardizer, init_hidden
from .linear import LinearModel, linear_fit, linear_update
from .metrics import METRICS
from .numerics import NumericalBreakdownError, as_targets
from .oselm import OselmState, oselm_init, oselm_update, warm_restart

# selector labels: which long-memory learner produced the emitted prediction
SELECT_NETWORK = "oselm"
SELECT_LINEAR = "linear"

CSV_COLUMNS = ("index", "y_true", "y_pred", "err_L", "err_S", "q_bit", "reset", "selector")


@dataclass(frozen=True)
class ControllerConfig:
    """Controller knobs; defaults follow the benchmark configuration."""

    hidden_width: int = 30
    window: int = 20
    reset_threshold: float = 0.4
    acceptable_err: float = 1.0
    least_wait: int = 5
    batch_size: int = 1
    init_batches: int = 100
    ridge: float = 1e-6
    seed: int = 0
    activation: str = "sigmoid"
    metric: str | Callable[[np.ndarray, np.ndarray], float] = "mape"
    shared_layer: bool = True
    reset_simple_learner: bool = True

    def metric_fn(self) -> Callable[[np.ndarray, np.ndarray], float]:
        if callable(self.metric):
            return self.metric
        return METRICS[self.metric]

    def validate(self) -> None:
        if not 0.0 < self.reset_threshold < 1.0:
            raise ValueError("reset_threshold must lie in (0, 1)")
        if self.acceptable_err <= 0:
            raise ValueError("acceptable_err must be positive")
        if not 1 <= self.least_wait <= self.window:
            raise ValueError("least_wait must lie in [1, window]")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.hidden_width < 1:
            raise ValueError("hidden_width must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.init_batches < 1:
            raise ValueError("init_batches must be >= 1")
        if self.ridge < 0:
            raise ValueError("ridge must be >= 0")
        if not callable(self.metric) and self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")


class PerfQueue:
    """Bounded FIFO of comparison bits; capacity equals the short-window size."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._bits: deque[int] = deque()

    def push(self, bit: int) -> None:
        """Append, then drop the oldest entry once past capacity."""
        if bit not in (0, 1):
            raise ValueError("queue entries are bits")
        self._bits.append(bit)
        if len(self._bits) > self.capacity:
            self._bits.popleft()

    def clear(self) -> None:
        self._bits.clear()

    def fraction(self) -> float:
        return sum(self._bits) / len(self._bits) if self._bits else 0.0

    def __len__(self) -> int:
        return len(self._bits)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(self._bits)


@dataclass(frozen=True)
class ResetEvent:
    index: int  # samples absorbed when the reset fired
    cause: str  # "drift" | "numerical-breakdown"


@dataclass
class ControllerState:
    layer: HiddenLayer
    short_layer: HiddenLayer
    standardizer: Standardizer
    y_offset: np.ndarray  # (k,) initial-data target mean; learners fit centered targets
    long_learner: OselmState
    simple_learner: LinearModel
    short_learner: ElmModel
    sw_x: np.ndarray  # last <= window standardized inputs
    sw_y: np.ndarray  # matching centered targets
    queue: PerfQueue
    window_start: int  # sample index where the current concept window began
    clock: int  # samples absorbed so far
    resets: list[ResetEvent] = field(default_factory=list)


@dataclass(frozen=True)
class StepRecord:
    """Outcome of one prequential step; the prediction predates any label use."""

    index: int  # stream index of the batch's first sample
    y_true: np.ndarray  # (b, k)
    y_pred: np.ndarray  # (b, k) emitted long-memory prediction
    err_long: float
    err_short: float
    q_bit: int
    reset: bool
    selector: str


def init_phase(cfg: ControllerConfig, X0, Y0) -> ControllerState:
    """Train all three learners on the initial dataset and open the short window.

    The long learners see every initial sample; the short model sees only the
    trailing window. Input standardization and the target centering offset are
    fit here and frozen for the whole stream; learners always see standardized
    inputs and centered targets, and predictions are mapped back to raw scale.
    """
    cfg.validate()
    X0 = np.asarray(X0, dtype=float)
    Y0 = as_targets(Y0)
    if X0.ndim != 2 or X0.shape[0] == 0:
        raise ValueError("initial dataset must be a nonempty 2-d array")
    if X0.shape[0] != Y0.shape[0]:
        raise ValueError("inputs and targets disagree on sample count")
    standardizer = Standardizer.fit(X0)
    xs = standardizer.transform(X0)
    y_offset = Y0.mean(axis=0)
    yc = Y0 - y_offset
    layer = init_hidden(X0.shape[1], cfg.hidden_width, cfg.seed, cfg.activation)
    short_layer = layer if cfg.shared_layer else init_hidden(
        X0.shape[1], cfg.hidden_width, cfg.seed + 1, cfg.activation
    )
    tail = min(cfg.window, X0.shape[0])
    return ControllerState(
        layer=layer,
        short_layer=short_layer,
        standardizer=standardizer,
        y_offset=y_offset,
        long_learner=oselm_init(layer, xs, yc, cfg.ridge),
        simple_learner=linear_fit(xs, yc, cfg.ridge),
        short_learner=train_batch(short_layer, xs[-tail:], yc[-tail:], cfg.ridge),
        sw_x=xs[-tail:].copy(),
        sw_y=yc[-tail:].copy(),
        queue=PerfQueue(cfg.window),
        window_start=0,
        clock=X0.shape[0],
    )


def overfit_guard(state: ControllerState, cfg: ControllerConfig) -> str:
    """Gate the wide network behind sample count: it needs 2x its width of data."""
    if state.clock - state.window_start >= 2 * cfg.hidden_width:
        return SELECT_NETWORK
    return SELECT_LINEAR


def register(err_long: float, err_short: float, acceptable: float) -> int:
    """Comparison bit: 0 unless the long model is unacceptable AND no better than short."""
    if not (np.isfinite(err_long) and np.isfinite(err_short)):
        raise ValueError("errors must be finite")
    if err_long < acceptable or err_long < err_short:
        return 0
    return 1


def maybe_reset(state: ControllerState, cfg: ControllerConfig) -> bool:
    """Truncate the long window and warm-restart when 1-bits dominate the queue.

    Requires the queue to be longer than least_wait (strictly) and the 1-bit
    fraction to exceed reset_threshold (strictly).
    """
    q = state.queue
    if len(q) > cfg.least_wait and q.fraction() > cfg.reset_threshold:
        _apply_reset(state, cfg, cause="drift")
        return True
    return False


def _apply_reset(state: ControllerState, cfg: ControllerConfig, cause: str, force_simple: bool = False) -> None:
    state.window_start = state.clock - cfg.window
    state.long_learner = warm_restart(state.layer, state.sw_x, state.sw_y, cfg.ridge)
    if cfg.reset_simple_learner or force_simple:
        state.simple_learner = linear_fit(state.sw_x, state.sw_y, cfg.ridge)
    state.queue.clear()
    state.resets.append(ResetEvent(index=state.clock, cause=cause))


def predict_batch(state: ControllerState, cfg: ControllerConfig, Xb) -> tuple[np.ndarray, np.ndarray, str]:
    """Label-free raw-scale predictions for a batch: (long, short, selector used for long)."""
    xs = state.standardizer.transform(np.asarray(Xb, dtype=float))
    selector = overfit_guard(state, cfg)
    long_model = state.long_learner if selector == SELECT_NETWORK else state.simple_learner
    return (
        long_model.predict(xs) + state.y_offset,
        state.short_learner.predict(xs) + state.y_offset,
        selector,
    )


def step(state: ControllerState, cfg: ControllerConfig, Xb, Yb) -> tuple[StepRecord, ControllerState]:
    """One prequential step: predict, score, register, maybe reset, then absorb the batch.

    The emitted prediction comes from the guard-selected long-memory learner
    and is computed before the labels are touched. The configured metric is
    evaluated on the long prediction first, then the short one. A numerical
    breakdown during the updates forces a warm restart instead of killing the
    stream.
    """
    Xb = np.asarray(Xb, dtype=float)
    Yb = as_targets(Yb)
    if Xb.ndim != 2 or Xb.shape[0] == 0:
        raise ValueError("batch must be a nonempty 2-d array")
    if Xb.shape[0] != Yb.shape[0]:
        raise ValueError("inputs and targets disagree on sample count")

    index = state.clock
    y_long, y_short, selector = predict_batch(state, cfg, Xb)

    metric = cfg.metric_fn()
    err_long = float(metric(y_long, Yb))
    err_short = float(metric(y_short, Yb))
    bit = register(err_long, err_short, cfg.acceptable_err)
    state.queue.push(bit)
    did_reset = maybe_reset(state, cfg)

    xs = state.standardizer.transform(Xb)
    yc = Yb - state.y_offset
    try:
        oselm_update(state.long_learner, xs, yc)
        linear_update(state.simple_learner, xs, yc)
    except NumericalBreakdownError:
        # rebuild both long learners from the short window, then absorb the batch
        _apply_reset(state, cfg, cause="numerical-breakdown", force_simple=True)
        did_reset = True
        oselm_update(state.long_learner, xs, yc)
        linear_update(state.simple_learner, xs, yc)

    state.sw_x = np.vstack([state.sw_x, xs])[-cfg.window :]
    state.sw_y = np.vstack([state.sw_y, yc])[-cfg.window :]
    state.short_learner = train_batch(state.short_layer, state.sw_x, state.sw_y, cfg.ridge)
    state.clock += Xb.shape[0]

    record = StepRecord(
        index=index,
        y_true=Yb.copy(),
        y_pred=np.array(y_long, dtype=float),
        err_long=err_long,
        err_short=err_short,
        q_bit=bit,
        reset=did_reset,
        selector=selector,
    )
    return record, state


def run_stream(cfg: ControllerConfig, stream, return_state: bool = False):
    """Initialize on the first init_batches * batch_size samples, then step through the rest.

    `stream` is either an object with .x/.y arrays or an (X, Y) pair. Fully
    deterministic given the config seed and the stream bytes.
    """
    X, Y = _unpack_stream(stream)
    n_init = cfg.init_batches * cfg.batch_size
    if X.shape[0] < n_init:
        raise ValueError(f"stream has {X.shape[0]} samples; initial phase needs {n_init}")
    state = init_phase(cfg, X[:n_init], Y[:n_init])
    records: list[StepRecord] = []
    for start in range(n_init, X.shape[0], cfg.batch_size):
        stop = min(start + cfg.batch_size, X.shape[0])
        record, state = step(state, cfg, X[start:stop], Y[start:stop])
        records.append(record)
    if return_state:
        return records, state
    return records


def _unpack_stream(stream) -> tuple[np.ndarray, np.ndarray]:
    if hasattr(stream, "x") and hasattr(stream, "y"):
        X, Y = stream.x, stream.y
    else:
        X, Y = stream
    return np.asarray(X, dtype=float), as_targets(Y)


def records_to_csv(records: Sequence[StepRecord], path) -> None:
    """One row per sample; batch-level fields repeat within a batch.

    Multi-output targets are joined with ';' in the y columns.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            for i in range(rec.y_true.shape[0]):
                writer.writerow(
                    (
                        rec.index + i,
                        _fmt_row(rec.y_true[i]),
                        _fmt_row(rec.y_pred[i]),
                        repr(rec.err_long),
                        repr(rec.err_short),
                        rec.q_bit,
                        int(rec.reset),
                        rec.selector,
                    )
                )


def _fmt_row(values: np.ndarray) -> str:
    return ";".join(repr(float(v)) for v in np.atleast_1d(values))
