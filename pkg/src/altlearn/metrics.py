"""Prequential error metrics and corpus-level summaries."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np


class NearZeroTargetError(ValueError):
    """Targets too close to zero for percent error; fix the target scale, never clamp."""


EPS_GUARD = 1e-8


def mape(y_hat, y, guard: float = EPS_GUARD) -> float:
    """Mean absolute percent error, in percent: mean(|(y_hat - y) / y|) * 100."""
    y_hat = np.asarray(y_hat, dtype=float)
    y = np.asarray(y, dtype=float)
    if y_hat.shape != y.shape:
        raise ValueError(f"shape mismatch: {y_hat.shape} vs {y.shape}")
    if y.size == 0:
        raise ValueError("empty batch")
    if np.any(np.abs(y) <= guard):
        raise NearZeroTargetError(f"some |target| <= {guard}; percent error undefined")
    return float(np.mean(np.abs((y_hat - y) / y)) * 100.0)


def mse(y_hat, y) -> float:
    """Mean squared error over all entries."""
    y_hat = np.asarray(y_hat, dtype=float)
    y = np.asarray(y, dtype=float)
    if y_hat.shape != y.shape:
        raise ValueError(f"shape mismatch: {y_hat.shape} vs {y.shape}")
    if y.size == 0:
        raise ValueError("empty batch")
    return float(np.mean((y_hat - y) ** 2))


METRICS = {"mape": mape, "mse": mse}


@dataclass(frozen=True)
class RunSummary:
    """Corpus-level statistics for one algorithm: mean/sd over per-stream mean errors."""

    algorithm: str
    stream_means: tuple[float, ...]
    mean: float
    sd: float
    reset_counts: tuple[int, ...]
    reset_indices: tuple[tuple[int, ...], ...]


def summarize(
    step_errors: Mapping[str, Sequence[Sequence[float]]],
    reset_indices: Mapping[str, Sequence[Sequence[int]]] | None = None,
) -> list[RunSummary]:
    """Collapse per-step errors into per-stream means and a corpus mean/sd per algorithm.

    Corpus sd uses the sample convention (n - 1); a single stream reports sd 0.
    """
    out = []
    for algo, streams in step_errors.items():
        if not streams:
            raise ValueError(f"no streams for algorithm {algo!r}")
        per_stream = tuple(float(np.mean(np.asarray(errs, dtype=float))) for errs in streams)
        mean = float(np.mean(per_stream))
        sd = float(np.std(per_stream, ddof=1)) if len(per_stream) > 1 else 0.0
        if reset_indices is not None and algo in reset_indices:
            idx = tuple(tuple(int(i) for i in s) for s in reset_indices[algo])
        else:
            idx = tuple(() for _ in per_stream)
        counts = tuple(len(s) for s in idx)
        out.append(RunSummary(algo, per_stream, mean, sd, counts, idx))
    return out


@dataclass(frozen=True)
class SensitivityCell:
    """Distribution summary of per-stream errors at one (threshold, window) grid point."""

    reset_threshold: float
    window: int
    n: int
    mean: float
    q1: float
    median: float
    q3: float
    lo: float
    hi: float


def sensitivity_grid(
    reset_thresholds: Sequence[float],
    windows: Sequence[int],
    specs: Sequence,
    base_cfg,
) -> tuple[list[tuple[float, int, int, float]], list[SensitivityCell]]:
    """Run the alternating controller across a (threshold x window) grid over a corpus.

    Streams are generated once from their specs and shared by every cell. Returns
    long-format rows (threshold, window, stream_id, mape) plus one distribution
    summary per cell; both orderings are deterministic.
    """
    # local imports keep this module loadable before the controller package half
    from .controller import run_stream
    from .drift_sim import gen_stream

    if not reset_thresholds or not windows:
        raise ValueError("threshold and window grids must be nonempty")
    if not specs:
        raise ValueError("corpus must be nonempty")
    streams = [gen_stream(spec) for spec in specs]
    rows: list[tuple[float, int, int, float]] = []
    cells: list[SensitivityCell] = []
    for thr in reset_thresholds:
        for win in windows:
            cfg = replace(base_cfg, reset_threshold=float(thr), window=int(win))
            vals = []
            for sid, stream in enumerate(streams):
                records = run_stream(cfg, stream)
                val = float(np.mean([r.err_long for r in records]))
                vals.append(val)
                rows.append((float(thr), int(win), sid, val))
            q1, med, q3 = np.percentile(vals, [25.0, 50.0, 75.0])
            cells.append(
                SensitivityCell(
                    reset_threshold=float(thr),
                    window=int(win),
                    n=len(vals),
                    mean=float(np.mean(vals)),
                    q1=float(q1),
                    median=float(med),
                    q3=float(q3),
                    lo=float(np.min(vals)),
                    hi=float(np.max(vals)),
                )
            )
    return rows, cells
