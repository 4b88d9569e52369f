"""Batch-trained random-feature network: closed-form output weights over a window."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import HiddenLayer, init_hidden, map_features
from .metrics import mape
from .numerics import as_targets, ridge_solve

DEFAULT_RIDGE = 1e-6
WIDTH_GRID = (10, 20, 30, 50, 80)


@dataclass
class ElmModel:
    layer: HiddenLayer
    beta: np.ndarray  # (width, k_out)
    trained_on: int

    def predict(self, X) -> np.ndarray:
        return map_features(self.layer, X) @ self.beta


def train_batch(layer: HiddenLayer, X, Y, lam: float = DEFAULT_RIDGE) -> ElmModel:
    """Fit output weights in closed form on the whole batch."""
    Y = as_targets(Y)
    H = map_features(layer, X)
    if H.shape[0] != Y.shape[0]:
        raise ValueError("inputs and targets disagree on sample count")
    beta = ridge_solve(H, Y, lam)
    return ElmModel(layer, beta, H.shape[0])


def select_width(
    X,
    Y,
    candidate_widths=WIDTH_GRID,
    folds: int = 5,
    repeats: int = 3,
    seed: int = 0,
    activation: str = "sigmoid",
    lam: float = DEFAULT_RIDGE,
) -> int:
    """Pick the hidden width with the lowest mean validation MAPE.

    Folds are contiguous time blocks (no shuffling, so drift cannot leak between
    train and validation); repeats redraw the random layer. Ties go to the
    smaller width.
    """
    X = np.asarray(X, dtype=float)
    Y = as_targets(Y)
    candidates = sorted(set(int(k) for k in candidate_widths))
    if not candidates:
        raise ValueError("candidate_widths must be nonempty")
    if min(candidates) < 1:
        raise ValueError("widths must be >= 1")
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    n = X.shape[0]
    if n < 2 * folds:
        raise ValueError(f"insufficient data: {n} samples for {folds} contiguous folds")
    blocks = np.array_split(np.arange(n), folds)
    scores = np.zeros(len(candidates))
    for r in range(repeats):
        layer_seed = seed + 7919 * r
        for ci, width in enumerate(candidates):
            layer = init_hidden(X.shape[1], width, layer_seed, activation)
            fold_err = []
            for held in blocks:
                train_idx = np.setdiff1d(np.arange(n), held, assume_unique=True)
                model = train_batch(layer, X[train_idx], Y[train_idx], lam)
                fold_err.append(mape(model.predict(X[held]), Y[held]))
            scores[ci] += np.mean(fold_err)
    # argmin returns the first (smallest) candidate on exact ties
    return candidates[int(np.argmin(scores))]
