"""Recursive ridge linear regressor on the raw (standardized) inputs, intercept included.

Serves as the simple long-memory fallback while the wide network is still
overfit-suspect after a reset. Shares the same recursion as the sequential
network, just on the intercept-augmented design.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import as_targets, init_inverse_gram, ridge_solve, smw_update

DEFAULT_RIDGE = 1e-6


def _augment(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("inputs must be 2-d (samples, input_dim)")
    return np.hstack([np.ones((X.shape[0], 1)), X])


@dataclass
class LinearModel:
    weights: np.ndarray  # (input_dim + 1, k_out), row 0 is the intercept
    R: np.ndarray  # (input_dim + 1, input_dim + 1)
    lam: float
    absorbed: int

    def predict(self, X) -> np.ndarray:
        A = _augment(X)
        if A.shape[1] != self.weights.shape[0]:
            raise ValueError(f"inputs have {A.shape[1] - 1} columns, model expects {self.weights.shape[0] - 1}")
        return A @ self.weights


def linear_fit(X, Y, lam: float = DEFAULT_RIDGE) -> LinearModel:
    """Ridge least squares on the intercept-augmented design."""
    Y = as_targets(Y)
    A = _augment(X)
    if A.shape[0] != Y.shape[0]:
        raise ValueError("inputs and targets disagree on sample count")
    return LinearModel(ridge_solve(A, Y, lam), init_inverse_gram(A, lam), lam, A.shape[0])


def linear_update(model: LinearModel, Xb, Yb) -> LinearModel:
    """Absorb a batch in place via the same rank-b recursion as the network learner."""
    Yb = as_targets(Yb)
    Ab = _augment(Xb)
    if Ab.shape[0] != Yb.shape[0]:
        raise ValueError("inputs and targets disagree on sample count")
    R = smw_update(model.R, Ab)
    model.weights = model.weights + R @ (Ab.T @ (Yb - Ab @ model.weights))
    model.R = R
    model.absorbed += Ab.shape[0]
    return model
