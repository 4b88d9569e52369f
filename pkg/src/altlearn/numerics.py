"""Dense matrix kernels shared by every learner: ridge solves and inverse-Gram updates."""

from __future__ import annotations

import numpy as np
from scipy import linalg


class SingularSystemError(np.linalg.LinAlgError):
    """Unregularized least-squares system is rank deficient; caller must add ridge."""


class NumericalBreakdownError(RuntimeError):
    """Recursive inverse update lost positive definiteness; caller should rebuild from data."""


# Largest batch folded in via the rank-b identity; bigger batches rebuild the Gram directly.
MAX_UPDATE_ROWS = 64


def as_targets(Y) -> np.ndarray:
    """Targets as a 2-d float array (samples, outputs)."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.ndim != 2:
        raise ValueError("targets must be 1-d or 2-d")
    return Y


def symmetrize(A: np.ndarray) -> np.ndarray:
    return (A + A.T) / 2.0


def is_positive_definite(A: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(A)
        return True
    except np.linalg.LinAlgError:
        return False


def ridge_solve(H: np.ndarray, Y: np.ndarray, lam: float) -> np.ndarray:
    """Minimize ||H B - Y||^2 + lam * ||B||^2 over B, via the normal equations.

    H is (n, k_feat) with rows as samples, Y is (n, k_out). With lam = 0 the
    design must have full column rank; a rank-deficient system raises
    SingularSystemError so the caller knows to regularize.
    """
    H = np.asarray(H, dtype=float)
    Y = as_targets(Y)
    if H.ndim != 2:
        raise ValueError("design matrix must be 2-d")
    if H.shape[0] != Y.shape[0]:
        raise ValueError(f"design {H.shape} and targets {Y.shape} disagree on sample count")
    if lam < 0:
        raise ValueError("ridge penalty must be >= 0")
    n, k_feat = H.shape
    if lam == 0.0 and n < k_feat:
        raise SingularSystemError("fewer samples than features and no ridge penalty")
    G = H.T @ H
    if lam > 0.0:
        G = G + lam * np.eye(k_feat)
    try:
        factor = linalg.cho_factor(G, check_finite=False)
    except np.linalg.LinAlgError as err:
        raise SingularSystemError(f"normal equations not positive definite: {err}") from err
    return linalg.cho_solve(factor, H.T @ Y, check_finite=False)


def init_inverse_gram(H0: np.ndarray, lam: float) -> np.ndarray:
    """Inverse of the regularized Gram (H0^T H0 + lam I), symmetrized.

    Positive definite whenever lam > 0, regardless of how few rows H0 has.
    """
    H0 = np.asarray(H0, dtype=float)
    if H0.ndim != 2:
        raise ValueError("design matrix must be 2-d")
    if lam < 0:
        raise ValueError("ridge penalty must be >= 0")
    k_feat = H0.shape[1]
    G = H0.T @ H0 + lam * np.eye(k_feat)
    try:
        factor = linalg.cho_factor(G, check_finite=False)
    except np.linalg.LinAlgError as err:
        raise SingularSystemError(f"Gram matrix not positive definite: {err}") from err
    return symmetrize(linalg.cho_solve(factor, np.eye(k_feat), check_finite=False))


def smw_update(R: np.ndarray, Hb: np.ndarray) -> np.ndarray:
    """Fold b new design rows into an inverse Gram without touching old samples.

    Rank-b downdate R - R Hb^T (I_b + Hb R Hb^T)^{-1} Hb R; the inner b x b
    system is solved by direct factorization. Batches above MAX_UPDATE_ROWS
    rebuild the Gram from R^{-1} + Hb^T Hb instead, which is equivalent and
    better conditioned for wide updates. Result is symmetrized.
    """
    R = np.asarray(R, dtype=float)
    Hb = np.asarray(Hb, dtype=float)
    if Hb.ndim != 2 or R.ndim != 2:
        raise ValueError("inputs must be 2-d")
    if R.shape[0] != R.shape[1] or R.shape[1] != Hb.shape[1]:
        raise ValueError(f"inverse Gram {R.shape} incompatible with rows {Hb.shape}")
    b = Hb.shape[0]
    if b == 0:
        return R.copy()
    if b > MAX_UPDATE_ROWS:
        return _rebuild_inverse(R, Hb)
    V = R @ Hb.T
    inner = symmetrize(np.eye(b) + Hb @ V)
    try:
        factor = linalg.cho_factor(inner, check_finite=False)
    except np.linalg.LinAlgError as err:
        raise NumericalBreakdownError(f"inner update system not solvable: {err}") from err
    correction = V @ linalg.cho_solve(factor, V.T, check_finite=False)
    return symmetrize(R - correction)


def _rebuild_inverse(R: np.ndarray, Hb: np.ndarray) -> np.ndarray:
    k_feat = R.shape[0]
    eye = np.eye(k_feat)
    try:
        factor = linalg.cho_factor(symmetrize(R), check_finite=False)
        G = linalg.cho_solve(factor, eye, check_finite=False) + Hb.T @ Hb
        factor_new = linalg.cho_factor(symmetrize(G), check_finite=False)
    except np.linalg.LinAlgError as err:
        raise NumericalBreakdownError(f"Gram rebuild failed: {err}") from err
    return symmetrize(linalg.cho_solve(factor_new, eye, check_finite=False))
