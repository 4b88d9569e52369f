"""Online-sequential learner: recursive output-weight updates, no stored history.

The recursion absorbs batches of any size and stays exactly equivalent to
refitting in closed form on everything seen (with the same ridge), which is
what makes warm restarts from a short window coherent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import HiddenLayer, map_features
from .numerics import (
    NumericalBreakdownError,
    as_targets,
    init_inverse_gram,
    is_positive_definite,
    ridge_solve,
    smw_update,
    symmetrize,
)

DEFAULT_RIDGE = 1e-6

# period (in update calls) of the stabilizing symmetry/definiteness pass
RESTABILIZE_EVERY = 10_000


@dataclass
class OselmState:
    layer: HiddenLayer
    beta: np.ndarray  # (width, k_out)
    R: np.ndarray  # (width, width) inverse of the regularized feature Gram
    lam: float
    absorbed: int
    updates: int = 0

    def predict(self, X) -> np.ndarray:
        return map_features(self.layer, X) @ self.beta


def oselm_init(layer: HiddenLayer, X0, Y0, lam: float = DEFAULT_RIDGE) -> OselmState:
    """Closed-form fit on the initial chunk; also builds the inverse Gram."""
    Y0 = as_targets(Y0)
    H0 = map_features(layer, X0)
    if H0.shape[0] != Y0.shape[0]:
        raise ValueError("inputs and targets disagree on sample count")
    beta = ridge_solve(H0, Y0, lam)
    R = init_inverse_gram(H0, lam)
    return OselmState(layer, beta, R, lam, absorbed=H0.shape[0])


def oselm_update(state: OselmState, Xb, Yb) -> OselmState:
    """Absorb a batch in place; no samples are stored.

    The inverse Gram is updated by the rank-b identity, then the weights by
    beta += R_new Hb^T (Yb - Hb beta). Raises NumericalBreakdownError when the
    recursion degrades, signalling the owner to rebuild from a window.
    """
    Yb = as_targets(Yb)
    Hb = map_features(state.layer, Xb)
    if Hb.shape[0] != Yb.shape[0]:
        raise ValueError("inputs and targets disagree on sample count")
    R = smw_update(state.R, Hb)
    state.beta = state.beta + R @ (Hb.T @ (Yb - Hb @ state.beta))
    state.R = R
    state.absorbed += Hb.shape[0]
    state.updates += 1
    if state.updates % RESTABILIZE_EVERY == 0:
        _restabilize(state)
    return state


def _restabilize(state: OselmState) -> None:
    R = symmetrize(state.R)
    if not is_positive_definite(R):
        raise NumericalBreakdownError("inverse Gram lost positive definiteness")
    state.R = R


def warm_restart(layer: HiddenLayer, Xw, Yw, lam: float = DEFAULT_RIDGE) -> OselmState:
    """Fresh state fitted on a short window; later updates continue recursively."""
    return oselm_init(layer, Xw, Yw, lam)
