"""Fixed random feature map shared by the learners, plus frozen input standardization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

SNAPSHOT_VERSION = 1

ACTIVATIONS = {"sigmoid": expit, "tanh": np.tanh}


@dataclass(frozen=True)
class HiddenLayer:
    """Random input-to-hidden map; weights and biases are drawn once and never trained."""

    input_dim: int
    width: int
    weights: np.ndarray  # (width, input_dim)
    biases: np.ndarray  # (width,)
    activation: str
    seed: int

    def to_snapshot(self) -> dict:
        """Plain-type snapshot; weights are re-derivable from the seed."""
        return {
            "version": SNAPSHOT_VERSION,
            "input_dim": self.input_dim,
            "width": self.width,
            "activation": self.activation,
            "seed": self.seed,
        }

    @classmethod
    def from_snapshot(cls, snap: dict) -> "HiddenLayer":
        if snap.get("version") != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported layer snapshot version: {snap.get('version')!r}")
        return init_hidden(snap["input_dim"], snap["width"], snap["seed"], snap["activation"])


def init_hidden(input_dim: int, width: int, seed: int, activation: str = "sigmoid") -> HiddenLayer:
    """Draw a fixed random layer: weights and biases i.i.d. uniform on [-1, 1]."""
    if input_dim < 1 or width < 1:
        raise ValueError("input_dim and width must be >= 1")
    if activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}; choose from {sorted(ACTIVATIONS)}")
    rng = np.random.default_rng(seed)
    weights = rng.uniform(-1.0, 1.0, size=(width, input_dim))
    biases = rng.uniform(-1.0, 1.0, size=width)
    weights.setflags(write=False)
    biases.setflags(write=False)
    return HiddenLayer(input_dim, width, weights, biases, activation, seed)


def map_features(layer: HiddenLayer, X) -> np.ndarray:
    """Hidden activations for a batch of rows: act(X w_i + b_i) per unit."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("inputs must be 2-d (samples, input_dim)")
    if X.shape[1] != layer.input_dim:
        raise ValueError(f"inputs have {X.shape[1]} columns, layer expects {layer.input_dim}")
    Z = X @ layer.weights.T + layer.biases
    return ACTIVATIONS[layer.activation](Z)


@dataclass(frozen=True)
class Standardizer:
    """Per-column z-scoring with statistics frozen at fit time."""

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] < 1:
            raise ValueError("need a nonempty 2-d array to fit")
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        # constant columns pass through unscaled
        scale = np.where(scale > 0.0, scale, 1.0)
        mean.setflags(write=False)
        scale.setflags(write=False)
        return cls(mean, scale)

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return (X - self.mean) / self.scale
