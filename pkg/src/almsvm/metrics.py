"""Trained-model container, prediction and evaluation metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data_io import Dataset

__all__ = ["Model", "predict", "predict_label", "accuracy", "mse"]


@dataclass
class Model:
    """Weights plus the bookkeeping needed to score raw samples.

    ``label_map = (lo, hi)`` records which original labels were mapped
    to -1 and +1 during training; ``bias_augmented`` says whether the
    last weight is a bias applied to an implicit constant feature.
    """

    w: np.ndarray
    task: str
    bias_augmented: bool = False
    label_map: tuple[float, float] | None = None
    c_used: float = 0.0
    eps_used: float = 0.0

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        if self.w.size == 0:
            raise ValueError("model has no weights")
        if not np.all(np.isfinite(self.w)):
            raise ValueError("model weights must be finite")


def predict(model: Model, sample) -> float:
    """Raw score w . x for one sparse sample.

    Features beyond the model's dictionary contribute zero (test files
    routinely carry indices the training file never saw). For a
    bias-augmented model the constant feature is appended implicitly.
    """
    idx, vals = sample
    idx = np.asarray(idx, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    n = model.w.size
    lim = n - 1 if model.bias_augmented else n
    keep = idx < lim
    score = float(model.w[idx[keep]] @ vals[keep])
    if model.bias_augmented:
        score += float(model.w[-1])
    return score


def predict_label(model: Model, sample) -> float:
    """Classification label in the original label space; score 0 counts
    as positive."""
    sign = 1.0 if predict(model, sample) >= 0.0 else -1.0
    if model.label_map is None:
        return sign
    lo, hi = model.label_map
    return hi if sign > 0 else lo


def accuracy(model: Model, test: Dataset) -> float:
    """Percentage of correct label predictions on ``test``."""
    if test.m == 0:
        raise ValueError("empty test set")
    correct = sum(
        1
        for sample, y in zip(test.samples, test.labels)
        if predict_label(model, sample) == y
    )
    return 100.0 * correct / test.m


def mse(model: Model, test: Dataset) -> float:
    """Mean squared error of the raw scores on ``test``."""
    if test.m == 0:
        raise ValueError("empty test set")
    total = sum(
        (y - predict(model, sample)) ** 2
        for sample, y in zip(test.samples, test.labels)
    )
    return total / test.m
