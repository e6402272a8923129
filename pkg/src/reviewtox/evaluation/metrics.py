"""Confusion counts, per-class precision/recall/F1, and Cohen's kappa."""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields
from typing import Sequence

import numpy as np

METRIC_NAMES = ("p0", "r0", "f1_0", "p1", "r1", "f1_1", "accuracy")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Binary confusion counts with class 1 (toxic) as the positive class."""

    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp,
                               self.tn + other.tn, self.fn + other.fn)


@dataclass(frozen=True)
class MetricSet:
    p0: float
    r0: float
    f1_0: float
    p1: float
    r1: float
    f1_1: float
    accuracy: float

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)

    def as_dict(self) -> dict:
        return dict(zip(METRIC_NAMES, astuple(self)))


def _binary(a, name) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if a.size and not np.isin(a, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0 and 1")
    return a.astype(np.int64)


def confusion(y_true: Sequence[int], y_pred: Sequence[int]) -> ConfusionMatrix:
    t, p = _binary(y_true, "y_true"), _binary(y_pred, "y_pred")
    if t.size != p.size:
        raise ValueError(f"length mismatch: {t.size} labels vs {p.size} predictions")
    tp = int(np.sum((t == 1) & (p == 1)))
    fp = int(np.sum((t == 0) & (p == 1)))
    tn = int(np.sum((t == 0) & (p == 0)))
    return ConfusionMatrix(tp, fp, tn, t.size - tp - fp - tn)


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def metrics(cm: ConfusionMatrix) -> MetricSet:
    """Per-class precision, recall and F1, plus accuracy.

    An empty denominator yields 0 for that precision or recall, and F1 is 0
    when precision and recall are both 0.
    """
    if cm.total == 0:
        raise ValueError("confusion matrix is empty")
    p1, r1 = _ratio(cm.tp, cm.tp + cm.fp), _ratio(cm.tp, cm.tp + cm.fn)
    p0, r0 = _ratio(cm.tn, cm.tn + cm.fn), _ratio(cm.tn, cm.tn + cm.fp)
    return MetricSet(p0, r0, _f1(p0, r0), p1, r1, _f1(p1, r1), (cm.tp + cm.tn) / cm.total)


def cohen_kappa(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """Chance-corrected agreement between two binary raters.

    Returns 1 when chance agreement is already 1 (both raters constant and equal).
    """
    cm = confusion(labels_a, labels_b)
    n = cm.total
    if n == 0:
        raise ValueError("no ratings")
    p_o = (cm.tp + cm.tn) / n
    a1, b1 = (cm.tp + cm.fn) / n, (cm.tp + cm.fp) / n
    p_e = a1 * b1 + (1 - a1) * (1 - b1)
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1 - p_e)
