"""Evaluation primitives: precision/recall/F1, accuracy, Cohen's kappa."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import EmptyCounts, LengthMismatch


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
        )


def prf1(c: ConfusionCounts) -> tuple[float, float, float]:
    """Precision, recall, and F1 with explicit zero-denominator conventions.

    With no predicted positives and no missed positives the classifier is
    vacuously perfect: all three values are 1.0. With no predicted
    positives but positives present, precision is 0. A fold with no actual
    positives and no false positives likewise has recall 1.0.
    """
    if c.tp + c.fp == 0:
        precision = 1.0 if c.fn == 0 else 0.0
    else:
        precision = c.tp / (c.tp + c.fp)
    if c.tp + c.fn == 0:
        recall = 1.0 if c.fp == 0 else 0.0
    else:
        recall = c.tp / (c.tp + c.fn)
    if precision + recall == 0:
        f1 = 0.0
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def accuracy(c: ConfusionCounts) -> float:
    if c.total == 0:
        raise EmptyCounts("accuracy is undefined with zero observations")
    return (c.tp + c.tn) / c.total


def confusion_from_labels(predicted, actual) -> ConfusionCounts:
    """Build counts from parallel boolean sequences (True = positive)."""
    if len(predicted) != len(actual):
        raise LengthMismatch(f"{len(predicted)} predictions vs {len(actual)} labels")
    tp = fp = fn = tn = 0
    for p, a in zip(predicted, actual):
        if p and a:
            tp += 1
        elif p and not a:
            fp += 1
        elif not p and a:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def cohens_kappa(codes_a, codes_b) -> float:
    """Chance-corrected agreement between two coders.

    kappa = (p_o - p_e) / (1 - p_e) where p_e is the product of the two
    coders' marginal category frequencies. When expected agreement is
    already perfect (both coders used a single shared category) kappa
    is 1 by convention.
    """
    codes_a = list(codes_a)
    codes_b = list(codes_b)
    if len(codes_a) != len(codes_b):
        raise LengthMismatch(f"{len(codes_a)} codes vs {len(codes_b)} codes")
    if not codes_a:
        raise ValueError("kappa needs at least one coded item")
    n = len(codes_a)
    p_o = sum(a == b for a, b in zip(codes_a, codes_b)) / n
    marg_a = Counter(codes_a)
    marg_b = Counter(codes_b)
    p_e = sum(marg_a[c] * marg_b.get(c, 0) for c in marg_a) / (n * n)
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)
