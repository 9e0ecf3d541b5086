"""Seeded random forest over term-frequency rows.

Bagged CART trees with Gini splits on raw counts. Each tree draws a
bootstrap sample and each split considers a random feature subset
(sqrt of the vocabulary size by default). All randomness flows from the
model seed through per-tree substreams, so training is reproducible and
trees could be grown in parallel without changing the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import NEGATIVE, POSITIVE, TfMatrix
from .errors import DimensionMismatch, SingleClass


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int = 12
    feature_subsample: float | str = "sqrt"  # fraction of features, or "sqrt"
    min_samples_split: int = 2
    seed: int = 0

    def mtry(self, n_features: int) -> int:
        if self.feature_subsample == "sqrt":
            return max(1, int(round(np.sqrt(n_features))))
        frac = float(self.feature_subsample)
        if not 0 < frac <= 1:
            raise ValueError("feature_subsample must be in (0, 1] or 'sqrt'")
        return max(1, int(round(frac * n_features)))


@dataclass
class TreeNode:
    """Internal node (feature/threshold) or leaf (class counts)."""

    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    counts: np.ndarray | None = None  # leaf: [negative, positive]

    @property
    def is_leaf(self):
        return self.counts is not None

    def positive_fraction(self, row: np.ndarray) -> float:
        node = self
        while not node.is_leaf:
            node = node.left if row[node.feature] <= node.threshold else node.right
        total = node.counts.sum()
        return float(node.counts[1] / total) if total else 0.5


def _gini_best_split(x, y, feature_ids):
    """Best (weighted-gini, feature, threshold) over candidate features.

    Returns None when no feature admits a variance-reducing split.
    Features are scanned in ascending id order so ties resolve
    deterministically to the smallest feature and threshold.
    """
    n = len(y)
    total_pos = int(y.sum())
    parent_gini = 1.0 - (total_pos / n) ** 2 - ((n - total_pos) / n) ** 2
    best = None
    for f in sorted(feature_ids):
        col = x[:, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        cum_pos = np.cumsum(y[order])
        cut = np.nonzero(xs[:-1] != xs[1:])[0]
        if len(cut) == 0:
            continue
        left_n = cut + 1.0
        right_n = n - left_n
        left_pos = cum_pos[cut]
        right_pos = total_pos - left_pos
        gini_l = 1.0 - (left_pos / left_n) ** 2 - ((left_n - left_pos) / left_n) ** 2
        gini_r = 1.0 - (right_pos / right_n) ** 2 - ((right_n - right_pos) / right_n) ** 2
        weighted = (left_n * gini_l + right_n * gini_r) / n
        i = int(np.argmin(weighted))
        score = float(weighted[i])
        if score >= parent_gini - 1e-12:
            continue
        threshold = float((xs[cut[i]] + xs[cut[i] + 1]) / 2.0)
        if best is None or score < best[0] - 1e-15:
            best = (score, f, threshold)
    return best


def _grow(x, y, depth, params, mtry, rng):
    node = TreeNode()
    n = len(y)
    pos = int(y.sum())
    if depth >= params.max_depth or n < params.min_samples_split or pos in (0, n):
        node.counts = np.array([n - pos, pos], dtype=np.int64)
        return node
    feature_ids = rng.choice(x.shape[1], size=min(mtry, x.shape[1]), replace=False)
    split = _gini_best_split(x, y, feature_ids)
    if split is None:
        node.counts = np.array([n - pos, pos], dtype=np.int64)
        return node
    _, node.feature, node.threshold = split
    mask = x[:, node.feature] <= node.threshold
    node.left = _grow(x[mask], y[mask], depth + 1, params, mtry, rng)
    node.right = _grow(x[~mask], y[~mask], depth + 1, params, mtry, rng)
    return node


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[TreeNode, ...]
    n_features: int
    params: ForestParams = field(default_factory=ForestParams)

    def score_row(self, row: np.ndarray) -> float:
        row = np.asarray(row)
        if row.shape != (self.n_features,):
            raise DimensionMismatch(
                f"row of length {row.shape} against vocabulary of {self.n_features}"
            )
        return float(np.mean([t.positive_fraction(row) for t in self.trees]))

    def score_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows)
        if rows.ndim != 2 or rows.shape[1] != self.n_features:
            raise DimensionMismatch(
                f"matrix of shape {rows.shape} against vocabulary of {self.n_features}"
            )
        return np.array([self.score_row(r) for r in rows])


def labels_to_binary(labels) -> np.ndarray:
    y = []
    for lab in labels:
        if lab == POSITIVE or lab is True or lab == 1:
            y.append(1)
        elif lab == NEGATIVE or lab is False or lab == 0:
            y.append(0)
        else:
            raise ValueError(f"label must be positive or negative, got {lab!r}")
    return np.array(y, dtype=np.int64)


def fit_forest_matrix(x: np.ndarray, y: np.ndarray, params: ForestParams) -> ForestModel:
    """Train on an explicit count matrix; rows align with y (1 = positive)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(set(y.tolist())) < 2:
        raise SingleClass("training labels are all one class")
    n, m = x.shape
    mtry = params.mtry(m)
    seeds = np.random.SeedSequence(params.seed).spawn(params.n_trees)
    trees = []
    for seq in seeds:
        rng = np.random.default_rng(seq)
        sample = rng.integers(0, n, size=n)
        trees.append(_grow(x[sample], y[sample], 0, params, mtry, rng))
    return ForestModel(trees=tuple(trees), n_features=m, params=params)


def train_forest(tf: TfMatrix, labels, params: ForestParams | None = None) -> ForestModel:
    """Train on TF rows labeled positive/negative (one label per row)."""
    params = params or ForestParams()
    if len(labels) != tf.shape[0]:
        raise DimensionMismatch(f"{len(labels)} labels for {tf.shape[0]} rows")
    return fit_forest_matrix(tf.rows, labels_to_binary(labels), params)


def score_article(model: ForestModel, row) -> float:
    """Forest posterior for one TF row: mean leaf positive fraction."""
    return model.score_row(np.asarray(row))
