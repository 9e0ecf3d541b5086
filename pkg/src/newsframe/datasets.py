"""Iterative topic-dataset construction.

Starting from a small hand-coded seed, a first forest scores the
universal set; the strongest predicted positives and the hardest
predicted negatives (capped at min(1000, k)) train a second forest,
whose positive predictions form the final topic dataset. Topic
negatives can also be mined from quiescent years of a feature series.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus, NEGATIVE, POSITIVE, TfMatrix, build_tf_matrix
from .errors import NoQuiescentYears, SingleClass
from .forest import ForestModel, ForestParams, fit_forest_matrix
from .newscycle import AnnualFeatureSeries, quiescent_years

HARD_NEGATIVE_CAP = 1000


@dataclass(frozen=True)
class BootstrapParams:
    forest: ForestParams = field(default_factory=ForestParams)
    orders: tuple = (1,)
    min_df: int = 1
    cap: int = HARD_NEGATIVE_CAP
    include_seeds: bool = False  # add seed rows to the stage-2 training set


@dataclass(frozen=True)
class TopicDataset:
    positives: Corpus
    negatives: Corpus
    provenance: dict

    def __post_init__(self):
        overlap = set(self.positives.ids()) & set(self.negatives.ids())
        if overlap:
            raise ValueError(f"articles in both classes: {sorted(overlap)[:5]}")

    def provenance_json(self) -> str:
        return json.dumps(self.provenance, indent=2, sort_keys=True)


def _scores_by_id(model: ForestModel, tf: TfMatrix) -> dict:
    scores = model.score_rows(tf.rows)
    return dict(zip(tf.article_ids, scores.tolist()))


def mine_hard_negatives(model: ForestModel, unlabeled: Corpus, tf: TfMatrix, m: int) -> Corpus:
    """The m predicted negatives scored closest below the 0.5 threshold.

    Ties break on article id; returns fewer than m when fewer predicted
    negatives exist.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    scores = _scores_by_id(model, tf)
    candidates = [(a, scores[a.id]) for a in unlabeled if scores[a.id] < 0.5]
    candidates.sort(key=lambda pair: (-pair[1], pair[0].id))
    chosen = [a for a, _ in candidates[:m]]
    return Corpus(tuple(chosen))


def _top_positives(corpus: Corpus, scores: dict, m: int) -> list:
    ranked = [(a, scores[a.id]) for a in corpus if scores[a.id] > 0.5]
    ranked.sort(key=lambda pair: (-pair[1], pair[0].id))
    return [a for a, _ in ranked[:m]]


def _train_on_ids(tf: TfMatrix, labels_by_id: dict, params: ForestParams) -> ForestModel:
    row_of = {aid: i for i, aid in enumerate(tf.article_ids)}
    ids = sorted(labels_by_id)
    missing = [i for i in ids if i not in row_of]
    if missing:
        raise KeyError(f"labeled articles not in the universal set: {missing[:5]}")
    x = tf.rows[[row_of[i] for i in ids]]
    y = [1 if labels_by_id[i] == POSITIVE else 0 for i in ids]
    if len(set(y)) < 2:
        raise SingleClass("seed labels contain only one class")
    return fit_forest_matrix(x, np.array(y), params)


def bootstrap_dataset(seed_labels: dict, universal: Corpus, params: BootstrapParams | None = None) -> TopicDataset:
    """Two-stage bootstrap from seed labels over the universal set.

    seed_labels maps article id (must exist in `universal`) to positive
    or negative. Stage counts are recorded in provenance: k is the
    stage-1 predicted-positive count and m = min(cap, k) bounds both the
    mined positives and the mined hard negatives.
    """
    params = params or BootstrapParams()
    for label in seed_labels.values():
        if label not in (POSITIVE, NEGATIVE):
            raise ValueError(f"seed labels must be positive/negative, got {label!r}")
    tf = build_tf_matrix(universal, orders=params.orders, min_df=params.min_df)

    stage1 = _train_on_ids(tf, seed_labels, params.forest)
    scores1 = _scores_by_id(stage1, tf)
    k = sum(1 for s in scores1.values() if s > 0.5)
    m = min(params.cap, k)

    mined_pos = _top_positives(universal, scores1, m)
    mined_neg = list(mine_hard_negatives(stage1, universal, tf, m)) if m >= 1 else []

    stage2_labels = {a.id: POSITIVE for a in mined_pos}
    stage2_labels.update({a.id: NEGATIVE for a in mined_neg})
    if params.include_seeds:
        stage2_labels.update(seed_labels)
    stage2 = _train_on_ids(tf, stage2_labels, params.forest)
    scores2 = _scores_by_id(stage2, tf)

    positive_ids = {a.id for a in universal if scores2[a.id] > 0.5}
    positives = Corpus(tuple(a for a in universal if a.id in positive_ids))
    negatives = Corpus(tuple(a for a in mined_neg if a.id not in positive_ids))
    provenance = {
        "seed_size": len(seed_labels),
        "stage1_positives": k,
        "m": m,
        "mined_positives": len(mined_pos),
        "mined_hard_negatives": len(mined_neg),
        "final_positives": len(positives),
        "final_negatives": len(negatives),
        "stage2_included_seeds": params.include_seeds,
    }
    return TopicDataset(positives=positives, negatives=negatives, provenance=provenance)


def stage_scores(seed_labels: dict, universal: Corpus, params: BootstrapParams | None = None):
    """Stage-1 and stage-2 scores per article id (for precision studies)."""
    params = params or BootstrapParams()
    tf = build_tf_matrix(universal, orders=params.orders, min_df=params.min_df)
    stage1 = _train_on_ids(tf, seed_labels, params.forest)
    scores1 = _scores_by_id(stage1, tf)
    k = sum(1 for s in scores1.values() if s > 0.5)
    m = min(params.cap, k)
    mined_pos = _top_positives(universal, scores1, m)
    mined_neg = list(mine_hard_negatives(stage1, universal, tf, m)) if m >= 1 else []
    stage2_labels = {a.id: POSITIVE for a in mined_pos}
    stage2_labels.update({a.id: NEGATIVE for a in mined_neg})
    if params.include_seeds:
        stage2_labels.update(seed_labels)
    stage2 = _train_on_ids(tf, stage2_labels, params.forest)
    return scores1, _scores_by_id(stage2, tf)


def quiescent_negatives(series: AnnualFeatureSeries, universal: Corpus, n: int, seed: int = 0) -> Corpus:
    """Sample up to n articles from the series' quiescent years.

    Raises NoQuiescentYears when every year publishes at the same
    level. Sampling is seeded and the result is ordered by (date, id)
    for reproducibility.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    years = set(quiescent_years(series))
    if not years:
        raise NoQuiescentYears("no year publishes below the rest")
    pool = sorted(
        (a for a in universal if a.published_at.year in years),
        key=lambda a: a.id,
    )
    rng = np.random.default_rng(seed)
    take = min(n, len(pool))
    chosen = [pool[i] for i in rng.choice(len(pool), size=take, replace=False)] if pool else []
    chosen.sort(key=lambda a: (a.published_at, a.id))
    return Corpus(tuple(chosen))


def read_seed_labels(path) -> dict:
    """Seed label CSV: columns article_id,label."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            label = row["label"].strip().lower()
            if label not in (POSITIVE, NEGATIVE):
                raise ValueError(f"seed label must be positive/negative, got {label!r}")
            out[row["article_id"].strip()] = label
    return out
