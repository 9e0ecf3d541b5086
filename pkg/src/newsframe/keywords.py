"""Discriminative keyword extraction between two period corpora.

A term scores highly when the set of articles containing it is
concentrated in one period: score(x) = H(T) - (|S|/|T|) * H(S), where
H is class entropy in bits over the two period labels and S is the set
of articles in which x appears. Note the complement subset is
deliberately not subtracted; `full_gain=True` adds it back for
comparison against the textbook definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date

import numpy as np

from .corpus import Corpus, NGram, TfMatrix, build_tf_matrix, merge_corpora
from .errors import EmptyCorpus, IndexOutOfRange

PERIOD_1 = "period1"
PERIOD_2 = "period2"


def class_entropy(labels) -> float:
    """Shannon entropy in bits of the label distribution; 0 log 0 is 0."""
    labels = list(labels)
    if not labels:
        raise ValueError("entropy of an empty label list is undefined")
    n = len(labels)
    h = 0.0
    for value in set(labels):
        p = labels.count(value) / n
        if p > 0.0:
            h -= p * math.log2(p)
    return h


def _binary_entropy(p: np.ndarray) -> np.ndarray:
    """Vectorized two-class entropy in bits for positive-class fractions."""
    p = np.asarray(p, dtype=np.float64)
    out = np.zeros_like(p)
    for q in (p, 1.0 - p):
        mask = q > 0.0
        out[mask] -= q[mask] * np.log2(q[mask])
    return out


def information_gain(tf: TfMatrix, labels, ngram_index: int, full_gain: bool = False) -> float:
    """Entropy reduction from conditioning on presence of one n-gram.

    `labels` assigns each TF row to one of the two periods. Returns
    H(T) - (|S|/|T|) H(S); when the n-gram appears nowhere, H(T). With
    `full_gain` the complement term (|T\\S|/|T|) H(T\\S) is subtracted
    as well, giving textbook information gain.
    """
    labels = list(labels)
    n_docs, m = tf.shape
    if len(labels) != n_docs:
        raise ValueError(f"{len(labels)} labels for {n_docs} rows")
    if not 0 <= ngram_index < m:
        raise IndexOutOfRange(f"column {ngram_index} outside vocabulary of size {m}")
    h_t = class_entropy(labels)
    present = tf.rows[:, ngram_index] > 0
    subset = [lab for lab, keep in zip(labels, present) if keep]
    gain = h_t
    if subset:
        gain -= (len(subset) / n_docs) * class_entropy(subset)
    if full_gain:
        complement = [lab for lab, keep in zip(labels, present) if not keep]
        if complement:
            gain -= (len(complement) / n_docs) * class_entropy(complement)
    return gain


def _all_gains(tf: TfMatrix, is_period2: np.ndarray, full_gain: bool) -> np.ndarray:
    """Column-vectorized gains; matches information_gain per column."""
    n_docs = tf.shape[0]
    present = tf.rows > 0
    h_t = 0.0
    for q in (is_period2.mean(), 1.0 - is_period2.mean()):
        if q > 0.0:
            h_t -= q * math.log2(q)
    size_s = present.sum(axis=0).astype(np.float64)
    pos_s = (present & is_period2[:, None]).sum(axis=0).astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        frac_pos = np.where(size_s > 0, pos_s / np.maximum(size_s, 1.0), 0.0)
    h_s = _binary_entropy(frac_pos)
    gains = h_t - np.where(size_s > 0, size_s / n_docs, 0.0) * h_s
    if full_gain:
        size_c = n_docs - size_s
        pos_c = is_period2.sum() - pos_s
        frac_c = np.where(size_c > 0, pos_c / np.maximum(size_c, 1.0), 0.0)
        gains -= np.where(size_c > 0, size_c / n_docs, 0.0) * _binary_entropy(frac_c)
    return gains


@dataclass(frozen=True)
class KeywordSet:
    """Top discriminative n-grams for a period pair, best first."""

    keywords: tuple[tuple[NGram, float], ...]  # (ngram, gain in bits)
    period_pair: tuple[tuple[date, date] | None, tuple[date, date] | None]
    combined_vocab_size: int

    def __post_init__(self):
        scores = [s for _, s in self.keywords]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValueError("keyword scores must be non-increasing")
        grams = [g for g, _ in self.keywords]
        if len(set(grams)) != len(grams):
            raise ValueError("duplicate keywords")

    def ngrams(self) -> list[NGram]:
        return [g for g, _ in self.keywords]

    def __len__(self):
        return len(self.keywords)


def top_k_keywords(
    t1: Corpus,
    t2: Corpus,
    k: int = 6,
    orders=(1, 2),
    min_df: int = 2,
    full_gain: bool = False,
) -> KeywordSet:
    """Score every vocabulary n-gram of the combined corpus, keep the best k.

    Ties are broken lexicographically on the n-gram, which makes the
    result deterministic. If the vocabulary is smaller than k the whole
    vocabulary is returned.
    """
    if len(t1) == 0 or len(t2) == 0:
        raise EmptyCorpus("both period corpora must be nonempty")
    if k < 1:
        raise ValueError("k must be >= 1")
    combined = merge_corpora(t1, t2)
    tf = build_tf_matrix(combined, orders=orders, min_df=min_df)
    is_period2 = np.array([False] * len(t1) + [True] * len(t2))
    gains = _all_gains(tf, is_period2, full_gain)
    ranked = sorted(range(len(tf.vocab)), key=lambda j: (-gains[j], tf.vocab[j]))
    top = tuple((tf.vocab[j], float(gains[j])) for j in ranked[:k])
    return KeywordSet(
        keywords=top,
        period_pair=(t1.period, t2.period),
        combined_vocab_size=len(tf.vocab),
    )
