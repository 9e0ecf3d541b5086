"""Turn keyword distances into a framing-change decision.

A period pair is scored either by the mean pairwise keyword similarity
(significant when the score is at or above the threshold: changed-frame
keywords cluster together, so high similarity marks a change) or by the
median pairwise distance (significant when at or below). The threshold
is a fixed value by default; it can also be calibrated from a pool of
scores across topics, either as the pool median or by fitting a
two-component Gaussian mixture and taking the equal-responsibility
boundary between the component means.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from statistics import median

import numpy as np

from .corpus import Corpus, ngram_text
from .errors import DegenerateScores, EmptyReport, NoConvergence
from .keywords import KeywordSet, top_k_keywords
from .semantics import (
    EmbeddingSpace,
    KeywordDistanceReport,
    build_cooccurrence,
    embed,
    pairwise_report,
    project_2d,
)
from .corpus import merge_corpora

MEAN_SIMILARITY = "mean_similarity"
MEDIAN_DISTANCE = "median_distance"
SCORE_MODES = (MEAN_SIMILARITY, MEDIAN_DISTANCE)

FIXED = "fixed"
MEDIAN = "median"
EM = "em"
THRESHOLD_MODES = (FIXED, MEDIAN, EM)

SIGNIFICANT = "significant"
NOT_SIGNIFICANT = "not_significant"

_EM_MAX_ITER = 200
_EM_TOL = 1e-10
_EM_VAR_FLOOR = 1e-6
_EM_RESTARTS = 3


def framing_score(report: KeywordDistanceReport, mode: str = MEAN_SIMILARITY) -> float:
    if not report.pairs:
        raise EmptyReport("cannot score a report with no keyword pairs")
    if mode == MEAN_SIMILARITY:
        return report.mean_similarity
    if mode == MEDIAN_DISTANCE:
        return report.median_wmd
    raise ValueError(f"unknown score mode {mode!r}")


def _log_likelihood(x, weights, means, sigmas):
    dens = np.zeros_like(x)
    for w, mu, sd in zip(weights, means, sigmas):
        dens += w * np.exp(-0.5 * ((x - mu) / sd) ** 2) / (sd * math.sqrt(2 * math.pi))
    return float(np.log(dens).sum())


def _em_fit(x, means):
    """Run EM from the given initial means; returns (weights, means, sigmas,
    loglik, converged)."""
    assign = np.abs(x[:, None] - np.asarray(means)[None, :]).argmin(axis=1)
    weights = np.zeros(2)
    mu = np.zeros(2)
    var = np.zeros(2)
    for c in (0, 1):
        grp = x[assign == c]
        if len(grp) == 0:
            grp = x
        weights[c] = max(len(x[assign == c]), 1) / len(x)
        mu[c] = grp.mean()
        var[c] = max(grp.var(), _EM_VAR_FLOOR)
    weights /= weights.sum()

    prev = _log_likelihood(x, weights, mu, np.sqrt(var))
    for _ in range(_EM_MAX_ITER):
        # E step: responsibilities
        log_resp = np.stack([
            np.log(weights[c])
            - 0.5 * math.log(2 * math.pi * var[c])
            - 0.5 * (x - mu[c]) ** 2 / var[c]
            for c in (0, 1)
        ])
        log_resp -= log_resp.max(axis=0, keepdims=True)
        resp = np.exp(log_resp)
        resp /= resp.sum(axis=0, keepdims=True)
        # M step
        mass = resp.sum(axis=1)
        if (mass <= 0).any():
            return weights, mu, np.sqrt(var), prev, False
        weights = mass / len(x)
        mu = (resp * x).sum(axis=1) / mass
        var = (resp * (x - mu[:, None]) ** 2).sum(axis=1) / mass
        var = np.maximum(var, _EM_VAR_FLOOR)
        cur = _log_likelihood(x, weights, mu, np.sqrt(var))
        if not math.isfinite(cur):
            return weights, mu, np.sqrt(var), prev, False
        if abs(cur - prev) < _EM_TOL:
            return weights, mu, np.sqrt(var), cur, True
        prev = cur
    return weights, mu, np.sqrt(var), prev, False


def fit_two_gaussians(scores, seed: int = 0):
    """Fit a two-component 1D Gaussian mixture by EM.

    Initial centers are the sample min and max (a k-means style split);
    if that run fails its likelihood tolerance, a few seeded random
    restarts are attempted before giving up. Returns (weights, means,
    sigmas) with means sorted ascending.
    """
    x = np.asarray(sorted(scores), dtype=np.float64)
    if len(x) < 4:
        raise ValueError(f"need at least 4 scores to fit a mixture, got {len(x)}")
    if x.max() == x.min():
        raise DegenerateScores("all scores equal; no boundary exists")

    attempts = [(x.min(), x.max())]
    rng = np.random.default_rng(seed)
    for _ in range(_EM_RESTARTS):
        pair = rng.choice(x, size=2, replace=False)
        attempts.append((pair.min(), pair.max()))

    for init in attempts:
        weights, mu, sigmas, _, ok = _em_fit(x, init)
        if ok and abs(mu[0] - mu[1]) > 0:
            order = np.argsort(mu)
            return weights[order], mu[order], sigmas[order]
    raise NoConvergence(
        f"mixture fit did not reach {_EM_TOL} within {_EM_MAX_ITER} iterations"
    )


def em_threshold(scores, seed: int = 0) -> float:
    """Boundary between the two fitted component means.

    Solves w1 N(x|m1,s1) = w2 N(x|m2,s2) for x and returns the root that
    lies strictly between the means; if the quadratic has no root there
    (wildly unequal variances), the midpoint of the means is used.
    """
    weights, mu, sigmas = fit_two_gaussians(scores, seed)
    lo, hi = float(mu[0]), float(mu[1])
    v1, v2 = sigmas[0] ** 2, sigmas[1] ** 2
    # quadratic a x^2 + b x + c = 0 from equal weighted log densities
    a = 0.5 / v2 - 0.5 / v1
    b = mu[0] / v1 - mu[1] / v2
    c = (
        0.5 * mu[1] ** 2 / v2
        - 0.5 * mu[0] ** 2 / v1
        + math.log(weights[0] / weights[1])
        + 0.5 * math.log(v2 / v1)
    )
    roots = []
    if abs(a) < 1e-18:
        if abs(b) > 0:
            roots = [-c / b]
    else:
        disc = b * b - 4 * a * c
        if disc >= 0:
            sq = math.sqrt(disc)
            roots = [(-b - sq) / (2 * a), (-b + sq) / (2 * a)]
    inside = [r for r in roots if lo < r < hi]
    if inside:
        return float(min(inside, key=lambda r: abs(r - (lo + hi) / 2)))
    return (lo + hi) / 2.0


def classify_change(score: float, threshold: float, mode: str = MEAN_SIMILARITY) -> str:
    """Boundary equality counts as significant in both modes."""
    if mode == MEAN_SIMILARITY:
        return SIGNIFICANT if score >= threshold else NOT_SIGNIFICANT
    if mode == MEDIAN_DISTANCE:
        return SIGNIFICANT if score <= threshold else NOT_SIGNIFICANT
    raise ValueError(f"unknown score mode {mode!r}")


def resolve_threshold(config, seed_for_em: int = 0) -> float:
    """Pick the decision threshold for a config.

    Fixed mode uses config.threshold. Median and EM modes calibrate from
    config.calibration_scores, a pool of framing scores gathered across
    topics.
    """
    if config.threshold_mode == FIXED:
        return config.threshold
    pool = getattr(config, "calibration_scores", None)
    if not pool:
        raise ValueError(
            f"threshold mode {config.threshold_mode!r} needs calibration_scores"
        )
    if config.threshold_mode == MEDIAN:
        return float(median(pool))
    if config.threshold_mode == EM:
        return em_threshold(pool, seed=seed_for_em)
    raise ValueError(f"unknown threshold mode {config.threshold_mode!r}")


@dataclass(frozen=True)
class FramingReport:
    """Outcome of one framing-change detection run."""

    topic: str
    period_pair: tuple
    keyword_set: KeywordSet
    distance_report: KeywordDistanceReport
    score: float
    score_mode: str
    threshold: float
    threshold_mode: str
    decision: str
    config: dict

    def to_dict(self) -> dict:
        return {
            "topic": self.topic,
            "period_pair": [
                [str(d) for d in p] if p else None for p in self.period_pair
            ],
            "keywords": [
                {"ngram": ngram_text(g), "ig_bits": s}
                for g, s in self.keyword_set.keywords
            ],
            "combined_vocab_size": self.keyword_set.combined_vocab_size,
            "pairs": [
                {"a": ngram_text(a), "b": ngram_text(b), "wmd": d, "similarity": s}
                for a, b, d, s in self.distance_report.pairs
            ],
            "mean_similarity": self.distance_report.mean_similarity,
            "median_wmd": self.distance_report.median_wmd,
            "score": self.score,
            "score_mode": self.score_mode,
            "threshold": self.threshold,
            "threshold_mode": self.threshold_mode,
            "decision": self.decision,
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary_line(self) -> str:
        return (
            f"topic={self.topic} score={self.score:.6f} "
            f"threshold={self.threshold:.6f} decision={self.decision}"
        )


def _keywords_and_space(t1: Corpus, t2: Corpus, config) -> tuple[KeywordSet, EmbeddingSpace]:
    ks = top_k_keywords(
        t1, t2, k=config.k, orders=config.orders, min_df=config.min_df,
        full_gain=config.full_gain,
    )
    cooc = build_cooccurrence(merge_corpora(t1, t2), window=config.window)
    space = embed(cooc, j=config.j, weighting=config.weighting)
    return ks, space


def detect_framing_change(t1: Corpus, t2: Corpus, config, topic: str = "") -> FramingReport:
    """End-to-end detection for one topic and period pair.

    Pipeline: discriminative keywords on the combined corpus, a
    co-occurrence embedding of the same corpus, pairwise keyword
    distances, then score and threshold. Deterministic for identical
    inputs and config.
    """
    report, _ = detect_with_coordinates(t1, t2, config, topic)
    return report


def detect_with_coordinates(t1: Corpus, t2: Corpus, config, topic: str = ""):
    """Like detect_framing_change, plus keyword 2D coordinates for export."""
    ks, space = _keywords_and_space(t1, t2, config)
    report = pairwise_report(ks, space)
    score = framing_score(report, config.score_mode)
    threshold = resolve_threshold(config, seed_for_em=config.seed)
    decision = classify_change(score, threshold, config.score_mode)
    framing_report = FramingReport(
        topic=topic,
        period_pair=ks.period_pair,
        keyword_set=ks,
        distance_report=report,
        score=score,
        score_mode=config.score_mode,
        threshold=threshold,
        threshold_mode=config.threshold_mode,
        decision=decision,
        config=config.to_dict(),
    )
    return framing_report, project_2d(space, ks.ngrams())
