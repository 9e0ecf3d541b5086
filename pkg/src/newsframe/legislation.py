"""Predict annual legislative activity from news-cycle change patterns.

Each feature is reduced to the absolute normalized annual difference,
then consecutive difference pairs (x1, x2) populate a smoothed discrete
joint table per feature. A year's probability under the no-legislation
change model is the naive-Bayes product of per-feature conditionals
P_f(x2 | x1); improbable changes (product below the threshold t) are
predicted legislative. A class-conditional variant models legislative
and non-legislative years separately.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyRow, LengthMismatch, NoTrainingPairs, TooFewYears
from .metrics import ConfusionCounts, accuracy, confusion_from_labels, prf1
from .newscycle import AnnualFeatureSeries

FEATURES = ("volume", "mean_sentiment", "mnc")

ANOMALY = "anomaly"
CLASS_CONDITIONAL = "class_conditional"
PREDICTOR_MODES = (ANOMALY, CLASS_CONDITIONAL)

LEGISLATIVE = "legislative"
NOT_LEGISLATIVE = "not_legislative"


@dataclass(frozen=True)
class FeatureDiffSeries:
    """Absolute normalized annual feature differences for one topic.

    Entry i describes the change into years[i] from the year before.
    Values are scaled per feature so the largest change is 1 (all zero
    when the feature never moves). `missing` counts the year gaps where
    a feature was undefined and its difference was recorded as 0.
    """

    topic: str
    years: tuple[int, ...]
    diffs: dict  # feature name -> tuple of floats in [0, 1]
    legislative: tuple[bool, ...]
    missing: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.years)
        if len(self.legislative) != n:
            raise ValueError("legislative length differs from years")
        for name, values in self.diffs.items():
            if len(values) != n:
                raise ValueError(f"{name} diffs length differs from years")
            arr = np.asarray(values, dtype=np.float64)
            if ((arr < 0) | (arr > 1)).any():
                raise ValueError(f"{name} diffs must lie in [0, 1]")

    @property
    def features(self):
        return tuple(self.diffs.keys())


def normalized_annual_diffs(series: AnnualFeatureSeries, features=FEATURES) -> FeatureDiffSeries:
    """Absolute year-over-year changes, max-normalized per feature.

    A difference touching a year where the feature is undefined (for
    example MNC in a sub-two-article year) is recorded as 0 and counted
    in `missing`.
    """
    if len(series.years) < 2:
        raise TooFewYears(f"need >= 2 years, got {len(series.years)}")
    diffs = {}
    missing = {}
    for name in features:
        values = series.feature(name)
        raw = []
        absent = 0
        for prev, cur in zip(values, values[1:]):
            if prev is None or cur is None:
                raw.append(0.0)
                absent += 1
            else:
                raw.append(abs(float(cur) - float(prev)))
        top = max(raw)
        if top > 0:
            raw = [d / top for d in raw]
        diffs[name] = tuple(raw)
        missing[name] = absent
    legislative = (
        tuple(series.legislative[1:]) if series.legislative is not None
        else tuple([False] * (len(series.years) - 1))
    )
    return FeatureDiffSeries(
        topic=series.topic,
        years=tuple(series.years[1:]),
        diffs=diffs,
        legislative=legislative,
        missing=missing,
    )


def normalized_annual_values(series: AnnualFeatureSeries, features=FEATURES) -> FeatureDiffSeries:
    """Raw-value alternative to differencing: per-feature max-normalized
    yearly values (years after the first, aligned with the diff series).

    Undefined values are recorded as 0 and counted in `missing`.
    """
    if len(series.years) < 2:
        raise TooFewYears(f"need >= 2 years, got {len(series.years)}")
    values_by_feature = {}
    missing = {}
    for name in features:
        raw = []
        absent = 0
        for value in series.feature(name)[1:]:
            if value is None:
                raw.append(0.0)
                absent += 1
            else:
                raw.append(abs(float(value)))
        top = max(raw)
        if top > 0:
            raw = [v / top for v in raw]
        values_by_feature[name] = tuple(raw)
        missing[name] = absent
    legislative = (
        tuple(series.legislative[1:]) if series.legislative is not None
        else tuple([False] * (len(series.years) - 1))
    )
    return FeatureDiffSeries(
        topic=series.topic,
        years=tuple(series.years[1:]),
        diffs=values_by_feature,
        legislative=legislative,
        missing=missing,
    )


def bin_edges(bins: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, bins + 1)


def bin_of(value: float, bins: int) -> int:
    """Equal-width bin over [0,1]; the last bin is closed above."""
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"diff value {value} outside [0, 1]")
    return min(int(value * bins), bins - 1)


def consecutive_pairs(fds: FeatureDiffSeries):
    """Yield (year, {feature: (x1, x2)}, legislative) for each pair of
    consecutive difference observations; the label is the later year's."""
    for i in range(1, len(fds.years)):
        pair = {f: (fds.diffs[f][i - 1], fds.diffs[f][i]) for f in fds.features}
        yield fds.years[i], pair, fds.legislative[i]


@dataclass(frozen=True)
class LegislationModel:
    """Smoothed per-feature joint change tables and the decision threshold."""

    features: tuple[str, ...]
    bins: int
    alpha: float
    mode: str
    t: float
    joint: dict                    # feature -> (B, B) array (no-legislation pairs in anomaly mode)
    class_joint: dict | None = None  # feature -> {True: table, False: table}
    class_priors: dict | None = None  # {True: p, False: p}

    @property
    def edges(self) -> np.ndarray:
        return bin_edges(self.bins)

    def to_dict(self) -> dict:
        out = {
            "features": list(self.features),
            "bins": self.bins,
            "alpha": self.alpha,
            "mode": self.mode,
            "t": self.t,
            "joint": {f: self.joint[f].tolist() for f in self.features},
        }
        if self.class_joint is not None:
            out["class_joint"] = {
                f: {str(k): v.tolist() for k, v in self.class_joint[f].items()}
                for f in self.features
            }
            out["class_priors"] = {str(k): v for k, v in self.class_priors.items()}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "LegislationModel":
        class_joint = None
        class_priors = None
        if "class_joint" in data:
            class_joint = {
                f: {k == "True": np.asarray(v, dtype=np.float64) for k, v in tables.items()}
                for f, tables in data["class_joint"].items()
            }
            class_priors = {k == "True": v for k, v in data["class_priors"].items()}
        return cls(
            features=tuple(data["features"]),
            bins=int(data["bins"]),
            alpha=float(data["alpha"]),
            mode=data["mode"],
            t=float(data["t"]),
            joint={f: np.asarray(v, dtype=np.float64) for f, v in data["joint"].items()},
            class_joint=class_joint,
            class_priors=class_priors,
        )


def fit_model(
    data,
    bins: int = 5,
    alpha: float = 1.0,
    mode: str = ANOMALY,
    t: float = 0.05,
) -> LegislationModel:
    """Accumulate consecutive (x1, x2) difference pairs into joint tables.

    Anomaly mode keeps only pairs whose predicted (later) year had no
    legislation, modeling the quiet-cycle change pattern. The
    class-conditional variant keeps one table per label. Laplace alpha
    is added to every cell after accumulation.
    """
    if not data:
        raise NoTrainingPairs("no training series given")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if mode not in PREDICTOR_MODES:
        raise ValueError(f"unknown predictor mode {mode!r}")
    features = data[0].features
    for fds in data:
        if fds.features != features:
            raise ValueError(f"feature mismatch in topic {fds.topic}")

    joint = {f: np.zeros((bins, bins)) for f in features}
    by_class = {
        True: {f: np.zeros((bins, bins)) for f in features},
        False: {f: np.zeros((bins, bins)) for f in features},
    }
    class_counts = {True: 0, False: 0}
    kept = 0
    for fds in data:
        for _, pair, legislative in consecutive_pairs(fds):
            class_counts[legislative] += 1
            for f in features:
                x1, x2 = pair[f]
                cell = (bin_of(x1, bins), bin_of(x2, bins))
                by_class[legislative][f][cell] += 1
                if not legislative:
                    joint[f][cell] += 1
            kept += not legislative
    if mode == ANOMALY and kept == 0:
        raise NoTrainingPairs("no non-legislative pairs to model")
    if mode == CLASS_CONDITIONAL and sum(class_counts.values()) == 0:
        raise NoTrainingPairs("no pairs to model")

    for f in features:
        joint[f] += alpha
        by_class[True][f] += alpha
        by_class[False][f] += alpha
    total = sum(class_counts.values())
    priors = (
        {c: class_counts[c] / total for c in class_counts} if total else {True: 0.5, False: 0.5}
    )
    class_joint = {f: {c: by_class[c][f] for c in (True, False)} for f in features}
    return LegislationModel(
        features=tuple(features),
        bins=bins,
        alpha=alpha,
        mode=mode,
        t=t,
        joint=joint,
        class_joint=class_joint if mode == CLASS_CONDITIONAL else None,
        class_priors=priors if mode == CLASS_CONDITIONAL else None,
    )


def conditional(model: LegislationModel, feature: str, x1_bin: int, x2_bin: int,
                table=None) -> float:
    """P_f(x2 | x1) from the smoothed joint via the Bayes-style ratio.

    The joint table is normalized to a distribution q; the conditional
    is q(x1, x2) / sum_x2' q(x1, x2'), in which the table normalizer
    cancels, so this equals direct row normalization of the counts.
    """
    tbl = model.joint[feature] if table is None else table
    bins = model.bins
    if not (0 <= x1_bin < bins and 0 <= x2_bin < bins):
        raise ValueError(f"bin out of range for B={bins}")
    q = tbl / tbl.sum() if tbl.sum() > 0 else tbl
    row_mass = q[x1_bin].sum()
    if row_mass <= 0:
        raise EmptyRow(f"joint row {x1_bin} of feature {feature!r} has zero mass")
    return float(q[x1_bin, x2_bin] / row_mass)


def row_conditional(table: np.ndarray, x1_bin: int, x2_bin: int) -> float:
    """Direct row normalization of a joint table (reference form)."""
    row = table[x1_bin]
    if row.sum() <= 0:
        raise EmptyRow(f"joint row {x1_bin} has zero mass")
    return float(row[x2_bin] / row.sum())


def posterior(model: LegislationModel, year_diffs: dict, table_for=None) -> float:
    """Naive-Bayes product over features of P_f(x2 | x1), in log space.

    `year_diffs` maps feature name to its (x1, x2) normalized diff pair.
    """
    log_p = 0.0
    for f in model.features:
        x1, x2 = year_diffs[f]
        tbl = None if table_for is None else table_for(f)
        p = conditional(model, f, bin_of(x1, model.bins), bin_of(x2, model.bins), table=tbl)
        if p <= 0:
            return 0.0
        log_p += math.log(p)
    return math.exp(log_p)


def predict(model: LegislationModel, year_diffs: dict) -> str:
    """Anomaly mode: legislative iff the change is improbable under the
    no-legislation model (posterior < t). Class-conditional mode:
    legislative iff its class posterior wins."""
    if model.mode == ANOMALY:
        return LEGISLATIVE if posterior(model, year_diffs) < model.t else NOT_LEGISLATIVE
    scores = {}
    for cls in (True, False):
        like = posterior(model, year_diffs, table_for=lambda f: model.class_joint[f][cls])
        prior = model.class_priors[cls]
        scores[cls] = prior * like
    total = scores[True] + scores[False]
    if total == 0:
        return NOT_LEGISLATIVE
    return LEGISLATIVE if scores[True] / total > 0.5 else NOT_LEGISLATIVE


def predict_series(model: LegislationModel, fds: FeatureDiffSeries):
    """Predict each year of a topic that has a consecutive diff pair.

    Returns a list of (year, posterior, predicted_label, actual) tuples;
    the posterior reported is always the no-legislation-model product in
    anomaly mode and the legislative class probability otherwise.
    """
    out = []
    for year, pair, actual in consecutive_pairs(fds):
        label = predict(model, pair)
        if model.mode == ANOMALY:
            prob = posterior(model, pair)
        else:
            num = model.class_priors[True] * posterior(
                model, pair, table_for=lambda f: model.class_joint[f][True]
            )
            den = num + model.class_priors[False] * posterior(
                model, pair, table_for=lambda f: model.class_joint[f][False]
            )
            prob = num / den if den > 0 else 0.0
        out.append((year, prob, label, actual))
    return out


def loo_evaluate(
    data,
    bins: int = 5,
    alpha: float = 1.0,
    mode: str = ANOMALY,
    t: float = 0.05,
) -> dict:
    """Leave-one-topic-out evaluation.

    For each topic, fit on every other topic and predict all of its
    predictable years. Returns per-topic precision/recall/F1/accuracy
    and micro-averaged overall metrics (counts pooled across topics).
    """
    data = list(data)
    if len(data) < 2:
        raise LengthMismatch(f"leave-one-out needs >= 2 topics, got {len(data)}")
    per_topic = {}
    pooled = ConfusionCounts()
    for i, held_out in enumerate(data):
        model = fit_model(
            [fds for k, fds in enumerate(data) if k != i],
            bins=bins, alpha=alpha, mode=mode, t=t,
        )
        rows = predict_series(model, held_out)
        predicted = [label == LEGISLATIVE for _, _, label, _ in rows]
        actual = [bool(a) for _, _, _, a in rows]
        counts = confusion_from_labels(predicted, actual)
        precision, recall, f1 = prf1(counts)
        per_topic[held_out.topic] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "accuracy": accuracy(counts),
            "years": len(rows),
            "tp": counts.tp, "fp": counts.fp, "fn": counts.fn, "tn": counts.tn,
        }
        pooled = pooled + counts
    precision, recall, f1 = prf1(pooled)
    return {
        "topics": per_topic,
        "overall": {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "accuracy": accuracy(pooled),
            "tp": pooled.tp, "fp": pooled.fp, "fn": pooled.fn, "tn": pooled.tn,
        },
    }
