"""Annual news-cycle features: volume, mean sentiment, mean normalized
correlation.

Volume is the yearly article count. Sentiment is lexicon polarity
averaged over articles. MNC is the mean pairwise Pearson correlation
between the TF vectors of all article pairs published that year; highly
correlated, high-volume years mark event-driven publishing, while quiet
years show low volume and uncorrelated text.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from statistics import median

import numpy as np

from .corpus import Article, Corpus, TfMatrix, build_tf_matrix
from .errors import (
    EmptyCorpus,
    EmptyVocabulary,
    LengthMismatch,
    TooFewArticles,
    YearNotInSeries,
    ZeroVariance,
)

log = logging.getLogger(__name__)

QUIESCENT = "quiescent"
ACTIVE = "active"


@dataclass(frozen=True)
class Lexicon:
    positive: frozenset
    negative: frozenset

    def __post_init__(self):
        if not self.positive or not self.negative:
            raise ValueError("both polarity lists must be nonempty")
        overlap = self.positive & self.negative
        if overlap:
            raise ValueError(f"words in both lists: {sorted(overlap)[:5]}")


def _read_word_file(path) -> frozenset:
    words = frozenset(w.strip().lower() for w in Path(path).read_text("utf-8").split())
    return frozenset(w for w in words if w)


def load_lexicon(positive_path=None, negative_path=None) -> Lexicon:
    """Load polarity word lists; defaults to the bundled lists."""
    if positive_path is None:
        pos = frozenset(
            resources.files("newsframe.data").joinpath("positive.txt").read_text("utf-8").split()
        )
    else:
        pos = _read_word_file(positive_path)
    if negative_path is None:
        neg = frozenset(
            resources.files("newsframe.data").joinpath("negative.txt").read_text("utf-8").split()
        )
    else:
        neg = _read_word_file(negative_path)
    return Lexicon(positive=pos, negative=neg)


def article_polarity(a: Article, lex: Lexicon) -> float:
    """(positive - negative) / (positive + negative) over the article's
    tokens; 0 when no lexicon word occurs."""
    pos = neg = 0
    for token in a.tokens():
        if token in lex.positive:
            pos += 1
        elif token in lex.negative:
            neg += 1
    if pos + neg == 0:
        return 0.0
    return (pos - neg) / (pos + neg)


def pearson(u, v) -> float:
    """Product-moment correlation of two equal-length vectors."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise LengthMismatch(f"shapes {u.shape} and {v.shape}")
    if len(u) < 2:
        raise LengthMismatch("need vectors of length >= 2")
    du = u - u.mean()
    dv = v - v.mean()
    su = np.sqrt((du * du).sum())
    sv = np.sqrt((dv * dv).sum())
    if su == 0.0 or sv == 0.0:
        raise ZeroVariance("correlation undefined for a constant vector")
    return float(np.clip((du * dv).sum() / (su * sv), -1.0, 1.0))


def mnc(corpus: Corpus, tf: TfMatrix) -> float:
    """Mean pairwise Pearson correlation over all C(n,2) article pairs.

    Rows with zero variance (articles whose counts are constant across
    the vocabulary) cannot be correlated; they are dropped with a
    logged warning rather than failing the whole year.
    """
    n = len(corpus)
    if n < 2:
        raise TooFewArticles(f"pairwise correlation needs >= 2 articles, got {n}")
    rows = tf.rows.astype(np.float64)
    centered = rows - rows.mean(axis=1, keepdims=True)
    norms = np.sqrt((centered * centered).sum(axis=1))
    usable = norms > 0
    dropped = int((~usable).sum())
    if dropped:
        log.warning("mnc: dropped %d zero-variance TF rows of %d", dropped, n)
    if usable.sum() < 2:
        raise TooFewArticles("fewer than 2 articles with usable TF variance")
    z = centered[usable] / norms[usable, None]
    gram = z @ z.T
    iu = np.triu_indices(len(gram), k=1)
    return float(np.clip(gram[iu].mean(), -1.0, 1.0))


@dataclass(frozen=True)
class AnnualFeatureSeries:
    """Per-year feature values over a contiguous span of calendar years.

    mean_sentiment is None for empty years; mnc is None whenever fewer
    than two articles (or fewer than two usable TF rows) exist.
    """

    topic: str
    years: tuple[int, ...]
    volume: tuple[int, ...]
    mean_sentiment: tuple  # float | None per year
    mnc: tuple             # float | None per year
    legislative: tuple | None = None  # bool per year, optional ground truth

    def __post_init__(self):
        n = len(self.years)
        for name in ("volume", "mean_sentiment", "mnc"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length differs from years")
        if self.legislative is not None and len(self.legislative) != n:
            raise ValueError("legislative length differs from years")
        if any(b - a != 1 for a, b in zip(self.years, self.years[1:])):
            raise ValueError("years must be strictly increasing and contiguous")

    def index_of(self, year: int) -> int:
        if year not in self.years:
            raise YearNotInSeries(f"{year} not in {self.years[0]}..{self.years[-1]}")
        return self.years.index(year)

    def feature(self, name: str):
        return getattr(self, name)

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["year", "volume", "mean_sentiment", "mnc", "legislative"])
            for i, year in enumerate(self.years):
                sentiment = "" if self.mean_sentiment[i] is None else f"{self.mean_sentiment[i]:.10g}"
                corr = "" if self.mnc[i] is None else f"{self.mnc[i]:.10g}"
                leg = "" if self.legislative is None else int(self.legislative[i])
                w.writerow([year, self.volume[i], sentiment, corr, leg])

    @classmethod
    def read_csv(cls, path, topic=None):
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            years, volume, sentiment, corr, leg = [], [], [], [], []
            saw_label = False
            for row in reader:
                years.append(int(row["year"]))
                volume.append(int(row["volume"]))
                sentiment.append(float(row["mean_sentiment"]) if row["mean_sentiment"] else None)
                corr.append(float(row["mnc"]) if row["mnc"] else None)
                if row.get("legislative"):
                    saw_label = True
                    leg.append(bool(int(row["legislative"])))
                else:
                    leg.append(False)
        return cls(
            topic=topic if topic is not None else Path(path).stem,
            years=tuple(years),
            volume=tuple(volume),
            mean_sentiment=tuple(sentiment),
            mnc=tuple(corr),
            legislative=tuple(leg) if saw_label else None,
        )


def annual_features(
    corpus: Corpus,
    lex: Lexicon,
    legislative_labels: dict | None = None,
    topic: str = "",
    orders=(1,),
    min_df: int = 1,
    global_vocab: bool = False,
) -> AnnualFeatureSeries:
    """Bucket a corpus by publication year and compute the three features.

    The yearly TF matrix for MNC is built over that year's articles with
    its own vocabulary by default; `global_vocab` switches to one
    corpus-wide vocabulary sliced per year. Years inside the span with
    no articles appear with volume 0 and absent sentiment/correlation.
    """
    if len(corpus) == 0:
        raise EmptyCorpus("cannot compute features of an empty corpus")
    years = corpus.years()
    buckets = {y: [] for y in years}
    for a in corpus:
        buckets[a.published_at.year].append(a)

    shared_tf = None
    if global_vocab:
        shared_tf = build_tf_matrix(corpus, orders=orders, min_df=min_df)
        row_of = {aid: i for i, aid in enumerate(shared_tf.article_ids)}

    volume, sentiment, correlation, legis = [], [], [], []
    for year in years:
        articles = buckets[year]
        volume.append(len(articles))
        if not articles:
            sentiment.append(None)
            correlation.append(None)
        else:
            polarity = [article_polarity(a, lex) for a in articles]
            sentiment.append(float(np.mean(polarity)))
            if len(articles) < 2:
                correlation.append(None)
            else:
                year_corpus = Corpus(tuple(articles))
                try:
                    if shared_tf is not None:
                        rows = shared_tf.rows[[row_of[a.id] for a in articles]]
                        tf = TfMatrix(
                            vocab=shared_tf.vocab, rows=rows,
                            article_ids=tuple(a.id for a in articles),
                        )
                    else:
                        tf = build_tf_matrix(year_corpus, orders=orders, min_df=min_df)
                    correlation.append(mnc(year_corpus, tf))
                except (EmptyVocabulary, TooFewArticles):
                    log.warning("year %s: MNC unavailable, too little usable text", year)
                    correlation.append(None)
        if legislative_labels is not None:
            legis.append(bool(legislative_labels.get(year, False)))
    return AnnualFeatureSeries(
        topic=topic,
        years=tuple(years),
        volume=tuple(volume),
        mean_sentiment=tuple(sentiment),
        mnc=tuple(correlation),
        legislative=tuple(legis) if legislative_labels is not None else None,
    )


def classify_cycle_state(series: AnnualFeatureSeries, year: int) -> str:
    """Active iff the year is above the series median in both volume and
    MNC; quiescent otherwise (including years with no MNC)."""
    i = series.index_of(year)
    vol_median = median(series.volume)
    mnc_values = [x for x in series.mnc if x is not None]
    year_mnc = series.mnc[i]
    if not mnc_values or year_mnc is None:
        return QUIESCENT
    if series.volume[i] > vol_median and year_mnc > median(mnc_values):
        return ACTIVE
    return QUIESCENT


def quiescent_years(series: AnnualFeatureSeries) -> list[int]:
    """Years publishing at or below the series median volume.

    Years that tie the median only count as quiescent when some year
    exceeds the median; with a flat series no year is distinguishably
    quiet and the list is empty.
    """
    vol_median = median(series.volume)
    has_active = any(v > vol_median for v in series.volume)
    out = []
    for year, vol in zip(series.years, series.volume):
        if vol < vol_median or (vol == vol_median and has_active):
            out.append(year)
    return out
