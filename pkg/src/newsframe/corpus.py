"""Document model, tokenization, n-gram extraction, and term-frequency matrices.

An n-gram is represented as a plain tuple of normalized token strings;
its order is the tuple length (1 or 2 in this pipeline). Articles and
corpora are immutable after construction, so everything here is safe to
share across threads.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import date
from importlib import resources

import numpy as np

from .errors import EmptyCorpus, EmptyVocabulary

NYT = "nyt"
GUARDIAN = "guardian"
OTHER = "other"
SOURCES = (NYT, GUARDIAN, OTHER)

POSITIVE = "positive"
NEGATIVE = "negative"
UNLABELED = "unlabeled"
LABELS = (POSITIVE, NEGATIVE, UNLABELED)

NGram = tuple  # tuple of 1..2 token strings

_SENTENCE_SPLIT = re.compile(r"[.!?]+")
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)
_POSSESSIVE = re.compile(r"(?<=\w)'s\b")
_CURLY_APOSTROPHES = str.maketrans({"\u2019": "'", "\u2018": "'"})


def _load_stopwords():
    text = resources.files("newsframe.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w for w in text.split() if w)


STOPWORDS = _load_stopwords()


def sentence_tokens(text: str, stopwords=STOPWORDS) -> list[list[str]]:
    """Tokenize `text` into one token list per sentence.

    Sentences are split on runs of ``.``, ``!``, ``?``. Within a sentence,
    text is Unicode-lowercased, possessive ``'s`` is stripped, and tokens
    are maximal alphanumeric runs (digits survive inside words, so
    "HTML5" becomes "html5"). Stopwords are removed. Sentences that end
    up empty are dropped.
    """
    if not text:
        return []
    normalized = _POSSESSIVE.sub("", text.translate(_CURLY_APOSTROPHES).lower())
    out = []
    for raw_sentence in _SENTENCE_SPLIT.split(normalized):
        tokens = [t for t in _TOKEN.findall(raw_sentence) if t not in stopwords]
        if tokens:
            out.append(tokens)
    return out


def tokenize(text: str, stopwords=STOPWORDS) -> list[str]:
    """Flat token list for `text` (all sentences concatenated)."""
    return [t for sentence in sentence_tokens(text, stopwords) for t in sentence]


def extract_ngrams(tokens: list[str], orders) -> list[NGram]:
    """All contiguous n-grams of each requested order, with multiplicity.

    `tokens` is treated as one contiguous sequence (a single sentence);
    callers that care about sentence boundaries extract per sentence.
    Output lists every order-1 n-gram in document order, then order-2,
    and so on.
    """
    orders = sorted(set(orders))
    if not orders or any(n < 1 for n in orders):
        raise ValueError("orders must be a nonempty set of positive integers")
    grams = []
    for n in orders:
        grams.extend(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))
    return grams


@dataclass(frozen=True)
class Article:
    """One dated, sourced news document."""

    id: str
    source: str
    title: str
    body: str
    published_at: date
    url: str | None = None
    topic: str | None = None
    label: str = UNLABELED

    def __post_init__(self):
        if not self.id:
            raise ValueError("article id must be nonempty")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}")
        if not isinstance(self.published_at, date):
            raise ValueError("published_at must be a datetime.date")
        if not self.body and not self.title:
            raise ValueError("article needs a nonempty title or body")

    def sentences(self) -> list[list[str]]:
        """Tokenized sentences of the analyzed text (title, then body)."""
        return sentence_tokens(self.title) + sentence_tokens(self.body)

    def tokens(self) -> list[str]:
        return [t for sent in self.sentences() for t in sent]

    def ngrams(self, orders) -> list[NGram]:
        """Per-sentence n-grams, so bigrams never span sentence breaks."""
        grams = []
        for n in sorted(set(orders)):
            for sent in self.sentences():
                grams.extend(tuple(sent[i:i + n]) for i in range(len(sent) - n + 1))
        return grams


@dataclass(frozen=True)
class Corpus:
    """An ordered, id-unique collection of articles with an inclusive period."""

    articles: tuple[Article, ...]
    period: tuple[date, date] | None = None

    def __post_init__(self):
        articles = tuple(self.articles)
        object.__setattr__(self, "articles", articles)
        ids = [a.id for a in articles]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate article ids: {dupes[:5]}")
        period = self.period
        if period is None and articles:
            dates = [a.published_at for a in articles]
            period = (min(dates), max(dates))
            object.__setattr__(self, "period", period)
        if period is not None:
            start, end = period
            if start > end:
                raise ValueError("period start is after its end")
            for a in articles:
                if not start <= a.published_at <= end:
                    raise ValueError(
                        f"article {a.id} dated {a.published_at} outside period {start}..{end}"
                    )

    def __len__(self):
        return len(self.articles)

    def __iter__(self):
        return iter(self.articles)

    def ids(self) -> list[str]:
        return [a.id for a in self.articles]

    def by_id(self, article_id: str) -> Article:
        for a in self.articles:
            if a.id == article_id:
                return a
        raise KeyError(article_id)

    def years(self) -> list[int]:
        """Contiguous calendar years from first to last publication."""
        if not self.articles:
            return []
        lo = min(a.published_at.year for a in self.articles)
        hi = max(a.published_at.year for a in self.articles)
        return list(range(lo, hi + 1))


def merge_corpora(*corpora: Corpus) -> Corpus:
    """Concatenate corpora into one; ids must stay unique."""
    articles = tuple(a for c in corpora for a in c)
    return Corpus(articles)


@dataclass(frozen=True)
class TfMatrix:
    """Per-article raw term frequencies over a shared n-gram vocabulary."""

    vocab: tuple[NGram, ...]
    rows: np.ndarray  # shape (len(article_ids), len(vocab)), dtype int64
    article_ids: tuple[str, ...]
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vocab", tuple(self.vocab))
        object.__setattr__(self, "article_ids", tuple(self.article_ids))
        rows = np.asarray(self.rows, dtype=np.int64)
        if rows.shape != (len(self.article_ids), len(self.vocab)):
            raise ValueError(
                f"rows shape {rows.shape} does not match "
                f"{len(self.article_ids)} articles x {len(self.vocab)} terms"
            )
        if (rows < 0).any():
            raise ValueError("term frequencies must be non-negative")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_index", {g: i for i, g in enumerate(self.vocab)})

    @property
    def shape(self):
        return self.rows.shape

    def column(self, ngram: NGram) -> int:
        return self._index[tuple(ngram)]

    def document_frequencies(self) -> np.ndarray:
        return (self.rows > 0).sum(axis=0)

    def term_frequencies(self) -> np.ndarray:
        """Corpus-wide counts (column sums)."""
        return self.rows.sum(axis=0)

    def row_for(self, article_id: str) -> np.ndarray:
        return self.rows[self.article_ids.index(article_id)]


def build_tf_matrix(corpus: Corpus, orders=(1, 2), min_df: int = 2) -> TfMatrix:
    """Count n-grams per article and keep those in at least `min_df` documents.

    The vocabulary is sorted lexicographically by token tuple, which makes
    the construction deterministic for identical inputs.
    """
    if len(corpus) == 0:
        raise EmptyCorpus("cannot build a TF matrix from an empty corpus")
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    doc_counts = [Counter(a.ngrams(orders)) for a in corpus]
    df = Counter()
    for counts in doc_counts:
        df.update(counts.keys())
    vocab = tuple(sorted(g for g, n in df.items() if n >= min_df))
    if not vocab:
        raise EmptyVocabulary(
            f"no n-gram reached document frequency {min_df} in {len(corpus)} articles"
        )
    index = {g: j for j, g in enumerate(vocab)}
    rows = np.zeros((len(corpus), len(vocab)), dtype=np.int64)
    for i, counts in enumerate(doc_counts):
        for gram, n in counts.items():
            j = index.get(gram)
            if j is not None:
                rows[i, j] = n
    return TfMatrix(vocab=vocab, rows=rows, article_ids=tuple(corpus.ids()))


def ngram_text(ngram: NGram) -> str:
    """Space-joined display/export form of an n-gram."""
    return " ".join(ngram)


def parse_ngram_text(text: str) -> NGram:
    return tuple(text.split())
