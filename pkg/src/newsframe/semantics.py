"""Co-occurrence embedding space and keyword distances.

The vector space is built LSA-style: symmetric windowed co-occurrence
counts over unigrams, an optional positive PMI reweighting, then a
truncated factorization of the (symmetric) matrix via block subspace
iteration with Rayleigh-Ritz extraction. Word Mover's Distance between
keywords is solved exactly: keyword token sets are tiny, so equal-size
problems reduce to an assignment and unequal sizes are expanded to the
least common multiple of the two set sizes, which is exact for uniform
token masses.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from statistics import median

import numpy as np
from scipy.optimize import linear_sum_assignment

from .corpus import Corpus, NGram
from .errors import (
    ConvergenceFailure,
    EmptyReport,
    EmptyVocabulary,
    NegativeDistance,
    OutOfVocabulary,
)
from .keywords import KeywordSet

_SVD_TOL = 1e-10
_SVD_MAX_ITER = 5000
_SVD_OVERSAMPLE = 6
_SVD_INIT_SEED = 20170301  # fixed: embeddings must not depend on caller seeds


@dataclass(frozen=True)
class CooccurrenceMatrix:
    """Symmetric windowed co-occurrence counts over a unigram vocabulary."""

    vocab: tuple[str, ...]
    counts: np.ndarray  # (V, V) int64, symmetric, zero diagonal
    window: int

    def __post_init__(self):
        object.__setattr__(self, "vocab", tuple(self.vocab))
        counts = np.asarray(self.counts, dtype=np.int64)
        v = len(self.vocab)
        if counts.shape != (v, v):
            raise ValueError(f"counts shape {counts.shape} for vocabulary of {v}")
        if (counts != counts.T).any():
            raise ValueError("co-occurrence counts must be symmetric")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        if self.window < 1:
            raise ValueError("window must be >= 1")


def build_cooccurrence(corpus: Corpus, window: int = 5) -> CooccurrenceMatrix:
    """Count token pairs at distance <= window within each sentence.

    Both symmetric cells are incremented per pair occurrence; pairs of a
    token with itself are skipped, so the diagonal stays zero.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    sentences = [sent for a in corpus for sent in a.sentences()]
    vocab = tuple(sorted({t for sent in sentences for t in sent}))
    if not vocab:
        raise EmptyVocabulary("corpus has no tokens to co-occur")
    index = {t: i for i, t in enumerate(vocab)}
    counts = np.zeros((len(vocab), len(vocab)), dtype=np.int64)
    for sent in sentences:
        idx = np.fromiter((index[t] for t in sent), dtype=np.int64, count=len(sent))
        for d in range(1, min(window, len(idx) - 1) + 1):
            left = idx[:-d]
            right = idx[d:]
            keep = left != right
            if keep.any():
                np.add.at(counts, (left[keep], right[keep]), 1)
                np.add.at(counts, (right[keep], left[keep]), 1)
    return CooccurrenceMatrix(vocab=vocab, counts=counts, window=window)


def ppmi(counts: np.ndarray) -> np.ndarray:
    """Positive pointwise mutual information of a count table."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total == 0:
        return np.zeros_like(counts)
    row = counts.sum(axis=1, keepdims=True)
    col = counts.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        pmi = np.log(counts * total / (row * col))
    pmi[~np.isfinite(pmi)] = 0.0
    np.maximum(pmi, 0.0, out=pmi)
    return pmi


@dataclass(frozen=True)
class EmbeddingSpace:
    """Terms mapped to a low-rank spectral space.

    `vectors` holds the singular-vector columns scaled by their singular
    values; `basis` keeps the unscaled orthonormal columns and
    `eigenvalues` the signed spectral values of the (symmetric) input,
    which allow exact low-rank reconstruction.
    """

    vocab: tuple[str, ...]
    vectors: np.ndarray        # (V, j)
    j: int
    singular_values: np.ndarray  # (j,) non-increasing
    basis: np.ndarray = field(repr=False, default=None)        # (V, j) orthonormal
    eigenvalues: np.ndarray = field(repr=False, default=None)  # (j,) signed

    def __post_init__(self):
        object.__setattr__(self, "vocab", tuple(self.vocab))
        vectors = np.asarray(self.vectors, dtype=np.float64)
        sv = np.asarray(self.singular_values, dtype=np.float64)
        if self.j < 1 or vectors.shape != (len(self.vocab), self.j):
            raise ValueError("vectors must be V x j with j >= 1")
        if not np.isfinite(vectors).all():
            raise ValueError("vectors must be finite")
        if any(a < b - 1e-12 for a, b in zip(sv, sv[1:])) or (sv < 0).any():
            raise ValueError("singular values must be non-negative and non-increasing")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "singular_values", sv)
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.vocab)})

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def token_vector(self, token: str) -> np.ndarray:
        try:
            return self.vectors[self._index[token]]
        except KeyError:
            raise OutOfVocabulary(token) from None

    def ngram_vectors(self, ngram: NGram) -> np.ndarray:
        return np.stack([self.token_vector(t) for t in ngram])


def _ritz_pairs(a: np.ndarray, q: np.ndarray):
    """Rayleigh-Ritz values/vectors of symmetric `a` on the span of `q`."""
    b = q.T @ (a @ q)
    b = (b + b.T) / 2.0
    theta, w = np.linalg.eigh(b)
    order = np.argsort(-np.abs(theta), kind="stable")
    return theta[order], q @ w[:, order]


def embed(cooc: CooccurrenceMatrix, j: int = 3, weighting: str = "ppmi") -> EmbeddingSpace:
    """Truncated spectral embedding of the co-occurrence space.

    Runs block subspace iteration (with oversampling) on the symmetric
    weighted matrix until the leading j Ritz pairs have residuals below
    1e-10 relative to the spectral scale. Vectors are the leading
    singular-vector columns scaled by their singular values; each
    column's sign is fixed by making its largest-magnitude entry
    positive.

    Raises ConvergenceFailure if the iteration budget is exhausted.
    """
    v = len(cooc.vocab)
    if not 1 <= j <= v:
        raise ValueError(f"j must be in 1..{v}, got {j}")
    if weighting not in ("raw", "ppmi"):
        raise ValueError(f"unknown weighting {weighting!r}")
    a = cooc.counts.astype(np.float64)
    if weighting == "ppmi":
        a = ppmi(a)

    norm = np.linalg.norm(a)
    if norm == 0.0:
        basis = np.eye(v, j)
        zeros = np.zeros(j)
        return EmbeddingSpace(
            vocab=cooc.vocab, vectors=np.zeros((v, j)), j=j,
            singular_values=zeros, basis=basis, eigenvalues=zeros,
        )

    block = min(v, j + _SVD_OVERSAMPLE)
    rng = np.random.default_rng(_SVD_INIT_SEED)
    q, _ = np.linalg.qr(rng.standard_normal((v, block)))
    theta = ritz = None
    for _ in range(_SVD_MAX_ITER):
        theta, ritz = _ritz_pairs(a, q)
        lead_vals = theta[:j]
        lead_vecs = ritz[:, :j]
        residual = a @ lead_vecs - lead_vecs * lead_vals
        scale = max(np.abs(theta[0]), norm * 1e-3)
        if np.linalg.norm(residual, axis=0).max() <= _SVD_TOL * scale:
            break
        q, _ = np.linalg.qr(a @ q)
    else:
        raise ConvergenceFailure(
            f"subspace iteration did not reach {_SVD_TOL} in {_SVD_MAX_ITER} iterations"
        )

    eigenvalues = theta[:j].copy()
    basis = ritz[:, :j].copy()
    for col in range(j):
        peak = np.argmax(np.abs(basis[:, col]))
        if basis[peak, col] < 0:
            basis[:, col] = -basis[:, col]
    singular_values = np.abs(eigenvalues)
    vectors = basis * singular_values
    return EmbeddingSpace(
        vocab=cooc.vocab, vectors=vectors, j=j,
        singular_values=singular_values, basis=basis, eigenvalues=eigenvalues,
    )


def _distance_matrix(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    diff = xs[:, None, :] - ys[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def wmd(a: NGram, b: NGram, space: EmbeddingSpace) -> float:
    """Exact transport cost between two keywords' uniform token masses.

    Ground cost is Euclidean distance in the embedding space. Token sets
    of size <= 2 are solved by enumerating the possible matchings;
    otherwise tokens are replicated up to the least common multiple of
    the two sizes and solved as an exact assignment, which attains the
    transportation optimum for uniform masses.
    """
    xa = space.ngram_vectors(tuple(a))
    xb = space.ngram_vectors(tuple(b))
    na, nb = len(xa), len(xb)
    dist = _distance_matrix(xa, xb)
    if na == 1 and nb == 1:
        return float(dist[0, 0])
    if na == 1:
        return float(dist[0].mean())
    if nb == 1:
        return float(dist[:, 0].mean())
    if na == 2 and nb == 2:
        straight = dist[0, 0] + dist[1, 1]
        crossed = dist[0, 1] + dist[1, 0]
        return float(min(straight, crossed)) / 2.0
    lcm = math.lcm(na, nb)
    rows = np.repeat(np.arange(na), lcm // na)
    cols = np.repeat(np.arange(nb), lcm // nb)
    expanded = dist[np.ix_(rows, cols)]
    ri, ci = linear_sum_assignment(expanded)
    return float(expanded[ri, ci].sum()) / lcm


def similarity(d: float) -> float:
    """Map a distance to (0, 1], strictly decreasing: 1 / (1 + d)."""
    if d < 0:
        raise NegativeDistance(f"distance must be non-negative, got {d}")
    return 1.0 / (1.0 + d)


@dataclass(frozen=True)
class KeywordDistanceReport:
    """All unordered keyword pairs with their WMD and similarity."""

    pairs: tuple[tuple[NGram, NGram, float, float], ...]  # (a, b, wmd, similarity)
    mean_similarity: float
    median_wmd: float


def pairwise_report(ks: KeywordSet, space: EmbeddingSpace) -> KeywordDistanceReport:
    """Score every C(k,2) keyword pair; the median of an even-length
    distance list is the mean of its middle two values."""
    grams = ks.ngrams()
    pairs = []
    for ga, gb in itertools.combinations(grams, 2):
        d = wmd(ga, gb, space)
        pairs.append((ga, gb, d, similarity(d)))
    if not pairs:
        raise EmptyReport("need at least two keywords to compare")
    distances = [p[2] for p in pairs]
    sims = [p[3] for p in pairs]
    return KeywordDistanceReport(
        pairs=tuple(pairs),
        mean_similarity=float(np.mean(sims)),
        median_wmd=float(median(distances)),
    )


def project_2d(space: EmbeddingSpace, keywords) -> list[tuple[NGram, float, float]]:
    """First two embedding dimensions of each keyword's mean token vector.

    With a one-dimensional space the second coordinate is 0. The output
    feeds external plotting as well as the bundled figure renderer.
    """
    out = []
    for gram in keywords:
        gram = tuple(gram)
        mean_vec = space.ngram_vectors(gram).mean(axis=0)
        x = float(mean_vec[0])
        y = float(mean_vec[1]) if space.j >= 2 else 0.0
        out.append((gram, x, y))
    return out
