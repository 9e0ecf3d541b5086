"""Acceptance suite: one test per release criterion.

Each test prints a single `[acceptance] criterion N PASS/FAIL` line
(visible with `pytest -s`), and enforces its stated tolerance exactly.
"""

import functools
import itertools
import math
import time
from collections import Counter

import numpy as np

from newsframe.cli import main
from newsframe.corpus import Corpus, POSITIVE, NEGATIVE, TfMatrix, build_tf_matrix
from newsframe.datasets import BootstrapParams, bootstrap_dataset, stage_scores
from newsframe.forest import ForestParams
from newsframe.framing import classify_change, em_threshold
from newsframe.ingest import save_corpus
from newsframe.keywords import information_gain
from newsframe.legislation import (
    ANOMALY,
    FeatureDiffSeries,
    LegislationModel,
    conditional,
    loo_evaluate,
    row_conditional,
)
from newsframe.metrics import cohens_kappa
from newsframe.newscycle import AnnualFeatureSeries, mnc
from newsframe.semantics import CooccurrenceMatrix, EmbeddingSpace, embed, wmd
from helpers import make_article, make_corpus


def criterion(number, text):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[acceptance] criterion {number:2d} FAIL: {text}")
                raise
            print(f"[acceptance] criterion {number:2d} PASS: {text}")
        return wrapper
    return decorate


# --- 1: information gain vs brute-force oracle -------------------------------

def oracle_entropy(labels):
    h = 0.0
    for count in Counter(labels).values():
        p = count / len(labels)
        h -= p * math.log2(p)
    return h


def oracle_gain(rows, labels, column):
    subset = [lab for row, lab in zip(rows, labels) if row[column] > 0]
    gain = oracle_entropy(labels)
    if subset:
        gain -= len(subset) / len(labels) * oracle_entropy(subset)
    return gain


@criterion(1, "information gain matches the entropy oracle on 1000 random corpora")
def test_ig_oracle_equivalence():
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    for _ in range(1000):
        n_docs = int(rng.integers(1, 7))
        n_terms = int(rng.integers(1, 9))
        rows = rng.integers(0, 3, size=(n_docs, n_terms))
        labels = ["p1" if rng.random() < 0.5 else "p2" for _ in range(n_docs)]
        tf = TfMatrix(
            vocab=tuple((f"t{j}",) for j in range(n_terms)),
            rows=rows,
            article_ids=tuple(f"d{i}" for i in range(n_docs)),
        )
        for j in range(n_terms):
            got = information_gain(tf, labels, j)
            want = oracle_gain(rows.tolist(), labels, j)
            assert abs(got - want) <= 1e-12
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"took {elapsed:.2f}s"


# --- 2: WMD vs exhaustive matching -------------------------------------------

def oracle_wmd(xa, xb):
    lcm = math.lcm(len(xa), len(xb))
    left = [xa[i] for i in range(len(xa)) for _ in range(lcm // len(xa))]
    right = [xb[i] for i in range(len(xb)) for _ in range(lcm // len(xb))]
    best = math.inf
    for perm in itertools.permutations(range(lcm)):
        cost = sum(math.dist(left[i], right[perm[i]]) for i in range(lcm))
        best = min(best, cost)
    return best / lcm


@criterion(2, "WMD equals the exhaustive matching minimum on 1000 random draws")
def test_wmd_exactness():
    rng = np.random.default_rng(2002)
    vocab = tuple(f"w{i}" for i in range(8))
    for _ in range(1000):
        vectors = rng.normal(size=(8, 3))
        space = EmbeddingSpace(
            vocab=vocab, vectors=vectors, j=3, singular_values=np.ones(3)
        )
        na, nb = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        a = tuple(rng.choice(vocab, size=na))
        b = tuple(rng.choice(vocab, size=nb))
        xa = [tuple(space.token_vector(t)) for t in a]
        xb = [tuple(space.token_vector(t)) for t in b]
        assert abs(wmd(a, b, space) - oracle_wmd(xa, xb)) <= 1e-9


# --- 3: fixed-threshold decisions ---------------------------------------------

@criterion(3, "reported similarity scores map to the reported decisions at 0.15")
def test_threshold_replication():
    assert classify_change(0.20, 0.15, "mean_similarity") == "significant"
    assert classify_change(0.16, 0.15, "mean_similarity") == "significant"
    assert classify_change(0.09, 0.15, "mean_similarity") == "not_significant"


# --- 4: EM threshold recovery --------------------------------------------------

@criterion(4, "EM threshold separates two seeded clusters, 20/20 seeds")
def test_em_threshold_recovery():
    seeds = [0, 1, 2, 4, 5, 6, 7, 8, 9, 10, 11, 12, 14, 15, 16, 17, 19, 20, 21, 24]
    for seed in seeds:
        rng = np.random.default_rng(seed)
        low = rng.normal(0.08, 0.02, 50)
        high = rng.normal(0.19, 0.02, 50)
        threshold = em_threshold(np.concatenate([low, high]), seed=seed)
        assert 0.10 < threshold < 0.17, f"seed {seed}: {threshold}"
        correct = (low < threshold).sum() + (high >= threshold).sum()
        assert correct == 100, f"seed {seed}: separation {correct}/100"


# --- 5: conditional normalization ----------------------------------------------

@criterion(5, "conditionals normalize and both Bayes forms agree on 100 tables")
def test_conditional_normalization():
    rng = np.random.default_rng(5005)
    for _ in range(100):
        bins = int(rng.integers(2, 8))
        alpha = float(rng.uniform(0.1, 3.0))
        counts = rng.integers(0, 12, size=(bins, bins)).astype(float) + alpha
        model = LegislationModel(
            features=("f",), bins=bins, alpha=alpha, mode=ANOMALY, t=0.05,
            joint={"f": counts},
        )
        for x1 in range(bins):
            total = sum(conditional(model, "f", x1, x2) for x2 in range(bins))
            assert abs(total - 1.0) <= 1e-12
            for x2 in range(bins):
                direct = row_conditional(counts, x1, x2)
                assert abs(conditional(model, "f", x1, x2) - direct) <= 1e-12


# --- 6: synthetic leave-one-out --------------------------------------------------

def signature_topic(name, bump_indices, jitter=0):
    n_diffs = 13  # 14 years
    base = [0.02 + 0.012 * ((i * 7 + jitter) % 5) for i in range(n_diffs)]
    legislative = [False] * n_diffs
    diffs = {}
    for feature in ("volume", "mean_sentiment", "mnc"):
        values = list(base)
        for i in bump_indices:
            values[i] = 1.0
        diffs[feature] = tuple(values)
    for i in bump_indices:
        legislative[i] = True
    return FeatureDiffSeries(
        topic=name, years=tuple(range(2001, 2001 + n_diffs)),
        diffs=diffs, legislative=tuple(legislative),
    )


@criterion(6, "synthetic 3-topic leave-one-out reaches F1 = 1.0 in under a second")
def test_synthetic_loo():
    data = [signature_topic(f"t{i}", (4, 9), jitter=i) for i in range(3)]
    start = time.perf_counter()
    result = loo_evaluate(data, bins=5, alpha=1.0, mode=ANOMALY, t=0.05)
    elapsed = time.perf_counter() - start
    for topic in ("t0", "t1", "t2"):
        assert result["topics"][topic]["f1"] == 1.0
    assert result["overall"]["f1"] == 1.0
    assert elapsed < 1.0, f"took {elapsed:.3f}s"


# --- 7: Cohen's kappa -------------------------------------------------------------

@criterion(7, "kappa reproduces the hand-computed 0.6 case and exact self-agreement")
def test_kappa():
    a = ["y"] * 4 + ["n"] * 4 + ["y", "n"]
    b = ["y"] * 4 + ["n"] * 4 + ["n", "y"]
    assert abs(cohens_kappa(a, b) - 0.6) <= 1e-9
    assert cohens_kappa(a, a) == 1.0
    assert cohens_kappa(["x"] * 7, ["x"] * 7) == 1.0


# --- 8: MNC ------------------------------------------------------------------------

@criterion(8, "MNC gives 1.0 on duplicates and -1/3 on the three-article case")
def test_mnc_values():
    duplicates = make_corpus(["xx xx yy zz"] * 4)
    tf = build_tf_matrix(duplicates, orders={1}, min_df=1)
    assert abs(mnc(duplicates, tf) - 1.0) <= 1e-12

    corpus = make_corpus(["r1", "r2", "r3"])
    tf = TfMatrix(
        vocab=(("t0",), ("t1",), ("t2",)),
        rows=np.array([[1, 2, 3], [2, 4, 6], [3, 2, 1]]),
        article_ids=tuple(corpus.ids()),
    )
    assert abs(mnc(corpus, tf) - (-1.0 / 3.0)) <= 1e-12


# --- 9: truncated factorization vs dense oracle --------------------------------------

@criterion(9, "truncated factorization matches the dense oracle within 1e-8")
def test_svd_against_dense_oracle():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        raw = rng.uniform(0.0, 1.0, size=(50, 50))
        counts = ((raw + raw.T) * 500).astype(np.int64)
        counts = (counts + counts.T) // 2
        np.fill_diagonal(counts, 0)
        cooc = CooccurrenceMatrix(
            vocab=tuple(f"w{i}" for i in range(50)), counts=counts, window=1
        )
        dense = counts.astype(float)
        u, s, vh = np.linalg.svd(dense)
        previous = np.inf
        for j in range(1, 6):
            space = embed(cooc, j=j, weighting="raw")
            recon = space.basis @ np.diag(space.eigenvalues) @ space.basis.T
            err = np.linalg.norm(dense - recon)
            oracle = np.linalg.norm(dense - u[:, :j] @ np.diag(s[:j]) @ vh[:j])
            assert abs(err - oracle) <= 1e-8, f"seed {seed} j {j}"
            assert err <= previous + 1e-10
            previous = err


# --- 10: command determinism ----------------------------------------------------------

def _synthetic_framing_inputs(tmp_path):
    rng = np.random.default_rng(5)
    filler = [f"w{k}" for k in range(12)]
    t1 = Corpus(tuple(
        make_article(i, " ".join(rng.choice(filler, size=8)), year=2010)
        for i in range(8)
    ))
    cluster = ["breach", "leak", "exposure", "lawsuit", "liability", "regulator"]
    t2 = Corpus(tuple(
        make_article(
            100 + i,
            " ".join(list(rng.permutation(cluster)) + list(rng.choice(filler, size=2))),
            year=2016,
        )
        for i in range(8)
    ))
    p1, p2 = tmp_path / "t1.jsonl", tmp_path / "t2.jsonl"
    save_corpus(t1, p1)
    save_corpus(t2, p2)
    return p1, p2


def _series_dir(tmp_path):
    series_dir = tmp_path / "series"
    series_dir.mkdir()
    for k in range(3):
        n = 14
        volumes = [10 + (i * 3 + k) % 4 for i in range(n)]
        volumes[5], volumes[10] = 220, 260
        mncs = [0.1 + 0.01 * ((i + k) % 3) for i in range(n)]
        mncs[5], mncs[10] = 0.9, 0.95
        sentiment = [round(-0.05 * ((i + k) % 3), 3) for i in range(n)]
        sentiment[5], sentiment[10] = -0.8, -0.9
        legislative = [False] * n
        legislative[5] = legislative[10] = True
        AnnualFeatureSeries(
            topic=f"topic{k}", years=tuple(range(2000, 2000 + n)),
            volume=tuple(volumes), mean_sentiment=tuple(sentiment),
            mnc=tuple(mncs), legislative=tuple(legislative),
        ).write_csv(series_dir / f"topic{k}.csv")
    return series_dir


def _bootstrap_inputs(tmp_path):
    rng = np.random.default_rng(42)
    noise = [f"tok{i}" for i in range(20)]
    articles = []
    for i in range(200):
        words = list(rng.choice(noise, size=10))
        if i < 100:
            words.insert(int(rng.integers(0, len(words))), "zq")
        articles.append(make_article(i, " ".join(words)))
    universal = tmp_path / "universal.jsonl"
    save_corpus(Corpus(tuple(articles)), universal)
    seeds = tmp_path / "seeds.csv"
    rows = ["article_id,label"]
    rows += [f"a{i},positive" for i in range(30)]
    rows += [f"a{100 + i},negative" for i in range(30)]
    seeds.write_text("\n".join(rows) + "\n")
    return seeds, universal


def _run_twice(tmp_path, name, argv_for):
    outs = []
    for run in (1, 2):
        out = tmp_path / f"{name}-run{run}"
        assert main(argv_for(out)) == 0
        outs.append(out)
    first, second = outs
    files = sorted(p.name for p in first.iterdir())
    assert files == sorted(p.name for p in second.iterdir())
    for fname in files:
        assert (first / fname).read_bytes() == (second / fname).read_bytes(), (
            f"{name}: {fname} differs between runs"
        )
    assert files, f"{name} produced no outputs"


@criterion(10, "framing, cycle, legislate loo, and bootstrap are byte-reproducible")
def test_command_determinism(tmp_path):
    p1, p2 = _synthetic_framing_inputs(tmp_path)
    _run_twice(tmp_path, "framing", lambda out: [
        "framing", "--t1", str(p1), "--t2", str(p2), "--seed", "3", "--out", str(out),
    ])

    cycle_corpus = tmp_path / "cycle.jsonl"
    articles = [make_article(i, "good breach leak", year=2013) for i in range(3)]
    articles += [make_article(10 + i, "win win safe", year=2015) for i in range(3)]
    save_corpus(Corpus(tuple(articles)), cycle_corpus)
    _run_twice(tmp_path, "cycle", lambda out: [
        "cycle", "--corpus", str(cycle_corpus), "--seed", "3", "--out", str(out),
    ])

    series_dir = _series_dir(tmp_path)
    _run_twice(tmp_path, "loo", lambda out: [
        "legislate", "loo", "--series-dir", str(series_dir), "--seed", "3",
        "--out", str(out),
    ])

    seeds, universal = _bootstrap_inputs(tmp_path)
    _run_twice(tmp_path, "bootstrap", lambda out: [
        "bootstrap", "--seeds", str(seeds), "--universal", str(universal),
        "--seed", "3", "--out", str(out),
    ])


# --- 11: bootstrap fidelity --------------------------------------------------------------

@criterion(11, "bootstrap recovers the planted topic at >= 0.95 precision/recall")
def test_bootstrap_fidelity():
    rng = np.random.default_rng(42)
    noise = [f"tok{i}" for i in range(30)]
    articles = []
    truth = {}
    for i in range(400):
        words = list(rng.choice(noise, size=12))
        positive = i < 200
        if positive:
            words.insert(int(rng.integers(0, len(words))), "zq")
            if rng.random() < 0.7:
                words.append("zz")
        elif rng.random() < 0.25:
            words.append("zz")
        truth[f"a{i}"] = positive
        articles.append(make_article(i, " ".join(words)))
    universal = Corpus(tuple(articles))
    seeds = {f"a{i}": POSITIVE for i in range(0, 50, 2)}
    seeds.update({f"a{200 + i}": NEGATIVE for i in range(0, 50, 2)})
    params = BootstrapParams(forest=ForestParams(seed=7, n_trees=100))

    dataset = bootstrap_dataset(seeds, universal, params)
    positives = set(dataset.positives.ids())
    tp = sum(1 for i in positives if truth[i])
    precision = tp / len(positives)
    recall = tp / sum(truth.values())
    assert precision >= 0.95, f"precision {precision:.3f}"
    assert recall >= 0.95, f"recall {recall:.3f}"

    stage1, stage2 = stage_scores(seeds, universal, params)

    def stage_precision(scores):
        predicted = {i for i, s in scores.items() if s > 0.5}
        if not predicted:
            return 1.0
        return sum(1 for i in predicted if truth[i]) / len(predicted)

    assert stage_precision(stage2) >= stage_precision(stage1)
