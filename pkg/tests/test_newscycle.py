import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newsframe.corpus import Corpus, TfMatrix, build_tf_matrix
from newsframe.errors import LengthMismatch, TooFewArticles, YearNotInSeries, ZeroVariance
from newsframe.newscycle import (
    ACTIVE,
    QUIESCENT,
    AnnualFeatureSeries,
    Lexicon,
    annual_features,
    article_polarity,
    classify_cycle_state,
    load_lexicon,
    mnc,
    pearson,
    quiescent_years,
)
from helpers import make_article, make_corpus

LEX = Lexicon(positive=frozenset({"good", "win", "safe"}),
              negative=frozenset({"bad", "leak", "risk"}))


class TestArticlePolarity:
    def test_all_positive(self):
        a = make_article(1, "good win safe")
        assert article_polarity(a, LEX) == 1.0

    def test_balanced(self):
        a = make_article(1, "good bad win leak")
        assert article_polarity(a, LEX) == 0.0

    def test_three_one(self):
        a = make_article(1, "good win safe bad")
        assert article_polarity(a, LEX) == pytest.approx(0.5)

    def test_no_lexicon_words(self):
        a = make_article(1, "neutral words only")
        assert article_polarity(a, LEX) == 0.0

    def test_bundled_lexicon_loads(self):
        lex = load_lexicon()
        assert "leak" in lex.negative and len(lex.positive) > 100

    @given(st.lists(st.sampled_from(["good", "bad", "win", "leak", "zz"]), min_size=1, max_size=30))
    @settings(max_examples=100, deadline=None)
    def test_range(self, words):
        a = make_article(1, " ".join(words))
        assert -1.0 <= article_polarity(a, LEX) <= 1.0


class TestPearson:
    def test_perfect_linear(self):
        assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)

    def test_perfect_antilinear(self):
        assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_alternating(self):
        assert pearson([1, 0, 1, 0], [0, 1, 0, 1]) == pytest.approx(-1.0)

    def test_zero_variance(self):
        with pytest.raises(ZeroVariance):
            pearson([1, 1, 1], [1, 2, 3])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            pearson([1, 2], [1, 2, 3])

    @given(
        st.lists(st.integers(-50, 50), min_size=3, max_size=12),
        st.floats(min_value=0.1, max_value=10),
        st.floats(min_value=-5, max_value=5),
    )
    @settings(max_examples=100, deadline=None)
    def test_symmetry_and_affine_invariance(self, values, scale, shift):
        u = np.asarray(values, dtype=float)
        v = np.arange(len(u), dtype=float)
        if u.std() == 0:
            return
        r = pearson(u, v)
        assert r == pytest.approx(pearson(v, u), abs=1e-12)
        assert r == pytest.approx(pearson(scale * u + shift, v), abs=1e-9)


def tf_from_rows(rows):
    rows = np.asarray(rows)
    return TfMatrix(
        vocab=tuple((f"t{j}",) for j in range(rows.shape[1])),
        rows=rows,
        article_ids=tuple(f"a{i}" for i in range(rows.shape[0])),
    )


class TestMnc:
    def test_duplicates_correlate_perfectly(self):
        corpus = make_corpus(["xx yy zz zz"] * 3)
        tf = build_tf_matrix(corpus, orders={1}, min_df=1)
        assert mnc(corpus, tf) == pytest.approx(1.0, abs=1e-12)

    def test_single_anticorrelated_pair(self):
        corpus = make_corpus(["r1", "r2"])
        tf = tf_from_rows([[1, 2, 3], [3, 2, 1]])
        assert mnc(corpus, tf) == pytest.approx(-1.0, abs=1e-12)

    def test_three_row_hand_case(self):
        corpus = make_corpus(["r1", "r2", "r3"])
        tf = tf_from_rows([[1, 2, 3], [2, 4, 6], [3, 2, 1]])
        assert mnc(corpus, tf) == pytest.approx(-1.0 / 3.0, abs=1e-12)

    def test_zero_variance_rows_dropped(self):
        corpus = make_corpus(["r1", "r2", "r3"])
        tf = tf_from_rows([[1, 2, 3], [2, 4, 6], [5, 5, 5]])
        assert mnc(corpus, tf) == pytest.approx(1.0, abs=1e-12)

    def test_too_few(self):
        corpus = make_corpus(["solo"])
        tf = tf_from_rows([[1, 2]])
        with pytest.raises(TooFewArticles):
            mnc(corpus, tf)

    def test_bounded(self):
        rng = np.random.default_rng(6)
        corpus = make_corpus([f"r{i}" for i in range(6)])
        tf = tf_from_rows(rng.integers(0, 5, size=(6, 8)))
        assert -1.0 <= mnc(corpus, tf) <= 1.0


class TestAnnualFeatures:
    def test_volume_buckets(self):
        articles = [make_article(i, "xx yy", year=2014) for i in range(5)]
        articles += [make_article(10 + i, "xx zz", year=2015) for i in range(2)]
        series = annual_features(Corpus(tuple(articles)), LEX, topic="t")
        assert series.years == (2014, 2015)
        assert series.volume == (5, 2)

    def test_single_article_year_has_no_mnc(self):
        articles = [make_article(1, "xx yy", year=2014)]
        articles += [make_article(2, "xx", year=2015), make_article(3, "xx", year=2015)]
        series = annual_features(Corpus(tuple(articles)), LEX)
        assert series.mnc[0] is None

    def test_identical_articles_year_mnc_one(self):
        # counts must vary across the vocabulary for Pearson to be defined
        articles = [make_article(i, "xx xx yy zz", year=2014) for i in range(4)]
        series = annual_features(Corpus(tuple(articles)), LEX)
        assert series.mnc[0] == pytest.approx(1.0)

    def test_gap_year_zero_volume(self):
        articles = [make_article(1, "xx yy", year=2013), make_article(2, "xx zz", year=2015)]
        series = annual_features(Corpus(tuple(articles)), LEX)
        assert series.years == (2013, 2014, 2015)
        assert series.volume == (1, 0, 1)
        assert series.mean_sentiment[1] is None and series.mnc[1] is None

    def test_volume_sums_to_corpus_size(self):
        rng = np.random.default_rng(3)
        articles = [
            make_article(i, "xx yy", year=int(rng.integers(2010, 2015)))
            for i in range(23)
        ]
        series = annual_features(Corpus(tuple(articles)), LEX)
        assert sum(series.volume) == 23

    def test_legislative_labels_attached(self):
        articles = [make_article(1, "xx", year=2014), make_article(2, "yy", year=2015)]
        series = annual_features(
            Corpus(tuple(articles)), LEX, legislative_labels={2015: True}
        )
        assert series.legislative == (False, True)

    def test_global_vocab_switch(self):
        articles = [make_article(1, "xx xx yy", year=2014),
                    make_article(2, "xx yy yy", year=2014),
                    make_article(3, "zz qq", year=2015),
                    make_article(4, "zz rr", year=2015)]
        local = annual_features(Corpus(tuple(articles)), LEX)
        shared = annual_features(Corpus(tuple(articles)), LEX, global_vocab=True)
        assert local.mnc[0] is not None and shared.mnc[0] is not None
        # shared vocabulary sees 2015-only terms as zero columns in 2014
        assert local.mnc[0] != shared.mnc[0]

    def test_csv_round_trip(self, tmp_path):
        series = AnnualFeatureSeries(
            topic="t",
            years=(2014, 2015, 2016),
            volume=(5, 0, 2),
            mean_sentiment=(0.25, None, -0.5),
            mnc=(0.75, None, None),
            legislative=(False, False, True),
        )
        path = tmp_path / "t.csv"
        series.write_csv(path)
        back = AnnualFeatureSeries.read_csv(path)
        assert back == series


class TestCycleState:
    series = AnnualFeatureSeries(
        topic="t",
        years=(2014, 2015, 2016),
        volume=(5, 5, 100),
        mean_sentiment=(0.0, 0.0, 0.0),
        mnc=(0.1, 0.1, 0.8),
    )

    def test_active_above_both_medians(self):
        assert classify_cycle_state(self.series, 2016) == ACTIVE

    def test_quiescent_at_median(self):
        assert classify_cycle_state(self.series, 2014) == QUIESCENT

    def test_single_year_quiescent(self):
        one = AnnualFeatureSeries(
            topic="t", years=(2014,), volume=(7,),
            mean_sentiment=(0.0,), mnc=(None,),
        )
        assert classify_cycle_state(one, 2014) == QUIESCENT

    def test_year_not_in_series(self):
        with pytest.raises(YearNotInSeries):
            classify_cycle_state(self.series, 1999)


class TestQuiescentYears:
    def test_low_years_qualify(self):
        series = AnnualFeatureSeries(
            topic="t", years=(2014, 2015, 2016), volume=(5, 5, 100),
            mean_sentiment=(None,) * 3, mnc=(None,) * 3,
        )
        assert quiescent_years(series) == [2014, 2015]

    def test_uniform_volumes_have_none(self):
        series = AnnualFeatureSeries(
            topic="t", years=(2014, 2015), volume=(5, 5),
            mean_sentiment=(None,) * 2, mnc=(None,) * 2,
        )
        assert quiescent_years(series) == []

    def test_strictly_low_year_qualifies_without_active_years(self):
        series = AnnualFeatureSeries(
            topic="t", years=(2014, 2015, 2016), volume=(3, 5, 5),
            mean_sentiment=(None,) * 3, mnc=(None,) * 3,
        )
        assert quiescent_years(series) == [2014]
