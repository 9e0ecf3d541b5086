"""Framing-change detection, news-cycle features, and legislation
prediction over dated news corpora."""

from .config import RunConfig, load_config, substream_seed
from .corpus import (
    Article,
    Corpus,
    TfMatrix,
    build_tf_matrix,
    extract_ngrams,
    merge_corpora,
    tokenize,
)
from .datasets import (
    BootstrapParams,
    TopicDataset,
    bootstrap_dataset,
    mine_hard_negatives,
    quiescent_negatives,
)
from .forest import ForestModel, ForestParams, score_article, train_forest
from .framing import (
    FramingReport,
    classify_change,
    detect_framing_change,
    em_threshold,
    framing_score,
)
from .ingest import (
    ADAPTERS,
    FetchJob,
    GUARDIAN_ADAPTER,
    NYT_ADAPTER,
    fetch_topic,
    load_corpus,
    parse_article,
    save_corpus,
)
from .keywords import KeywordSet, class_entropy, information_gain, top_k_keywords
from .legislation import (
    FeatureDiffSeries,
    LegislationModel,
    fit_model,
    loo_evaluate,
    normalized_annual_diffs,
    posterior,
    predict,
)
from .metrics import ConfusionCounts, accuracy, cohens_kappa, prf1
from .newscycle import (
    AnnualFeatureSeries,
    Lexicon,
    annual_features,
    article_polarity,
    classify_cycle_state,
    load_lexicon,
    mnc,
    pearson,
)
from .semantics import (
    CooccurrenceMatrix,
    EmbeddingSpace,
    KeywordDistanceReport,
    build_cooccurrence,
    embed,
    pairwise_report,
    project_2d,
    similarity,
    wmd,
)

__version__ = "0.1.0"
