"""Changepoint detection in dated document streams.

Candidate dates split a document stream into before/after windows; a
multi-head linear classifier trained to tell the two sides apart turns
its validation error into a total-variation indicator curve, with an LDA
topic-distance baseline, synthetic benchmark generators, and a delta/AUC
evaluation harness.
"""

from .benchgen import (
    InducedBenchmark,
    SyntheticLexicon,
    TopicSpec,
    disjoint_topics,
    generate_category_corpus,
    generate_topic_switch,
    load_manifest,
    make_lexicon,
    shuffle_dates,
    splice_categories,
    zipf_weights,
)
from .confusion import (
    ConfusionModel,
    IndicatorCurve,
    TaskLayout,
    TrainConfig,
    TrainResult,
    build_tasks,
    error_rate,
    error_rates,
    indicator,
    loss_and_grad,
    predict_changepoint,
    read_indicator_csv,
    train,
    unbiased_loss,
    write_indicator_csv,
)
from .corpus import (
    CandidateGrid,
    CorpusError,
    CorpusIndex,
    Document,
    GuardianAuthError,
    GuardianFetchError,
    build_candidate_grid,
    fetch_guardian,
    ingest,
    write_corpus,
)
from .evaluation import (
    EvalReport,
    EventList,
    RandomBaseline,
    RunRecord,
    SuccessCurve,
    aggregate,
    delta_days,
    load_events,
    random_baseline,
    success_curve,
    success_curve_from_deltas,
    write_events,
)
from .features import (
    FeatureMatrix,
    Vocabulary,
    fit_vocabulary,
    load_embeddings,
    read_embeddings,
    tfidf_transform,
    tokenize,
    write_embeddings,
)
from .lda import (
    SegmentTopicDist,
    TopicModel,
    fit_lda,
    lda_indicator,
    load_topic_model,
    save_topic_model,
    segment_topic_dist,
    tv_distance,
)
from .windows import SegmentPair, segments

__version__ = "0.1.0"
