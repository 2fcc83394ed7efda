"""Category-splice benchmark at a reduced scale.

Builds a two-pseudo-category synthetic corpus over four months, splices
category "alpha" into category "beta" at a known date, and locates the
splice with the confusion method at L=20.
"""

import datetime as dt
import tempfile
from pathlib import Path

import numpy as np

from newsshift import (
    TopicSpec,
    TrainConfig,
    build_candidate_grid,
    build_tasks,
    generate_category_corpus,
    indicator,
    ingest,
    make_lexicon,
    predict_changepoint,
    segments,
    splice_categories,
    fit_vocabulary,
    tfidf_transform,
    train,
    zipf_weights,
)

INTERVAL = (dt.date(2015, 3, 1), dt.date(2015, 6, 30))
CHANGE = dt.date(2015, 5, 7)
L = 20

if __name__ == "__main__":
    workdir = Path(tempfile.mkdtemp(prefix="splice-"))
    lexicon = make_lexicon(200)
    base = zipf_weights(200, 1.05)
    topics = {
        "alpha": TopicSpec("alpha", base[np.random.default_rng(1).permutation(200)],
                           doc_length=70, background_mix=0.4),
        "beta": TopicSpec("beta", base[np.random.default_rng(2).permutation(200)],
                          doc_length=70, background_mix=0.4),
    }
    span = (INTERVAL[0] - dt.timedelta(days=L), INTERVAL[1] + dt.timedelta(days=L))
    source = generate_category_corpus(lexicon, topics, span, per_day=5, seed=3,
                                      out_path=workdir / "cats.jsonl")
    bench = splice_categories(source, "alpha", "beta", CHANGE, INTERVAL, 3,
                              workdir / "spliced.jsonl")
    corpus = ingest(bench.corpus_path)
    print(f"spliced corpus: {len(corpus)} documents, change at {CHANGE}")

    grid = build_candidate_grid(corpus, INTERVAL, L)
    pairs = segments(grid, corpus)
    vocab = fit_vocabulary(corpus, min_df=2, max_df=0.9)
    feats = tfidf_transform(corpus, vocab)
    layout = build_tasks(pairs, corpus, split_seed=0)
    result = train(layout, feats,
                   TrainConfig(min_epochs=300, max_epochs=600, seed=0))
    curve = indicator(result.model, layout, feats)
    pred = predict_changepoint(curve)
    print(f"predicted changepoint: {pred} (delta {abs((pred - CHANGE).days)} days)")
    peak = max(curve.values)
    for cand, value in zip(curve.candidates, curve.values):
        if value > 0.5 * peak:
            print(f"  {cand}  {value:.3f}")
