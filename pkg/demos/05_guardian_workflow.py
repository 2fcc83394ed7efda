"""Fetching real articles from The Guardian and scanning a month for
changepoints.

Needs a (free) content-API key in GUARDIAN_API_KEY. The fetched raw
corpus is cached on disk, so re-runs replay from the cache without
network traffic.
"""

import datetime as dt
import os
import sys
from pathlib import Path

from newsshift import (
    TrainConfig,
    build_candidate_grid,
    build_tasks,
    fetch_guardian,
    fit_vocabulary,
    indicator,
    ingest,
    predict_changepoint,
    segments,
    tfidf_transform,
    train,
)

CATEGORY = "world"
INTERVAL = (dt.date(2020, 1, 10), dt.date(2020, 2, 10))  # Wuhan lockdown window
MARGIN = dt.timedelta(days=10)
L = 5

if __name__ == "__main__":
    api_key = os.environ.get("GUARDIAN_API_KEY")
    if not api_key:
        sys.exit("set GUARDIAN_API_KEY to run this demo")

    workdir = Path("guardian-demo")
    workdir.mkdir(exist_ok=True)
    raw = workdir / "corpus.jsonl"
    count = fetch_guardian(
        api_key, CATEGORY, (INTERVAL[0] - MARGIN, INTERVAL[1] + MARGIN), raw,
        cache_dir=workdir / "cache",
    )
    print(f"fetched {count} articles into {raw}")

    # published filtering: substantial articles only
    corpus = ingest(raw, min_words=1000)
    print(f"{len(corpus)} articles survive the 1000-word filter")

    grid = build_candidate_grid(corpus, INTERVAL, L)
    pairs = segments(grid, corpus)
    vocab = fit_vocabulary(corpus, min_df=2, max_df=0.9)
    feats = tfidf_transform(corpus, vocab)
    layout = build_tasks(pairs, corpus, split_seed=0)
    result = train(layout, feats, TrainConfig(seed=0))
    curve = indicator(result.model, layout, feats)
    print(f"predicted changepoint: {predict_changepoint(curve)}")
    for cand, value in zip(curve.candidates, curve.values):
        print(f"  {cand}  {value:6.3f}  {'#' * int(round(value * 40))}")
