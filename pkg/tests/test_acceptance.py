"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -rA`` (add ``-s`` to stream
the per-criterion lines). Several criteria train at the published default
hyperparameters and take minutes; every criterion asserts its stated
tolerance and runtime bound.
"""

import datetime as dt
import time

import numpy as np
import pytest

from newsshift.benchgen import (
    TopicSpec,
    disjoint_topics,
    generate_category_corpus,
    generate_topic_switch,
    make_lexicon,
    splice_categories,
    zipf_weights,
)
from newsshift.confusion import (
    TrainConfig,
    build_tasks,
    error_rate,
    indicator,
    loss_and_grad,
    predict_changepoint,
    train,
)
from newsshift.corpus import CorpusIndex, build_candidate_grid, ingest
from newsshift.evaluation import (
    EventList,
    RunRecord,
    aggregate,
    delta_days,
    random_baseline,
    success_curve_from_deltas,
)
from newsshift.features import FeatureMatrix, fit_vocabulary, tfidf_transform
from newsshift.lda import fit_lda, lda_indicator, tv_distance
from newsshift.windows import segments

from conftest import daily_corpus, day, make_doc


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


# --------------------------------------------------------------------------
# TV-estimator oracle: exact discrete distributions vs the confusion pipeline
# --------------------------------------------------------------------------

def _tv_case(alpha: float, seed: int):
    V = 50
    p = np.zeros(V)
    p[:25] = 0.04
    r = np.zeros(V)
    r[25:] = 0.04
    q = (1.0 - alpha) * p + alpha * r
    tv_exact = 0.5 * np.abs(p - q).sum()  # oracle: direct definition

    rng = np.random.default_rng([seed, int(alpha * 10)])
    docs = []
    i = 0
    for date, dist, n in ((day(0), p, 50), (day(1), p, 5000), (day(2), q, 5000)):
        for sym in rng.choice(V, size=n, p=dist):
            docs.append(make_doc(i, date, body=f"s{sym:02d}"))
            i += 1
    corpus = CorpusIndex(docs)
    grid = build_candidate_grid(corpus, (day(1), day(1)), 1)
    pairs = segments(grid, corpus)
    rows = np.zeros((len(corpus), V))
    for j, doc in enumerate(corpus.documents):
        rows[j, int(doc.body[1:])] = 1.0  # one-hot symbol features
    feats = FeatureMatrix(rows=rows, dim=V, kind="embedding")
    layout = build_tasks(pairs, corpus, split_seed=seed)
    result = train(layout, feats, TrainConfig(seed=seed))
    curve = indicator(result.model, layout, feats)
    return tv_exact, float(curve.raw_values[0])


def test_tv_estimator_oracle():
    t0 = time.perf_counter()
    seed = 12
    details = []
    for alpha in (0.0, 0.3, 0.7):
        tv_exact, estimate = _tv_case(alpha, seed)
        assert abs(estimate - tv_exact) <= 0.05, (
            f"TV {tv_exact:.2f}: estimate {estimate:.4f} off by more than 0.05"
        )
        assert estimate <= tv_exact + 0.05, (
            f"TV {tv_exact:.2f}: estimate {estimate:.4f} violates lower-bound slack"
        )
        details.append(f"exact {tv_exact:.2f} -> est {estimate:+.4f}")
    elapsed = time.perf_counter() - t0
    assert elapsed < 120.0, f"runtime {elapsed:.0f}s exceeds 2 min"
    _report("TV-estimator oracle", True, "; ".join(details) + f" ({elapsed:.0f}s)")


# --------------------------------------------------------------------------
# Benchmark-1 analog: 10 topic-switch benchmarks x 5 seeds, both methods
# --------------------------------------------------------------------------

INTERVAL_30 = (day(0), day(29))


def test_benchmark1_analog(tmp_path):
    t0 = time.perf_counter()
    lexicon = make_lexicon(120)
    conf_records, lda_records = [], []
    for b in range(10):
        topic_a, topic_b = disjoint_topics(
            lexicon, seed=b, doc_length=60, background_mix=0.5
        )
        change = day(int(np.random.default_rng([b, 7]).integers(0, 30)))
        bench = generate_topic_switch(
            lexicon, topic_a, topic_b, INTERVAL_30, change,
            per_day=10, margin_days=8, seed=b, out_path=tmp_path / f"b{b}.jsonl",
        )
        corpus = ingest(bench.corpus_path)
        grid = build_candidate_grid(corpus, INTERVAL_30, 8)
        pairs = segments(grid, corpus)
        vocab = fit_vocabulary(corpus, min_df=2, max_df=0.9)
        feats = tfidf_transform(corpus, vocab)
        events = EventList(events=((change, "induced"),), interval=INTERVAL_30)
        for s in range(5):
            layout = build_tasks(pairs, corpus, split_seed=s)
            result = train(layout, feats, TrainConfig(seed=s))
            pred = predict_changepoint(indicator(result.model, layout, feats))
            conf_records.append(RunRecord(f"b{b}", s, pred, delta_days(pred, events)))
            model = fit_lda(corpus, vocab, n_topics=20, iterations=83, seed=s)
            pred = predict_changepoint(lda_indicator(model, pairs))
            lda_records.append(RunRecord(f"b{b}", s, pred, delta_days(pred, events)))
    conf = aggregate(conf_records, interval_days=30)
    topics = aggregate(lda_records, interval_days=30)
    elapsed = time.perf_counter() - t0
    assert conf.mean_delta <= 2.0, f"confusion mean delta {conf.mean_delta:.2f} > 2"
    assert topics.mean_delta <= 2.0, f"LDA mean delta {topics.mean_delta:.2f} > 2"
    assert elapsed < 600.0, f"runtime {elapsed:.0f}s exceeds 10 min"
    _report(
        "Benchmark-1 analog", True,
        f"confusion delta {conf.mean_delta:.2f}+-{conf.se_delta:.2f}, "
        f"LDA delta {topics.mean_delta:.2f}+-{topics.se_delta:.2f} "
        f"over 50 runs ({elapsed:.0f}s)",
    )


# --------------------------------------------------------------------------
# Null benchmark: identical topics on both sides, no false changepoint
# --------------------------------------------------------------------------

def test_null_benchmark(tmp_path):
    t0 = time.perf_counter()
    lexicon = make_lexicon(120)
    topic, _ = disjoint_topics(lexicon, seed=100, doc_length=60,
                               background_mix=0.5)
    bench = generate_topic_switch(
        lexicon, topic, topic, INTERVAL_30, day(14),
        per_day=20, margin_days=8, seed=100, out_path=tmp_path / "null.jsonl",
    )
    corpus = ingest(bench.corpus_path)
    grid = build_candidate_grid(corpus, INTERVAL_30, 8)
    pairs = segments(grid, corpus)
    vocab = fit_vocabulary(corpus, min_df=2, max_df=0.9)
    feats = tfidf_transform(corpus, vocab)
    layout = build_tasks(pairs, corpus, split_seed=0)
    result = train(layout, feats, TrainConfig(seed=0))
    conf_curve = indicator(result.model, layout, feats)
    model = fit_lda(corpus, vocab, n_topics=20, iterations=83, seed=0)
    lda_curve = lda_indicator(model, pairs)
    elapsed = time.perf_counter() - t0
    conf_max = float(conf_curve.values.max())
    lda_spread = float(lda_curve.values.max() - lda_curve.values.min())
    assert conf_max < 0.3, f"confusion indicator max {conf_max:.3f} >= 0.3"
    assert lda_spread < 0.2, f"LDA indicator spread {lda_spread:.3f} >= 0.2"
    assert elapsed < 120.0, f"runtime {elapsed:.0f}s exceeds 2 min"
    _report(
        "Null benchmark", True,
        f"confusion max {conf_max:.3f}, LDA spread {lda_spread:.3f} ({elapsed:.0f}s)",
    )


# --------------------------------------------------------------------------
# Random-baseline exactness against brute-force enumeration
# --------------------------------------------------------------------------

def test_random_baseline_exactness():
    grid = build_candidate_grid(daily_corpus(40, 1), (day(5), day(34)), 5)
    assert len(grid.candidates) == 30
    event_date = grid.candidates[14]  # "day 15" of the candidate window
    events = EventList(events=((event_date, "mid"),),
                       interval=(grid.candidates[0], grid.candidates[-1]))
    rb = random_baseline(grid, events, interval_days=30)

    # brute-force oracle: integer deltas for every candidate
    deltas = [abs((c - event_date).days) for c in grid.candidates]
    exact_mean = sum(deltas) / len(deltas)
    assert rb.mean_delta == exact_mean
    rates = np.array(
        [sum(1 for d in deltas if d <= n) / len(deltas) for n in range(31)]
    )
    assert np.all(np.abs(rb.curve.rates - rates) <= 1e-12)
    auc = 0.0
    for i in range(30):
        auc += 0.5 * (rates[i] + rates[i + 1]) / 30.0
    assert abs(rb.curve.auc - auc) <= 1e-12
    _report(
        "Random baseline exactness", True,
        f"mean delta {rb.mean_delta} == enumeration, AUC to 1e-12",
    )


# --------------------------------------------------------------------------
# Class-balance invariance of the loss and the error rate
# --------------------------------------------------------------------------

def _duplicate_class0(corpus, layout, logits):
    """Corpus, layout, and logit vector with every class-0 document doubled,
    re-normalized per the class-size weighting definitions."""
    from newsshift.confusion import TaskLayout

    c0 = np.flatnonzero(layout.labels[:, 0] == 0)
    extra = [make_doc(5000 + k, corpus.documents[i].date) for k, i in enumerate(c0)]
    dup_corpus = CorpusIndex(list(corpus.documents) + extra)
    n = len(dup_corpus)
    labels = np.full((n, 1), -1, dtype=np.int8)
    labels[: len(corpus)] = layout.labels
    labels[len(corpus):, 0] = 0
    train_mask = np.concatenate([layout.train_mask, layout.train_mask[c0]])
    n_train = np.zeros((1, 2), dtype=np.int64)
    n_val = np.zeros((1, 2), dtype=np.int64)
    om_tr = np.zeros((n, 1))
    om_va = np.zeros((n, 1))
    for y in (0, 1):
        n_train[0, y] = ((labels[:, 0] == y) & train_mask).sum()
        n_val[0, y] = ((labels[:, 0] == y) & ~train_mask).sum()
        om_tr[(labels[:, 0] == y) & train_mask, 0] = 1.0 / (2 * n_train[0, y])
        om_va[(labels[:, 0] == y) & ~train_mask, 0] = 1.0 / (2 * n_val[0, y])
    dup_layout = TaskLayout(
        candidates=layout.candidates, labels=labels, train_mask=train_mask,
        n_train=n_train, n_val=n_val, omega_train=om_tr, omega_val=om_va,
        window=layout.window, split_seed=layout.split_seed,
    )
    return dup_corpus, dup_layout, np.concatenate([logits, logits[c0]])


def test_balance_invariance():
    from newsshift.confusion import ConfusionModel, unbiased_loss

    docs = []
    i = 0
    for d, count in ((0, 2), (1, 8), (2, 22)):
        for _ in range(count):
            docs.append(make_doc(i, day(d)))
            i += 1
    corpus = CorpusIndex(docs)
    grid = build_candidate_grid(corpus, (day(1), day(1)), 1)
    layout = build_tasks(segments(grid, corpus), corpus, split_seed=0)
    logits = np.random.default_rng(42).normal(size=len(corpus))
    dup_corpus, dup_layout, dup_logits = _duplicate_class0(corpus, layout, logits)

    def identity_model(logit_vec, n):
        W = np.zeros((n, 1))
        W[:, 0] = logit_vec
        return (
            ConfusionModel(weights=W, biases=np.zeros(1),
                           candidates=layout.candidates, seed=0),
            FeatureMatrix(rows=np.eye(n), dim=n, kind="embedding"),
        )

    base_model, base_feats = identity_model(logits, len(corpus))
    dup_model, dup_feats = identity_model(dup_logits, len(dup_corpus))
    worst = 0.0
    for split in ("train", "val"):
        base_loss = unbiased_loss(base_model, layout, base_feats, split)
        dup_loss = unbiased_loss(dup_model, dup_layout, dup_feats, split)
        worst = max(worst, abs(base_loss - dup_loss))
    base_err = error_rate(base_model, layout, base_feats, layout.candidates[0])
    dup_err = error_rate(dup_model, dup_layout, dup_feats, layout.candidates[0])
    worst = max(worst, abs(base_err - dup_err))
    assert worst < 1e-12, f"balance invariance violated by {worst:.2e}"
    _report("Class-balance invariance of loss and error rate", True,
            f"max deviation {worst:.2e} < 1e-12")


# --------------------------------------------------------------------------
# Analytic gradient vs central finite differences
# --------------------------------------------------------------------------

def test_gradient_check():
    rng = np.random.default_rng(7)
    h = 1e-5
    worst = 0.0
    for _ in range(5):
        n, dim, n_tasks = 20, 4, 3
        X = rng.normal(size=(n, dim))
        labels = rng.integers(-1, 2, size=(n, n_tasks))
        Y = (labels == 1).astype(float)
        om = np.zeros((n, n_tasks))
        for t in range(n_tasks):
            for y in (0, 1):
                members = np.flatnonzero(labels[:, t] == y)
                if len(members):
                    om[members, t] = 1.0 / (2 * len(members))
        W = rng.normal(size=(dim, n_tasks)) * 0.7
        b = rng.normal(size=n_tasks) * 0.3
        _, gW, gb = loss_and_grad(W, b, X, Y, om, n_tasks)

        def value(Wx, bx):
            return loss_and_grad(Wx, bx, X, Y, om, n_tasks, want_grad=False)[0]

        for idx in np.ndindex(dim, n_tasks):
            Wp, Wm = W.copy(), W.copy()
            Wp[idx] += h
            Wm[idx] -= h
            fd = (value(Wp, b) - value(Wm, b)) / (2 * h)
            rel = abs(gW[idx] - fd) / max(1e-8, abs(gW[idx]), abs(fd))
            worst = max(worst, rel)
        for j in range(n_tasks):
            bp, bm = b.copy(), b.copy()
            bp[j] += h
            bm[j] -= h
            fd = (value(W, bp) - value(W, bm)) / (2 * h)
            rel = abs(gb[j] - fd) / max(1e-8, abs(gb[j]), abs(fd))
            worst = max(worst, rel)
    assert worst < 1e-4, f"max relative gradient error {worst:.2e}"
    _report("Gradient check", True, f"max relative error {worst:.2e} < 1e-4")


# --------------------------------------------------------------------------
# LDA recovery and TV-distance property suite
# --------------------------------------------------------------------------

def test_lda_recovery_and_tv_properties():
    rng = np.random.default_rng(0)
    words = [f"w{i:03d}" for i in range(40)]
    docs = []
    for i in range(200):
        lo, hi = (0, 20) if i < 100 else (20, 40)
        body = " ".join(words[j] for j in rng.integers(lo, hi, 30))
        docs.append(make_doc(i, day(i % 5), body=body))
    corpus = CorpusIndex(docs)
    vocab = fit_vocabulary(corpus, min_df=1, max_df=1.0)
    model = fit_lda(corpus, vocab, n_topics=2, alpha=1.0, iterations=200, seed=0)
    cols_a = [vocab.index[w] for w in words[:20]]
    cols_b = [vocab.index[w] for w in words[20:]]
    mass_a = model.topic_word[:, cols_a].sum(axis=1)
    mass_b = model.topic_word[:, cols_b].sum(axis=1)
    k_a = int(np.argmax(mass_a))  # match topics by maximum overlap
    recovered = min(mass_a[k_a], mass_b[1 - k_a])
    assert recovered >= 0.9, f"support mass {recovered:.3f} < 0.9"

    rng = np.random.default_rng(123)
    for _ in range(1000):
        k = int(rng.integers(2, 16))
        p, q, r = rng.dirichlet(np.ones(k), size=3)
        d_pq = tv_distance(p, q)
        assert 0.0 <= d_pq <= 1.0
        assert d_pq == tv_distance(q, p)
        assert tv_distance(p, p) == 0.0
        assert d_pq <= tv_distance(p, r) + tv_distance(r, q) + 1e-12
    _report(
        "LDA recovery + TV properties", True,
        f"support mass {recovered:.3f} >= 0.9; 1000 random triples clean",
    )


# --------------------------------------------------------------------------
# Success-curve monotonicity and AUC range on randomized run sets
# --------------------------------------------------------------------------

def test_success_curve_properties():
    rng = np.random.default_rng(99)
    for _ in range(500):
        interval_days = int(rng.integers(1, 80))
        interval = (day(0), day(interval_days))
        n_events = int(rng.integers(1, 6))
        offsets = sorted(rng.integers(0, interval_days + 1, size=n_events).tolist())
        events = EventList(
            events=tuple((day(o), "e") for o in offsets), interval=interval
        )
        n_runs = int(rng.integers(1, 10))
        deltas = [
            delta_days(day(int(rng.integers(0, interval_days + 1))), events)
            for _ in range(n_runs)
        ]
        curve = success_curve_from_deltas(deltas, interval_days)
        assert np.all(np.diff(curve.rates) >= 0.0), "success curve not monotone"
        assert np.all((curve.rates >= 0.0) & (curve.rates <= 1.0))
        assert 0.0 <= curve.auc <= 1.0
        # predictions and events both lie inside the interval
        assert curve.rates[-1] == 1.0
    _report("Success-curve properties", True,
            "500 randomized run sets monotone with AUC in [0, 1]")


# --------------------------------------------------------------------------
# Benchmark-2 analog: category splice on a synthetic yearly corpus, L=60
# --------------------------------------------------------------------------

def test_benchmark2_analog(tmp_path):
    t0 = time.perf_counter()
    lexicon = make_lexicon(300)
    base = zipf_weights(300, 1.05)
    dist_a = base[np.random.default_rng(201).permutation(300)]
    dist_b = base[np.random.default_rng(202).permutation(300)]
    topics = {
        "alpha": TopicSpec("alpha", dist_a, doc_length=80, background_mix=0.4),
        "beta": TopicSpec("beta", dist_b, doc_length=80, background_mix=0.4),
    }
    interval = (dt.date(2015, 1, 1), dt.date(2015, 12, 31))
    span = (interval[0] - dt.timedelta(days=60), interval[1] + dt.timedelta(days=60))
    source = generate_category_corpus(lexicon, topics, span, per_day=5, seed=7,
                                      out_path=tmp_path / "cats.jsonl")
    change = dt.date(2015, 5, 7)
    bench = splice_categories(source, "alpha", "beta", change, interval, 7,
                              tmp_path / "spliced.jsonl")
    corpus = ingest(bench.corpus_path)
    grid = build_candidate_grid(corpus, interval, 60)
    pairs = segments(grid, corpus)
    vocab = fit_vocabulary(corpus, min_df=2, max_df=0.9)
    feats = tfidf_transform(corpus, vocab)
    events = EventList(events=((change, "induced"),), interval=interval)

    conf_records, lda_records = [], []
    for s in range(3):
        layout = build_tasks(pairs, corpus, split_seed=s)
        result = train(layout, feats, TrainConfig(seed=s, max_epochs=1500))
        pred = predict_changepoint(indicator(result.model, layout, feats))
        conf_records.append(RunRecord("splice", s, pred, delta_days(pred, events)))
        model = fit_lda(corpus, vocab, n_topics=20, iterations=83, seed=s)
        pred = predict_changepoint(lda_indicator(model, pairs))
        lda_records.append(RunRecord("splice", s, pred, delta_days(pred, events)))
    conf = aggregate(conf_records, interval_days=365)
    topics_report = aggregate(lda_records, interval_days=365)
    elapsed = time.perf_counter() - t0
    assert conf.mean_delta <= 5.0, f"confusion mean delta {conf.mean_delta:.2f} > 5"
    assert topics_report.mean_delta <= 5.0, (
        f"LDA mean delta {topics_report.mean_delta:.2f} > 5"
    )
    assert elapsed < 900.0, f"runtime {elapsed:.0f}s exceeds 15 min"
    _report(
        "Benchmark-2 analog", True,
        f"confusion delta {conf.mean_delta:.2f}, LDA delta "
        f"{topics_report.mean_delta:.2f} over 3 seeds ({elapsed:.0f}s)",
    )
