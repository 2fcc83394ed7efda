"""Synthetic benchmark corpora with known induced changepoints.

Two construction schemes: ``topic-switch`` samples mixture-of-unigram
articles and swaps the topic the day after the change date, and
``category-splice`` rewrites a real two-category corpus so one category's
articles run up to the change date and the other's take over after it.
The change date itself always belongs to the before-regime, matching the
date <= t* window convention, so a perfect detector scores delta = 0.

Every generated corpus is written in the canonical JSONL form together
with a ``<name>.manifest.json`` sidecar recording the scheme, the true
changepoint, the seed, and the generation parameters.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .corpus import CorpusError, CorpusIndex, Document, write_corpus


@dataclass(frozen=True)
class TopicSpec:
    """Unigram word distribution plus document shape parameters.

    Tokens are drawn i.i.d. from the mixture
    ``(1 - background_mix) * word_distribution + background_mix * background``
    where the background distribution is shared across topics.
    """

    name: str
    word_distribution: np.ndarray
    doc_length: int = 60
    background_mix: float = 0.5

    def __post_init__(self):
        w = np.asarray(self.word_distribution, dtype=float)
        if abs(w.sum() - 1.0) > 1e-9 or (w < 0).any():
            raise ValueError(f"topic {self.name!r}: word distribution not normalized")
        if not 0.0 <= self.background_mix < 1.0:
            raise ValueError(f"topic {self.name!r}: background_mix outside [0, 1)")


@dataclass(frozen=True)
class SyntheticLexicon:
    """Shared synthetic word list and background distribution."""

    words: tuple[str, ...]
    background: np.ndarray


@dataclass(frozen=True)
class InducedBenchmark:
    """Descriptor of a generated benchmark corpus."""

    corpus_path: str
    true_changepoint: dt.date
    scheme: str
    interval: tuple[dt.date, dt.date]
    per_day: int
    seed: int


def make_lexicon(size: int) -> SyntheticLexicon:
    """Lexicon of ``size`` synthetic words with a uniform background."""
    if size < 2:
        raise ValueError(f"lexicon size must be >= 2, got {size}")
    return SyntheticLexicon(
        words=tuple(f"w{i:04d}" for i in range(size)),
        background=np.full(size, 1.0 / size),
    )


def zipf_weights(n: int, exponent: float = 1.1) -> np.ndarray:
    """Normalized 1/rank**exponent weights for n ranks."""
    w = 1.0 / np.arange(1, n + 1, dtype=float) ** exponent
    return w / w.sum()


def disjoint_topics(
    lexicon: SyntheticLexicon,
    seed: int,
    doc_length: int = 60,
    background_mix: float = 0.5,
    exponent: float = 1.1,
) -> tuple[TopicSpec, TopicSpec]:
    """Two topics with disjoint supports over halves of a shuffled lexicon."""
    V = len(lexicon.words)
    perm = np.random.default_rng([seed, 101]).permutation(V)
    half = V // 2
    dists = []
    for lo, hi in ((0, half), (half, 2 * half)):
        d = np.zeros(V)
        d[perm[lo:hi]] = zipf_weights(hi - lo, exponent)
        dists.append(d)
    return (
        TopicSpec("topic-a", dists[0], doc_length, background_mix),
        TopicSpec("topic-b", dists[1], doc_length, background_mix),
    )


def _sample_body(rng: np.random.Generator, lexicon: SyntheticLexicon, topic: TopicSpec) -> str:
    mixture = (
        1.0 - topic.background_mix
    ) * topic.word_distribution + topic.background_mix * lexicon.background
    length = max(1, int(rng.poisson(topic.doc_length)))
    idx = rng.choice(len(lexicon.words), size=length, p=mixture)
    return " ".join(lexicon.words[i] for i in idx)


def _manifest_path(corpus_path: Path) -> Path:
    return corpus_path.with_name(corpus_path.name + ".manifest.json")


def _write_manifest(corpus_path: Path, bench: InducedBenchmark, parameters: dict) -> None:
    payload = {
        "scheme": bench.scheme,
        "true_changepoint": bench.true_changepoint.isoformat(),
        "seed": bench.seed,
        "parameters": parameters,
    }
    _manifest_path(corpus_path).write_text(
        json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8"
    )


def load_manifest(corpus_path: str | os.PathLike) -> dict:
    """Read the sidecar manifest of a generated benchmark corpus."""
    return json.loads(_manifest_path(Path(corpus_path)).read_text(encoding="utf-8"))


def generate_topic_switch(
    lexicon: SyntheticLexicon,
    topic_a: TopicSpec,
    topic_b: TopicSpec,
    interval: tuple[dt.date, dt.date],
    change_date: dt.date,
    per_day: int,
    margin_days: int,
    seed: int,
    out_path: str | os.PathLike,
    per_day_jitter: int = 0,
) -> InducedBenchmark:
    """Generate a topic-switch benchmark corpus.

    ``per_day`` articles are written for every calendar day from
    ``margin_days`` before the interval to ``margin_days`` after it; days
    up to and including ``change_date`` sample from ``topic_a``, later days
    from ``topic_b``. ``per_day_jitter`` varies the daily article count
    uniformly by up to that many documents (real streams are uneven;
    default is the constant count). Per-day RNG streams are derived from
    ``seed`` and the day, so generation order does not affect the output.
    """
    start, end = interval
    if not start <= change_date <= end:
        raise ValueError(f"change date {change_date} outside interval {start}..{end}")
    if per_day < 1:
        raise ValueError(f"per_day must be >= 1, got {per_day}")
    if per_day_jitter < 0:
        raise ValueError(f"per_day_jitter must be >= 0, got {per_day_jitter}")
    out_path = Path(out_path)
    docs: list[Document] = []
    day = start - dt.timedelta(days=margin_days)
    last = end + dt.timedelta(days=margin_days)
    while day <= last:
        rng = np.random.default_rng([seed, day.toordinal()])
        topic = topic_a if day <= change_date else topic_b
        count = per_day
        if per_day_jitter:
            count = max(1, per_day + int(rng.integers(-per_day_jitter,
                                                      per_day_jitter + 1)))
        for j in range(count):
            docs.append(
                Document(
                    id=f"ts-{day.isoformat()}-{j:03d}",
                    date=day,
                    category=topic.name,
                    title="",
                    body=_sample_body(rng, lexicon, topic),
                )
            )
        day += dt.timedelta(days=1)
    write_corpus(docs, out_path)
    bench = InducedBenchmark(
        corpus_path=str(out_path),
        true_changepoint=change_date,
        scheme="topic-switch",
        interval=interval,
        per_day=per_day,
        seed=seed,
    )
    _write_manifest(
        out_path,
        bench,
        {
            "interval": [start.isoformat(), end.isoformat()],
            "per_day": per_day,
            "per_day_jitter": per_day_jitter,
            "margin_days": margin_days,
            "lexicon_size": len(lexicon.words),
            "topic_a": topic_a.name,
            "topic_b": topic_b.name,
            "doc_length": topic_a.doc_length,
            "background_mix": topic_a.background_mix,
        },
    )
    return bench


def generate_category_corpus(
    lexicon: SyntheticLexicon,
    topics: Mapping[str, TopicSpec],
    span: tuple[dt.date, dt.date],
    per_day: int,
    seed: int,
    out_path: str | os.PathLike,
) -> CorpusIndex:
    """Multi-category synthetic corpus: ``per_day`` articles per category
    per calendar day over ``span``, each category sampling its own topic.

    Useful as raw material for :func:`splice_categories`.
    """
    start, end = span
    docs: list[Document] = []
    day = start
    while day <= end:
        for c, (cat, topic) in enumerate(sorted(topics.items())):
            rng = np.random.default_rng([seed, day.toordinal(), c])
            for j in range(per_day):
                docs.append(
                    Document(
                        id=f"cc-{cat}-{day.isoformat()}-{j:03d}",
                        date=day,
                        category=cat,
                        title="",
                        body=_sample_body(rng, lexicon, topic),
                    )
                )
        day += dt.timedelta(days=1)
    write_corpus(docs, out_path)
    return CorpusIndex(docs)


def splice_categories(
    corpus: CorpusIndex,
    category_a: str,
    category_b: str,
    change_date: dt.date,
    interval: tuple[dt.date, dt.date],
    seed: int,
    out_path: str | os.PathLike,
) -> InducedBenchmark:
    """Splice two categories of a real corpus at ``change_date``.

    The output carries category A's documents on every date up to and
    including ``change_date`` and category B's afterwards, spanning the
    full date grid of the input corpus. Category labels are stripped from
    the output records. Both categories must have documents on every
    data-bearing date.
    """
    start, end = interval
    if not start <= change_date <= end:
        raise ValueError(f"change date {change_date} outside interval {start}..{end}")
    for date in corpus.date_grid:
        present = {corpus.documents[i].category for i in corpus.by_date[date]}
        for cat in {category_a, category_b}:
            if cat not in present:
                raise CorpusError(f"category {cat!r} has no documents on {date}")
    out_path = Path(out_path)
    docs: list[Document] = []
    for date in corpus.date_grid:
        want = category_a if date <= change_date else category_b
        for i in corpus.by_date[date]:
            doc = corpus.documents[i]
            if doc.category == want:
                docs.append(dataclasses.replace(doc, category=""))
    write_corpus(docs, out_path)
    bench = InducedBenchmark(
        corpus_path=str(out_path),
        true_changepoint=change_date,
        scheme="category-splice",
        interval=interval,
        per_day=0,
        seed=seed,
    )
    _write_manifest(
        out_path,
        bench,
        {
            "interval": [start.isoformat(), end.isoformat()],
            "category_a": category_a,
            "category_b": category_b,
        },
    )
    return bench


def shuffle_dates(corpus: CorpusIndex, seed: int) -> CorpusIndex:
    """Null-hypothesis fixture: permute article contents uniformly across
    date slots, preserving per-date document counts."""
    n = len(corpus)
    perm = np.random.default_rng(seed).permutation(n)
    docs = [
        dataclasses.replace(corpus.documents[perm[i]], date=corpus.documents[i].date)
        for i in range(n)
    ]
    return CorpusIndex(docs)
