"""Topic-model baseline: latent Dirichlet allocation fitted by collapsed
Gibbs sampling, per-segment topic distributions, and the topic-space
total-variation indicator.

The per-token full conditional is

    P(z_i = k | rest) ~ (n_dk + alpha) * (n_kw + beta) / (n_k + V beta),

and the reported document-topic and topic-word matrices are posterior
means over the last ceil(20%) of sweeps. Chains are deterministic per
seed via an explicit xorshift64* generator inside the sampling kernel.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit

from .confusion import IndicatorCurve
from .corpus import CorpusIndex
from .features import Vocabulary, tokenize
from .windows import SegmentPair

_MASK64 = (1 << 64) - 1


class LdaError(ValueError):
    """Invalid topic-model input."""


@dataclass(frozen=True)
class TopicModel:
    """Fitted LDA state: posterior-mean topic mixtures and word emissions."""

    n_topics: int
    topic_word: np.ndarray
    doc_topic: np.ndarray
    alpha: float
    beta: float
    iterations: int
    burn_in: int
    seed: int
    empty_docs: tuple[int, ...] = ()


@dataclass(frozen=True)
class SegmentTopicDist:
    """Mean topic distribution of each segment around one candidate."""

    candidate: dt.date
    p0: np.ndarray
    p1: np.ndarray


@njit(cache=True)
def _gibbs_sweep(doc_ids, word_ids, z, n_dk, n_kw, n_k, alpha, beta, state):
    # state is a 1-element uint64 array so the xorshift64* stream survives
    # between sweeps without round-tripping through Python integers
    K = n_k.shape[0]
    V = n_kw.shape[1]
    cum = np.empty(K)
    s = state[0]
    for i in range(doc_ids.shape[0]):
        d = doc_ids[i]
        w = word_ids[i]
        k = z[i]
        n_dk[d, k] -= 1
        n_kw[k, w] -= 1
        n_k[k] -= 1
        total = 0.0
        for kk in range(K):
            total += (
                (n_dk[d, kk] + alpha) * (n_kw[kk, w] + beta) / (n_k[kk] + V * beta)
            )
            cum[kk] = total
        s ^= s >> np.uint64(12)
        s ^= s << np.uint64(25)
        s ^= s >> np.uint64(27)
        mixed = s * np.uint64(2685821657736338717)
        u = (mixed >> np.uint64(11)) * (1.0 / 9007199254740992.0) * total
        knew = K - 1
        for kk in range(K):
            if u < cum[kk]:
                knew = kk
                break
        z[i] = knew
        n_dk[d, knew] += 1
        n_kw[knew, w] += 1
        n_k[knew] += 1
    state[0] = s


def _rng_state(seed: int) -> np.uint64:
    # splitmix64 of the seed; xorshift64* needs a nonzero state
    x = (seed ^ 0x9E3779B97F4A7C15) & _MASK64
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & _MASK64
    x ^= x >> 31
    return np.uint64(x or 1)


def fit_lda(
    corpus: CorpusIndex,
    vocab: Vocabulary,
    n_topics: int = 20,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 83,
    burn_in: int | None = None,
    seed: int = 0,
) -> TopicModel:
    """Fit LDA on every document of the corpus by collapsed Gibbs sampling.

    Parameters
    ----------
    n_topics : number of topics K (>= 1; K >= 2 for a meaningful model).
    alpha, beta : symmetric Dirichlet priors; alpha defaults to 50/K.
    iterations : total Gibbs sweeps.
    burn_in : sweeps discarded before averaging; defaults to all but the
        last ceil(20%) of ``iterations``.
    seed : chain seed; identical seeds give identical assignments.

    Documents with no in-vocabulary tokens get a uniform topic row and are
    listed in ``empty_docs``.
    """
    if n_topics < 1:
        raise LdaError(f"n_topics must be >= 1, got {n_topics}")
    if iterations < 1:
        raise LdaError(f"iterations must be >= 1, got {iterations}")
    if burn_in is None:
        burn_in = iterations - math.ceil(0.2 * iterations)
    if not 0 <= burn_in < iterations:
        raise LdaError(f"burn_in {burn_in} outside [0, {iterations})")
    if alpha is None:
        alpha = 50.0 / n_topics

    n_docs = len(corpus)
    V = len(vocab)
    doc_ids: list[int] = []
    word_ids: list[int] = []
    empty: list[int] = []
    for i, doc in enumerate(corpus.documents):
        toks = [vocab.index[t] for t in tokenize(doc.text) if t in vocab.index]
        if not toks:
            empty.append(i)
            continue
        doc_ids.extend([i] * len(toks))
        word_ids.extend(toks)

    d_arr = np.asarray(doc_ids, dtype=np.int32)
    w_arr = np.asarray(word_ids, dtype=np.int32)
    rng = np.random.default_rng(seed)
    z = rng.integers(0, n_topics, d_arr.shape[0]).astype(np.int32)

    n_dk = np.zeros((n_docs, n_topics), dtype=np.int32)
    n_kw = np.zeros((n_topics, V), dtype=np.int32)
    n_k = np.zeros(n_topics, dtype=np.int32)
    np.add.at(n_dk, (d_arr, z), 1)
    np.add.at(n_kw, (z, w_arr), 1)
    np.add.at(n_k, z, 1)

    doc_len = n_dk.sum(axis=1, keepdims=True).astype(float)
    theta_acc = np.zeros((n_docs, n_topics))
    phi_acc = np.zeros((n_topics, V))
    n_samples = 0
    state = np.array([_rng_state(seed)], dtype=np.uint64)
    for sweep in range(1, iterations + 1):
        _gibbs_sweep(
            d_arr, w_arr, z, n_dk, n_kw, n_k, float(alpha), float(beta), state
        )
        if sweep > burn_in:
            theta_acc += (n_dk + alpha) / (doc_len + n_topics * alpha)
            phi_acc += (n_kw + beta) / (n_k + V * beta)[:, None]
            n_samples += 1

    doc_topic = theta_acc / n_samples
    if empty:
        doc_topic[empty] = 1.0 / n_topics
    return TopicModel(
        n_topics=n_topics,
        topic_word=phi_acc / n_samples,
        doc_topic=doc_topic,
        alpha=float(alpha),
        beta=float(beta),
        iterations=iterations,
        burn_in=burn_in,
        seed=seed,
        empty_docs=tuple(empty),
    )


def segment_topic_dist(model: TopicModel, pair: SegmentPair) -> SegmentTopicDist:
    """Mean document-topic row over each of the pair's document sets."""
    return SegmentTopicDist(
        candidate=pair.candidate,
        p0=model.doc_topic[list(pair.before_docs)].mean(axis=0),
        p1=model.doc_topic[list(pair.after_docs)].mean(axis=0),
    )


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance, half the L1 distance between distributions."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise LdaError(f"shape mismatch: {p.shape} vs {q.shape}")
    for name, vec in (("p", p), ("q", q)):
        if (vec < 0).any() or abs(vec.sum() - 1.0) > 1e-6:
            raise LdaError(f"{name} is not a probability vector")
    return float(0.5 * np.abs(p - q).sum())


def lda_indicator(model: TopicModel, pairs: Sequence[SegmentPair]) -> IndicatorCurve:
    """Indicator curve of TV distances between segment topic distributions."""
    if not pairs:
        raise LdaError("no segment pairs supplied")
    values = np.array(
        [
            tv_distance(dist.p0, dist.p1)
            for dist in (segment_topic_dist(model, pair) for pair in pairs)
        ]
    )
    return IndicatorCurve(
        method="lda",
        candidates=tuple(p.candidate for p in pairs),
        values=values,
        raw_values=values.copy(),
        window=len(pairs[0].before),
        seed=model.seed,
    )


def save_topic_model(model: TopicModel, out_dir) -> None:
    """Dump topic-word and document-topic matrices as CSV plus metadata.

    The published streaming-inference settings "passes" and "chunk size"
    have no collapsed-Gibbs analog; the metadata records that mapping.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    np.savetxt(out / "topic_word.csv", model.topic_word, delimiter=",")
    np.savetxt(out / "doc_topic.csv", model.doc_topic, delimiter=",")
    meta = {
        "n_topics": model.n_topics,
        "alpha": model.alpha,
        "beta": model.beta,
        "iterations": model.iterations,
        "burn_in": model.burn_in,
        "seed": model.seed,
        "empty_docs": list(model.empty_docs),
        "parameter_mapping": {"passes": "burn_in", "chunk_size": None},
    }
    (out / "metadata.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8"
    )


def load_topic_model(in_dir) -> TopicModel:
    """Inverse of :func:`save_topic_model`."""
    src = Path(in_dir)
    meta = json.loads((src / "metadata.json").read_text(encoding="utf-8"))
    topic_word = np.loadtxt(src / "topic_word.csv", delimiter=",", ndmin=2)
    doc_topic = np.loadtxt(src / "doc_topic.csv", delimiter=",", ndmin=2)
    return TopicModel(
        n_topics=meta["n_topics"],
        topic_word=topic_word,
        doc_topic=doc_topic,
        alpha=meta["alpha"],
        beta=meta["beta"],
        iterations=meta["iterations"],
        burn_in=meta["burn_in"],
        seed=meta["seed"],
        empty_docs=tuple(meta["empty_docs"]),
    )
