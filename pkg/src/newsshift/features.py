"""Document vectorization: a native TF-IDF vectorizer and an EMB1 loader.

Tokenization is Unicode-lowercase, split on non-alphanumeric runs, tokens
shorter than 2 characters dropped. TF-IDF uses the smoothed formula
idf(t) = ln((1+N)/(1+df(t))) + 1 with L2-normalized rows.

EMB1 is the binary interchange format for externally produced embeddings:
magic ``EMB1``, u32-LE count, u32-LE dim, then per record a u16-LE id byte
length, the UTF-8 id bytes, and dim f32-LE values.
"""

from __future__ import annotations

import math
import os
import re
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import CorpusIndex

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

EMB1_MAGIC = b"EMB1"


class FeatureError(ValueError):
    """Invalid vectorizer input or a malformed embedding file."""


def tokenize(text: str) -> list[str]:
    """Lowercased alphanumeric tokens of length >= 2."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= 2]


@dataclass(frozen=True)
class Vocabulary:
    """Term -> dense column index with document frequencies."""

    index: dict[str, int]
    doc_freq: dict[str, int]
    total_documents: int

    def __len__(self) -> int:
        return len(self.index)

    @property
    def terms(self) -> list[str]:
        out = [""] * len(self.index)
        for term, i in self.index.items():
            out[i] = term
        return out


@dataclass(frozen=True)
class FeatureMatrix:
    """One numeric row per document, aligned to corpus document order.

    ``empty_rows`` flags documents that had no in-vocabulary terms (their
    rows are exactly zero).
    """

    rows: np.ndarray
    dim: int
    kind: str
    empty_rows: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.rows.ndim != 2 or self.rows.shape[1] != self.dim:
            raise FeatureError(
                f"rows shape {self.rows.shape} does not match dim {self.dim}"
            )
        if not np.isfinite(self.rows).all():
            raise FeatureError("feature matrix contains non-finite values")


def fit_vocabulary(
    corpus: CorpusIndex, min_df: int = 2, max_df: float = 0.9
) -> Vocabulary:
    """Fit a vocabulary keeping terms with document frequency in
    [min_df, max_df * N] (both bounds inclusive).

    Column indices are assigned in sorted term order so fitting is
    deterministic. Raises FeatureError if nothing survives pruning.
    """
    n_docs = len(corpus)
    counts: dict[str, int] = {}
    for doc in corpus.documents:
        for term in set(tokenize(doc.text)):
            counts[term] = counts.get(term, 0) + 1
    ceiling = max_df * n_docs
    kept = sorted(t for t, c in counts.items() if min_df <= c <= ceiling)
    if not kept:
        raise FeatureError(
            f"vocabulary empty after pruning (min_df={min_df}, max_df={max_df})"
        )
    return Vocabulary(
        index={t: i for i, t in enumerate(kept)},
        doc_freq={t: counts[t] for t in kept},
        total_documents=n_docs,
    )


def tfidf_transform(corpus: CorpusIndex, vocab: Vocabulary) -> FeatureMatrix:
    """TF-IDF rows for every document under a fitted vocabulary.

    Unknown terms are ignored, so a vocabulary fitted on one corpus
    transforms another without error. Documents with no in-vocabulary
    terms get a zero row and are flagged in ``empty_rows``.
    """
    n_docs = len(corpus)
    V = len(vocab)
    n_fit = vocab.total_documents
    idf = np.empty(V)
    for term, j in vocab.index.items():
        idf[j] = math.log((1.0 + n_fit) / (1.0 + vocab.doc_freq[term])) + 1.0
    rows = np.zeros((n_docs, V))
    empty = []
    for i, doc in enumerate(corpus.documents):
        for term in tokenize(doc.text):
            j = vocab.index.get(term)
            if j is not None:
                rows[i, j] += 1.0
        rows[i] *= idf
        norm = np.linalg.norm(rows[i])
        if norm > 0.0:
            rows[i] /= norm
        else:
            empty.append(i)
    return FeatureMatrix(rows=rows, dim=V, kind="tfidf", empty_rows=tuple(empty))


def write_embeddings(
    path: str | os.PathLike, ids: Sequence[str], vectors: np.ndarray
) -> None:
    """Write vectors in the EMB1 binary layout (little-endian, f32)."""
    vectors = np.asarray(vectors, dtype=np.float32)
    if vectors.ndim != 2 or vectors.shape[0] != len(ids):
        raise FeatureError("ids and vectors are misaligned")
    count, dim = vectors.shape
    with Path(path).open("wb") as fh:
        fh.write(EMB1_MAGIC)
        fh.write(struct.pack("<II", count, dim))
        for doc_id, vec in zip(ids, vectors):
            raw = doc_id.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise FeatureError(f"id too long for EMB1: {doc_id[:40]}...")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(vec.tobytes())


def read_embeddings(path: str | os.PathLike) -> tuple[list[str], np.ndarray]:
    """Parse an EMB1 file into (ids, float32 matrix), validating the layout."""
    data = Path(path).read_bytes()
    if data[:4] != EMB1_MAGIC:
        raise FeatureError(f"{path}: not an EMB1 file (bad magic)")
    if len(data) < 12:
        raise FeatureError(f"{path}: truncated header")
    count, dim = struct.unpack_from("<II", data, 4)
    ids: list[str] = []
    vectors = np.empty((count, dim), dtype=np.float32)
    off = 12
    vec_bytes = 4 * dim
    for r in range(count):
        if off + 2 > len(data):
            raise FeatureError(f"{path}: truncated at record {r} (expected {count})")
        (id_len,) = struct.unpack_from("<H", data, off)
        off += 2
        if off + id_len + vec_bytes > len(data):
            raise FeatureError(f"{path}: truncated at record {r} (expected {count})")
        ids.append(data[off : off + id_len].decode("utf-8"))
        off += id_len
        vectors[r] = np.frombuffer(data, dtype="<f4", count=dim, offset=off)
        off += vec_bytes
    if off != len(data):
        raise FeatureError(f"{path}: {len(data) - off} trailing bytes after payload")
    return ids, vectors


def load_embeddings(path: str | os.PathLike, corpus: CorpusIndex) -> FeatureMatrix:
    """Load an EMB1 file and align rows to corpus document order.

    Every corpus id must be present in the file; extra vectors are ignored.
    Raises FeatureError on missing ids, duplicate ids, layout violations,
    or non-finite values (naming the row).
    """
    ids, vectors = read_embeddings(path)
    by_id: dict[str, int] = {}
    for r, doc_id in enumerate(ids):
        if doc_id in by_id:
            raise FeatureError(f"{path}: duplicate id {doc_id!r}")
        by_id[doc_id] = r
    dim = vectors.shape[1]
    rows = np.empty((len(corpus), dim))
    for i, doc in enumerate(corpus.documents):
        r = by_id.get(doc.id)
        if r is None:
            raise FeatureError(f"id {doc.id!r} absent from embedding file {path}")
        if not np.isfinite(vectors[r]).all():
            raise FeatureError(f"{path}: non-finite value in record {r} (id {doc.id!r})")
        rows[i] = vectors[r]
    return FeatureMatrix(rows=rows, dim=dim, kind="embedding")
