"""Encode a corpus JSONL file with a pretrained sentence transformer and
write the vectors in the EMB1 binary interchange layout.

EMB1: magic ``EMB1``, u32-LE count, u32-LE dim, then per record a u16-LE
id byte length, the UTF-8 id bytes, and dim f32-LE values. A JSON manifest
written next to the output records the model name, dimension, count, and
any documents that were empty.
"""

from __future__ import annotations

import argparse
import json
import struct
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_MODEL = "sentence-transformers/all-distilroberta-v1"

EMB1_MAGIC = b"EMB1"


class CorpusFormatError(ValueError):
    """A corpus line could not be parsed."""


@dataclass(frozen=True)
class EmbedJob:
    corpus_path: str
    model_name: str
    out_path: str
    batch_size: int = 32


def read_corpus_texts(path: str | Path) -> list[tuple[str, str]]:
    """(id, text) pairs from a corpus JSONL file, title and body joined.

    Raises CorpusFormatError naming the offending line on bad input.
    """
    pairs: list[tuple[str, str]] = []
    seen: set[str] = set()
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc.msg})")
            try:
                doc_id = record["id"]
                text = f"{record['title']} {record['body']}".strip()
            except (TypeError, KeyError) as exc:
                raise CorpusFormatError(f"line {lineno}: missing field {exc}")
            if not isinstance(doc_id, str) or not doc_id:
                raise CorpusFormatError(f"line {lineno}: bad id")
            if doc_id in seen:
                raise CorpusFormatError(f"line {lineno}: duplicate id {doc_id!r}")
            seen.add(doc_id)
            pairs.append((doc_id, text))
    if not pairs:
        raise CorpusFormatError(f"{path}: no documents")
    return pairs


def write_emb1(path: str | Path, ids: list[str], vectors: np.ndarray) -> None:
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    count, dim = vectors.shape
    with Path(path).open("wb") as fh:
        fh.write(EMB1_MAGIC)
        fh.write(struct.pack("<II", count, dim))
        for doc_id, vec in zip(ids, vectors):
            raw = doc_id.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(vec.tobytes())


def embed_corpus(job: EmbedJob) -> dict:
    """Encode every document and write the EMB1 file plus its manifest.

    Returns the manifest dict. Vectors are stored as f32 regardless of the
    model's compute precision.
    """
    from sentence_transformers import SentenceTransformer

    pairs = read_corpus_texts(job.corpus_path)
    ids = [doc_id for doc_id, _ in pairs]
    texts = [text for _, text in pairs]
    empty_ids = [doc_id for doc_id, text in pairs if not text]

    model = SentenceTransformer(job.model_name)
    vectors = model.encode(
        texts,
        batch_size=job.batch_size,
        convert_to_numpy=True,
        show_progress_bar=False,
        normalize_embeddings=False,
    ).astype(np.float32)

    out_path = Path(job.out_path)
    write_emb1(out_path, ids, vectors)
    manifest = {
        "model": job.model_name,
        "dim": int(vectors.shape[1]),
        "count": int(vectors.shape[0]),
        "empty_ids": empty_ids,
        "corpus": str(job.corpus_path),
    }
    out_path.with_name(out_path.name + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
    )
    return manifest


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="embed",
        description="Encode a corpus JSONL into an EMB1 embedding file.",
    )
    parser.add_argument("--corpus", required=True, help="corpus JSONL path")
    parser.add_argument("--model", default=DEFAULT_MODEL,
                        help="sentence-transformers model name or local path")
    parser.add_argument("--out", required=True, help="EMB1 output path")
    parser.add_argument("--batch-size", type=int, default=32)
    args = parser.parse_args(argv)
    if args.batch_size < 1:
        print(f"error: batch-size must be >= 1, got {args.batch_size}",
              file=sys.stderr)
        return 2
    try:
        manifest = embed_corpus(
            EmbedJob(args.corpus, args.model, args.out, args.batch_size)
        )
    except CorpusFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # model load/download failures, I/O
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {manifest['count']} vectors of dim {manifest['dim']} to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
