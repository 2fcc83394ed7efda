"""Corpus JSONL to EMB1 embedding export."""

from .cli import EmbedJob, embed_corpus, main, read_corpus_texts, write_emb1

__version__ = "0.1.0"
