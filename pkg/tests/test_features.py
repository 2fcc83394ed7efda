import math

import numpy as np
import pytest

from newsshift.corpus import CorpusIndex
from newsshift.features import (
    FeatureError,
    fit_vocabulary,
    load_embeddings,
    read_embeddings,
    tfidf_transform,
    tokenize,
    write_embeddings,
)

from conftest import day, make_doc


def two_doc_corpus():
    return CorpusIndex(
        [make_doc(0, day(0), body="aa bb"), make_doc(1, day(1), body="bb cc")]
    )


# ------------------------------------------------------------- tokenizer

def test_tokenize_lowercase_split_short():
    assert tokenize("Hello, WORLD! x y2 a_b it's") == ["hello", "world", "y2", "it"]


def test_tokenize_unicode():
    assert tokenize("Café déjà-vu 北京 12") == ["café", "déjà", "vu", "北京", "12"]


# ------------------------------------------------------------ vocabulary

def test_fit_vocabulary_counts():
    vocab = fit_vocabulary(two_doc_corpus(), min_df=1, max_df=1.0)
    assert set(vocab.index) == {"aa", "bb", "cc"}
    assert vocab.doc_freq == {"aa": 1, "bb": 2, "cc": 1}
    assert vocab.total_documents == 2


def test_fit_vocabulary_min_df():
    vocab = fit_vocabulary(two_doc_corpus(), min_df=2, max_df=1.0)
    assert set(vocab.index) == {"bb"}


def test_fit_vocabulary_max_df():
    vocab = fit_vocabulary(two_doc_corpus(), min_df=1, max_df=0.5)
    assert set(vocab.index) == {"aa", "cc"}


def test_fit_vocabulary_empty_errors():
    with pytest.raises(FeatureError, match="empty"):
        fit_vocabulary(two_doc_corpus(), min_df=3, max_df=1.0)


def test_vocabulary_indices_dense_sorted():
    vocab = fit_vocabulary(two_doc_corpus(), min_df=1, max_df=1.0)
    assert sorted(vocab.index.values()) == [0, 1, 2]
    assert vocab.terms == sorted(vocab.terms)


# ---------------------------------------------------------------- TF-IDF

def test_tfidf_single_document_is_normalized_counts():
    # N = df = 1 for every term, so idf = ln(2/2) + 1 = 1
    corpus = CorpusIndex([make_doc(0, day(0), body="aa bb bb")])
    vocab = fit_vocabulary(corpus, min_df=1, max_df=1.0)
    mat = tfidf_transform(corpus, vocab)
    counts = np.array([1.0, 2.0])
    expected = counts / np.linalg.norm(counts)
    np.testing.assert_allclose(mat.rows[0], expected, rtol=0, atol=1e-15)


def test_tfidf_two_doc_fixture_hand_values():
    # independent hand evaluation of idf(t) = ln((1+N)/(1+df)) + 1, L2 rows
    corpus = two_doc_corpus()
    vocab = fit_vocabulary(corpus, min_df=1, max_df=1.0)
    mat = tfidf_transform(corpus, vocab)
    idf_rare = math.log(3.0 / 2.0) + 1.0   # aa, cc: df=1, N=2
    idf_common = math.log(3.0 / 3.0) + 1.0  # bb: df=2
    row0 = np.array([idf_rare, idf_common, 0.0])
    row1 = np.array([0.0, idf_common, idf_rare])
    row0 /= math.sqrt((row0 ** 2).sum())
    row1 /= math.sqrt((row1 ** 2).sum())
    np.testing.assert_allclose(mat.rows[0], row0, rtol=0, atol=1e-12)
    np.testing.assert_allclose(mat.rows[1], row1, rtol=0, atol=1e-12)


def test_tfidf_empty_document_flagged():
    corpus = CorpusIndex(
        [make_doc(0, day(0), body="aa bb"), make_doc(1, day(1), body="zz qq")]
    )
    vocab = fit_vocabulary(CorpusIndex([make_doc(9, day(0), body="aa bb")]),
                           min_df=1, max_df=1.0)
    mat = tfidf_transform(corpus, vocab)
    assert mat.empty_rows == (1,)
    assert np.all(mat.rows[1] == 0.0)


def test_tfidf_row_norms():
    corpus = CorpusIndex(
        [make_doc(i, day(i), body=f"aa bb w{i:02d} w{i:02d}") for i in range(6)]
    )
    vocab = fit_vocabulary(corpus, min_df=1, max_df=1.0)
    mat = tfidf_transform(corpus, vocab)
    norms = np.linalg.norm(mat.rows, axis=1)
    assert np.all(np.abs(norms - 1.0) < 1e-9)


def test_tfidf_deterministic_bit_for_bit():
    corpus = two_doc_corpus()
    a = tfidf_transform(corpus, fit_vocabulary(corpus, 1, 1.0))
    b = tfidf_transform(corpus, fit_vocabulary(corpus, 1, 1.0))
    assert np.array_equal(a.rows, b.rows)


def test_vocab_transfers_across_corpora():
    vocab = fit_vocabulary(two_doc_corpus(), min_df=1, max_df=1.0)
    other = CorpusIndex([make_doc(5, day(0), body="bb dd unseen")])
    mat = tfidf_transform(other, vocab)
    assert mat.rows.shape == (1, 3)
    assert mat.rows[0, vocab.index["bb"]] > 0.0


# -------------------------------------------------------------- EMB1 I/O

def three_doc_corpus():
    return CorpusIndex([make_doc(i, day(i)) for i in range(3)])


def test_emb1_round_trip(tmp_path):
    corpus = three_doc_corpus()
    vecs = np.arange(12, dtype=np.float32).reshape(3, 4) / 7.0
    path = tmp_path / "v.emb1"
    write_embeddings(path, [d.id for d in corpus.documents], vecs)
    mat = load_embeddings(path, corpus)
    assert mat.rows.shape == (3, 4)
    assert mat.kind == "embedding"
    np.testing.assert_array_equal(mat.rows.astype(np.float32), vecs)


def test_emb1_layout_bytes(tmp_path):
    # bit-exact layout: magic, u32 count, u32 dim, then (u16 len, id, f32s)
    path = tmp_path / "v.emb1"
    write_embeddings(path, ["ab"], np.array([[1.0]], dtype=np.float32))
    raw = path.read_bytes()
    assert raw[:4] == b"EMB1"
    assert raw[4:8] == (1).to_bytes(4, "little")
    assert raw[8:12] == (1).to_bytes(4, "little")
    assert raw[12:14] == (2).to_bytes(2, "little")
    assert raw[14:16] == b"ab"
    assert raw[16:20] == np.float32(1.0).tobytes()
    assert len(raw) == 20


def test_emb1_missing_id(tmp_path):
    corpus = three_doc_corpus()
    path = tmp_path / "v.emb1"
    write_embeddings(path, ["doc-00000", "doc-00001"], np.zeros((2, 4), np.float32))
    with pytest.raises(FeatureError, match="doc-00002.*absent"):
        load_embeddings(path, corpus)


def test_emb1_truncation(tmp_path):
    path = tmp_path / "v.emb1"
    write_embeddings(path, ["a1", "b2", "c3"], np.zeros((3, 4), np.float32))
    data = path.read_bytes()
    # claim 3 records but drop the last one's payload
    path.write_bytes(data[:-10])
    with pytest.raises(FeatureError, match="truncated"):
        read_embeddings(path)


def test_emb1_bad_magic(tmp_path):
    path = tmp_path / "v.emb1"
    path.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(FeatureError, match="magic"):
        read_embeddings(path)


def test_emb1_trailing_bytes(tmp_path):
    path = tmp_path / "v.emb1"
    write_embeddings(path, ["a1"], np.zeros((1, 2), np.float32))
    path.write_bytes(path.read_bytes() + b"xx")
    with pytest.raises(FeatureError, match="trailing"):
        read_embeddings(path)


def test_emb1_non_finite_named_row(tmp_path):
    corpus = three_doc_corpus()
    vecs = np.zeros((3, 2), np.float32)
    vecs[1, 0] = np.nan
    path = tmp_path / "v.emb1"
    write_embeddings(path, [d.id for d in corpus.documents], vecs)
    with pytest.raises(FeatureError, match="non-finite.*record 1"):
        load_embeddings(path, corpus)


def test_emb1_duplicate_id(tmp_path):
    path = tmp_path / "v.emb1"
    write_embeddings(path, ["a1", "a1"], np.zeros((2, 2), np.float32))
    with pytest.raises(FeatureError, match="duplicate"):
        load_embeddings(path, three_doc_corpus())


def test_emb1_extra_ids_ignored(tmp_path):
    corpus = three_doc_corpus()
    ids = [d.id for d in corpus.documents] + ["spare"]
    path = tmp_path / "v.emb1"
    write_embeddings(path, ids, np.ones((4, 2), np.float32))
    mat = load_embeddings(path, corpus)
    assert mat.rows.shape == (3, 2)


def test_emb1_unicode_ids(tmp_path):
    path = tmp_path / "v.emb1"
    write_embeddings(path, ["día-1"], np.ones((1, 3), np.float32))
    ids, vecs = read_embeddings(path)
    assert ids == ["día-1"]
    assert vecs.shape == (1, 3)
