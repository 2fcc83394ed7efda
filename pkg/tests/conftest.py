import datetime as dt

import pytest

from newsshift.corpus import CorpusIndex, Document, write_corpus

D0 = dt.date(2021, 3, 1)


def day(offset: int) -> dt.date:
    return D0 + dt.timedelta(days=offset)


def make_doc(i: int, date: dt.date, body: str = "alpha beta gamma",
             category: str = "news", title: str = "") -> Document:
    return Document(id=f"doc-{i:05d}", date=date, category=category,
                    title=title, body=body)


def daily_corpus(n_days: int, per_day: int, start: dt.date = D0,
                 body: str = "alpha beta gamma") -> CorpusIndex:
    """Gap-free corpus with ``per_day`` documents on each of ``n_days`` days."""
    docs = []
    i = 0
    for d in range(n_days):
        for _ in range(per_day):
            docs.append(make_doc(i, start + dt.timedelta(days=d), body=body))
            i += 1
    return CorpusIndex(docs)


@pytest.fixture
def corpus_file(tmp_path):
    """Canonical 3-document JSONL file on 3 consecutive days."""
    docs = [make_doc(i, day(i), body=f"word{i} text body") for i in range(3)]
    path = tmp_path / "corpus.jsonl"
    write_corpus(docs, path)
    return path
