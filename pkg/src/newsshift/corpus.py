"""Dated document corpora: JSONL ingestion, date indexing, candidate grids,
and a fetch client for The Guardian content API.

The canonical on-disk record is one JSON object per line with exactly the
fields ``id``, ``date`` (ISO-8601 ``YYYY-MM-DD``), ``category``, ``title``
and ``body``, UTF-8 encoded. :func:`write_corpus` emits this form and
:func:`ingest` round-trips it byte-identically.
"""

from __future__ import annotations

import datetime as dt
import json
import os
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import requests

RECORD_FIELDS = ("id", "date", "category", "title", "body")

GUARDIAN_API_URL = "https://content.guardianapis.com/search"
GUARDIAN_API_KEY_ENV = "GUARDIAN_API_KEY"

# Word-count threshold used when reproducing the published Guardian
# filtering; benchmarks use short synthetic articles, so plain ingest()
# applies no filter unless asked.
GUARDIAN_MIN_WORDS = 1000


class CorpusError(ValueError):
    """Malformed corpus input or an invalid corpus operation."""


class GuardianFetchError(RuntimeError):
    """Guardian API request failed after exhausting retries."""


class GuardianAuthError(GuardianFetchError):
    """Guardian API rejected the key; carries the response verbatim."""


@dataclass(frozen=True)
class Document:
    """One dated text item.

    ``title`` and ``body`` concatenate to the analyzed content; ``id`` must
    be unique within a corpus.
    """

    id: str
    date: dt.date
    category: str
    title: str
    body: str

    @property
    def text(self) -> str:
        return f"{self.title} {self.body}"

    def word_count(self) -> int:
        """Whitespace-split word count of the body."""
        return len(self.body.split())

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "date": self.date.isoformat(),
            "category": self.category,
            "title": self.title,
            "body": self.body,
        }


class CorpusIndex:
    """Immutable ordered document collection indexed by date.

    Attributes
    ----------
    documents : tuple of Document
        All documents in ingest order.
    by_date : mapping date -> tuple of int
        Indices into ``documents`` for each date with at least one document.
    date_grid : tuple of date
        Strictly increasing dates having >= 1 document.
    """

    def __init__(self, documents: Sequence[Document]):
        docs = tuple(documents)
        if not docs:
            raise CorpusError("corpus is empty")
        seen: set[str] = set()
        by_date: dict[dt.date, list[int]] = {}
        for i, doc in enumerate(docs):
            if doc.id in seen:
                raise CorpusError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)
            by_date.setdefault(doc.date, []).append(i)
        self.documents = docs
        self.by_date: Mapping[dt.date, tuple[int, ...]] = {
            d: tuple(ix) for d, ix in sorted(by_date.items())
        }
        self.date_grid: tuple[dt.date, ...] = tuple(sorted(by_date))

    def __len__(self) -> int:
        return len(self.documents)

    def docs_on(self, date: dt.date) -> tuple[Document, ...]:
        return tuple(self.documents[i] for i in self.by_date.get(date, ()))

    @property
    def span(self) -> tuple[dt.date, dt.date]:
        return self.date_grid[0], self.date_grid[-1]


@dataclass(frozen=True)
class CandidateGrid:
    """Candidate changepoint dates plus the margin-extended date grid.

    ``full_grid`` contains the candidates and the ``margin`` nearest
    data-bearing dates on each side, all sorted and duplicate-free.
    """

    candidates: tuple[dt.date, ...]
    margin: int
    full_grid: tuple[dt.date, ...]


def _parse_record(line: str, lineno: int) -> Document:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise CorpusError(f"line {lineno}: record is not a JSON object")
    missing = [k for k in RECORD_FIELDS if k not in obj]
    if missing:
        raise CorpusError(f"line {lineno}: missing field(s) {', '.join(missing)}")
    extra = [k for k in obj if k not in RECORD_FIELDS]
    if extra:
        raise CorpusError(f"line {lineno}: unknown field(s) {', '.join(extra)}")
    for key in ("id", "date", "category", "title", "body"):
        if not isinstance(obj[key], str):
            raise CorpusError(f"line {lineno}: field {key!r} must be a string")
    if not obj["id"]:
        raise CorpusError(f"line {lineno}: empty id")
    try:
        date = dt.date.fromisoformat(obj["date"])
    except ValueError:
        raise CorpusError(
            f"line {lineno}: invalid date {obj['date']!r} (expected YYYY-MM-DD)"
        ) from None
    return Document(obj["id"], date, obj["category"], obj["title"], obj["body"])


def ingest(
    path: str | os.PathLike,
    min_words: int = 0,
    categories: Iterable[str] | None = None,
) -> CorpusIndex:
    """Read a JSONL corpus file, validate, filter, and index it.

    Parameters
    ----------
    path : path to a UTF-8 JSONL file, one record per line.
    min_words : keep only documents whose body has at least this many
        whitespace-separated words (0 disables; the published Guardian
        pipeline uses :data:`GUARDIAN_MIN_WORDS`).
    categories : optional allowlist of category labels.

    Raises
    ------
    CorpusError
        On a malformed line (naming the line number), a duplicate id
        (naming the id), or when no document survives the filters.
    """
    path = Path(path)
    allow = set(categories) if categories is not None else None
    surviving: list[Document] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            doc = _parse_record(line, lineno)
            if doc.id in seen:
                raise CorpusError(f"line {lineno}: duplicate document id {doc.id!r}")
            seen.add(doc.id)
            if min_words and doc.word_count() < min_words:
                continue
            if allow is not None and doc.category not in allow:
                continue
            surviving.append(doc)
    if not surviving:
        raise CorpusError(f"no documents survived ingest filters in {path}")
    return CorpusIndex(surviving)


def write_corpus(documents: Iterable[Document], path: str | os.PathLike) -> int:
    """Write documents in the canonical JSONL form; returns the count."""
    n = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc in documents:
            fh.write(json.dumps(doc.to_record(), ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")
            n += 1
    return n


def build_candidate_grid(
    corpus: CorpusIndex, interval: tuple[dt.date, dt.date], margin: int
) -> CandidateGrid:
    """Build the candidate set for ``interval`` plus ``margin`` data-bearing
    dates on each side.

    Candidates are all calendar days inside the closed interval that carry
    data. Construction fails when fewer than ``margin`` data-bearing dates
    exist strictly before the first candidate or strictly after the last.
    """
    start, end = interval
    if margin < 1:
        raise ValueError(f"margin L must be >= 1, got {margin}")
    if start > end:
        raise ValueError(f"empty interval: {start} > {end}")
    lo, hi = corpus.span
    if start < lo or end > hi:
        raise ValueError(
            f"interval {start}..{end} outside corpus span {lo}..{hi}"
        )
    grid = corpus.date_grid
    candidates = tuple(d for d in grid if start <= d <= end)
    if not candidates:
        raise CorpusError(f"no data-bearing dates inside interval {start}..{end}")
    before = [d for d in grid if d < candidates[0]]
    after = [d for d in grid if d > candidates[-1]]
    missing = []
    if len(before) < margin:
        missing.append(f"{margin - len(before)} margin dates missing before {candidates[0]}")
    if len(after) < margin:
        missing.append(f"{margin - len(after)} margin dates missing after {candidates[-1]}")
    if missing:
        raise CorpusError("; ".join(missing))
    full = tuple(before[-margin:]) + candidates + tuple(after[:margin])
    return CandidateGrid(candidates=candidates, margin=margin, full_grid=full)


def _guardian_record(item: dict) -> Document:
    fields = item.get("fields") or {}
    return Document(
        id=item["id"],
        date=dt.date.fromisoformat(item["webPublicationDate"][:10]),
        category=item.get("sectionName", ""),
        title=fields.get("headline") or item.get("webTitle", ""),
        body=fields.get("bodyText") or "",
    )


def _cache_key(category: str, start: dt.date, end: dt.date, page: int) -> str:
    slug = re.sub(r"[^A-Za-z0-9_-]+", "-", category) or "all"
    return f"guardian_{slug}_{start}_{end}_p{page}.json"


def _request_page(
    session: requests.Session,
    base_url: str,
    params: dict,
    retries: int,
    backoff: float,
) -> dict:
    attempt = 0
    while True:
        try:
            resp = session.get(base_url, params=params, timeout=30)
        except requests.RequestException as exc:
            attempt += 1
            if attempt > retries:
                raise GuardianFetchError(f"request failed after {retries} retries: {exc}")
            time.sleep(backoff * 2 ** (attempt - 1))
            continue
        if resp.status_code in (401, 403):
            raise GuardianAuthError(resp.text)
        if resp.status_code == 429:
            attempt += 1
            if attempt > retries:
                raise GuardianFetchError(f"rate limited after {retries} retries")
            wait = float(resp.headers.get("Retry-After", backoff * 2 ** (attempt - 1)))
            time.sleep(wait)
            continue
        if resp.status_code >= 400:
            attempt += 1
            if attempt > retries:
                raise GuardianFetchError(
                    f"HTTP {resp.status_code} after {retries} retries: {resp.text[:200]}"
                )
            time.sleep(backoff * 2 ** (attempt - 1))
            continue
        payload = resp.json()
        if payload.get("response", {}).get("status") != "ok":
            raise GuardianFetchError(f"API error response: {resp.text[:200]}")
        return payload


def fetch_guardian(
    api_key: str,
    category: str,
    date_range: tuple[dt.date, dt.date],
    out_path: str | os.PathLike,
    base_url: str = GUARDIAN_API_URL,
    page_size: int = 50,
    retries: int = 3,
    backoff: float = 0.5,
    cache_dir: str | os.PathLike | None = None,
) -> int:
    """Fetch Guardian articles for a section and date range into a JSONL file.

    Paginates until the range is exhausted and overwrites ``out_path`` with
    canonical records. Raw page responses are optionally cached under
    ``cache_dir`` keyed by (section, range, page); cached pages are replayed
    without touching the network.

    Returns the number of articles written (0 for an empty result).
    """
    if not api_key:
        raise ValueError("Guardian API key is empty")
    start, end = date_range
    if start > end:
        raise ValueError(f"empty date range: {start} > {end}")
    cache = Path(cache_dir) if cache_dir is not None else None
    if cache is not None:
        cache.mkdir(parents=True, exist_ok=True)

    docs: list[Document] = []
    session = requests.Session()
    page = 1
    while True:
        cached = cache / _cache_key(category, start, end, page) if cache else None
        if cached is not None and cached.exists():
            payload = json.loads(cached.read_text(encoding="utf-8"))
        else:
            params = {
                "api-key": api_key,
                "section": category,
                "from-date": start.isoformat(),
                "to-date": end.isoformat(),
                "page": page,
                "page-size": page_size,
                "show-fields": "headline,bodyText",
            }
            payload = _request_page(session, base_url, params, retries, backoff)
            if cached is not None:
                cached.write_text(
                    json.dumps(payload, ensure_ascii=False), encoding="utf-8"
                )
        response = payload["response"]
        docs.extend(_guardian_record(item) for item in response.get("results", []))
        if page >= int(response.get("pages", 0)):
            break
        page += 1
    return write_corpus(docs, out_path)
