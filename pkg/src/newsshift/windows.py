"""Segment pairs around candidate changepoints.

For each candidate date t* the time axis splits into a before-segment (the
L data-bearing dates closest to t* with date <= t*, so t* itself is in
`before`) and an after-segment (the L closest dates with date > t*).
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

from .corpus import CandidateGrid, CorpusIndex


@dataclass(frozen=True)
class SegmentPair:
    """Window dates and document indices on both sides of one candidate."""

    candidate: dt.date
    before: tuple[dt.date, ...]
    after: tuple[dt.date, ...]
    before_docs: tuple[int, ...]
    after_docs: tuple[int, ...]


def segments(grid: CandidateGrid, corpus: CorpusIndex) -> list[SegmentPair]:
    """Build one SegmentPair per candidate in the grid.

    Grid construction guarantees enough margin dates, so every pair has
    exactly ``grid.margin`` dates and >= 1 document on each side.
    """
    L = grid.margin
    full = grid.full_grid
    pos = {d: i for i, d in enumerate(full)}
    pairs = []
    for cand in grid.candidates:
        i = pos[cand]
        before = full[i - L + 1 : i + 1]
        after = full[i + 1 : i + 1 + L]
        before_docs = tuple(j for d in before for j in corpus.by_date[d])
        after_docs = tuple(j for d in after for j in corpus.by_date[d])
        pairs.append(
            SegmentPair(
                candidate=cand,
                before=before,
                after=after,
                before_docs=before_docs,
                after_docs=after_docs,
            )
        )
    return pairs
