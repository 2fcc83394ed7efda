"""The evaluation harness: delta, success-rate curve, AUC, random baseline.

Walks through scoring a handful of simulated predictions against an
event list, then compares with the every-possible-date random baseline
on the same grid.
"""

import datetime as dt

from newsshift import (
    EventList,
    RunRecord,
    aggregate,
    build_candidate_grid,
    delta_days,
    random_baseline,
)
from newsshift.corpus import CorpusIndex, Document

START = dt.date(2021, 1, 1)


def synthetic_grid(days=90, margin=10):
    docs = [
        Document(id=f"d{i}", date=START + dt.timedelta(days=i), category="",
                 title="", body="x")
        for i in range(days + 2 * margin)
    ]
    corpus = CorpusIndex(docs)
    interval = (START + dt.timedelta(days=margin),
                START + dt.timedelta(days=margin + days - 1))
    return build_candidate_grid(corpus, interval, margin), interval


if __name__ == "__main__":
    grid, interval = synthetic_grid()
    events = EventList(
        events=(
            (interval[0] + dt.timedelta(days=20), "policy announcement"),
            (interval[0] + dt.timedelta(days=55), "market shock"),
        ),
        interval=interval,
    )

    predictions = [20, 22, 19, 55, 70]  # day offsets of five simulated runs
    records = []
    for seed, offset in enumerate(predictions):
        predicted = interval[0] + dt.timedelta(days=offset)
        records.append(RunRecord("demo", seed, predicted,
                                 delta_days(predicted, events)))
        print(f"run {seed}: predicted {predicted} -> delta "
              f"{records[-1].delta} days")

    report = aggregate(records, interval_days=90)
    print(f"\nmean delta {report.mean_delta:.2f} +- {report.se_delta:.2f} (SE), "
          f"AUC {report.auc:.3f}")
    print("success rate at n = 0, 1, 2, 5, 10 days:",
          [round(float(report.curve.rates[n]), 2) for n in (0, 1, 2, 5, 10)])

    rb = random_baseline(grid, events)
    print(f"\nrandom baseline: mean delta {rb.mean_delta:.1f}, AUC "
          f"{rb.curve.auc:.3f} (averaged over {len(rb.deltas)} candidate dates)")
