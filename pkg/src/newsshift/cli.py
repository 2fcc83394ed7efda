"""Command-line driver: fetch, benchgen, detect, eval, and pipeline.

A run is configured by a flat ``key = value`` text file plus flag
overrides (flags win over the file, the file wins over defaults). All
randomness flows from the three named seeds ``seed_data``, ``seed_split``
and ``seed_train``. Artifacts are deterministic for a fixed config and
seeds; wall-clock timestamps go only to ``run.log``.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import datetime as dt
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import benchgen, confusion, evaluation, features, lda
from .corpus import (
    GUARDIAN_API_KEY_ENV,
    GUARDIAN_API_URL,
    CorpusIndex,
    build_candidate_grid,
    fetch_guardian,
    ingest,
)
from .windows import segments

CONFIG_VERSION = 1

METHODS = ("confusion", "lda", "random")
FEATURE_KINDS = ("tfidf", "embedding")
SCHEMES = ("topic-switch", "splice")


class ConfigError(ValueError):
    """Invalid run configuration; maps to exit code 2."""


@dataclass
class RunConfig:
    """Resolved configuration for one command invocation.

    Training and LDA defaults follow the published hyperparameter values
    (learning rate 8e-5, batch 64, 1000..5000 epochs, 20 topics, 83
    Gibbs iterations).
    """

    config_version: int = CONFIG_VERSION
    corpus: str | None = None
    out_dir: str = "out"
    method: str = "confusion"
    methods: str = ""
    interval: str | None = None
    window_l: int | None = None
    features: str = "tfidf"
    embeddings: str | None = None
    min_words: int = 0
    categories: str = ""
    seed_data: int = 0
    seed_split: int = 0
    seed_train: int = 0
    seeds: str = ""
    jobs: int = 1
    lr: float = 8e-5
    batch_size: int = 64
    min_epochs: int = 1000
    max_epochs: int = 5000
    patience: int = 50
    min_df: int = 2
    max_df: float = 0.9
    topics: int = 20
    lda_iterations: int = 83
    lda_alpha: float | None = None
    lda_beta: float = 0.01
    lda_burn_in: int | None = None
    scheme: str = "topic-switch"
    change_date: str | None = None
    per_day: int = 10
    per_day_jitter: int = 0
    margin_days: int | None = None
    vocab_size: int = 120
    doc_length: int = 60
    background_mix: float = 0.5
    source_corpus: str | None = None
    category_a: str | None = None
    category_b: str | None = None
    events: str | None = None
    predictions: str = ""
    interval_days: int | None = None
    fetch_category: str | None = None
    fetch_out: str | None = None
    page_size: int = 50
    guardian_url: str = GUARDIAN_API_URL
    cache_dir: str | None = None


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}

_INT_KEYS = {
    "config_version", "window_l", "min_words", "seed_data", "seed_split",
    "seed_train", "jobs", "batch_size", "min_epochs", "max_epochs", "patience",
    "min_df", "topics", "lda_iterations", "lda_burn_in", "per_day",
    "per_day_jitter", "margin_days", "vocab_size", "doc_length",
    "interval_days", "page_size",
}
_FLOAT_KEYS = {"lr", "max_df", "lda_alpha", "lda_beta", "background_mix"}


def _cast(key: str, raw: str):
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"config key {key}: expected integer, got {raw!r}")
    if key in _FLOAT_KEYS:
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"config key {key}: expected number, got {raw!r}")
    return raw


def parse_config_file(path: str | os.PathLike) -> dict:
    """Parse a flat ``key = value`` config file; rejects unknown keys."""
    values: dict = {}
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"{path}:{lineno}: unknown config key: {key}")
        if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
            raw = raw[1:-1]
        values[key] = _cast(key, raw)
    return values


def resolve_config(
    file_values: dict, flag_values: dict, overrides: list[str] | None = None
) -> RunConfig:
    """Merge defaults < file < flags (and ``--set key=value`` overrides)."""
    cfg = RunConfig()
    for key, value in file_values.items():
        setattr(cfg, key, value)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = (part.strip() for part in item.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"unknown config key: {key}")
        setattr(cfg, key, _cast(key, raw))
    for key, value in flag_values.items():
        if value is not None:
            setattr(cfg, key, value)
    if cfg.config_version != CONFIG_VERSION:
        raise ConfigError(
            f"config_version {cfg.config_version} unsupported (expected {CONFIG_VERSION})"
        )
    return cfg


def config_hash(cfg: RunConfig) -> str:
    """Short digest of the resolved config.

    Output location and parallelism (out_dir, jobs) are excluded so reruns
    of the same analysis hash identically wherever they are written.
    """
    payload = dataclasses.asdict(cfg)
    payload.pop("out_dir")
    payload.pop("jobs")
    blob = json.dumps(payload, sort_keys=True)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def parse_interval(text: str) -> tuple[dt.date, dt.date]:
    try:
        a, b = text.split("..")
        return dt.date.fromisoformat(a), dt.date.fromisoformat(b)
    except ValueError:
        raise ConfigError(
            f"interval must be YYYY-MM-DD..YYYY-MM-DD, got {text!r}"
        ) from None


def _require(cfg: RunConfig, *keys: str) -> None:
    for key in keys:
        if getattr(cfg, key) in (None, ""):
            raise ConfigError(f"missing required config key: {key}")


def _validate_common(cfg: RunConfig) -> None:
    if cfg.window_l is not None and cfg.window_l < 1:
        raise ConfigError(f"invalid value for L (window_l): must be >= 1, got {cfg.window_l}")
    if cfg.jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {cfg.jobs}")
    if cfg.method not in METHODS:
        raise ConfigError(f"method must be one of {METHODS}, got {cfg.method!r}")
    if cfg.features not in FEATURE_KINDS:
        raise ConfigError(f"features must be one of {FEATURE_KINDS}, got {cfg.features!r}")
    if cfg.batch_size < 1:
        raise ConfigError(f"batch_size must be >= 1, got {cfg.batch_size}")
    if not 1 <= cfg.min_epochs <= cfg.max_epochs:
        raise ConfigError(
            f"epoch budget invalid: min_epochs={cfg.min_epochs}, max_epochs={cfg.max_epochs}"
        )
    if cfg.patience < 1:
        raise ConfigError(f"patience must be >= 1, got {cfg.patience}")
    if not 0.0 < cfg.max_df <= 1.0:
        raise ConfigError(f"max_df must be in (0, 1], got {cfg.max_df}")
    if cfg.min_df < 1:
        raise ConfigError(f"min_df must be >= 1, got {cfg.min_df}")
    if cfg.topics < 1:
        raise ConfigError(f"topics must be >= 1, got {cfg.topics}")
    if cfg.lda_iterations < 1:
        raise ConfigError(f"lda_iterations must be >= 1, got {cfg.lda_iterations}")
    if not 0.0 <= cfg.background_mix < 1.0:
        raise ConfigError(f"background_mix must be in [0, 1), got {cfg.background_mix}")
    if cfg.per_day < 1:
        raise ConfigError(f"per_day must be >= 1, got {cfg.per_day}")


class _RunLog:
    """Timestamped progress log; the only artifact carrying wall-clock time."""

    def __init__(self, out_dir: Path):
        out_dir.mkdir(parents=True, exist_ok=True)
        self.path = out_dir / "run.log"
        self._fh = self.path.open("a", encoding="utf-8")

    def write(self, message: str) -> None:
        stamp = dt.datetime.now().isoformat(timespec="seconds")
        self._fh.write(f"{stamp} {message}\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


def _slice_to_grid(corpus: CorpusIndex, grid) -> CorpusIndex:
    keep = set(grid.full_grid)
    return CorpusIndex([d for d in corpus.documents if d.date in keep])


def _detect_curve(cfg: RunConfig, log=None) -> tuple:
    """Shared detect path: returns (curve, predicted, candidates)."""
    interval = parse_interval(cfg.interval)
    allow = [c.strip() for c in cfg.categories.split(",") if c.strip()] or None
    corpus = ingest(cfg.corpus, min_words=cfg.min_words, categories=allow)
    grid = build_candidate_grid(corpus, interval, cfg.window_l)
    corpus = _slice_to_grid(corpus, grid)
    grid = build_candidate_grid(corpus, interval, cfg.window_l)
    pairs = segments(grid, corpus)

    if cfg.method == "random":
        zeros = np.zeros(len(grid.candidates))
        curve = confusion.IndicatorCurve(
            method="random",
            candidates=grid.candidates,
            values=zeros,
            raw_values=zeros.copy(),
            window=cfg.window_l,
            seed=cfg.seed_train,
        )
        return curve, confusion.predict_changepoint(curve), grid.candidates

    if cfg.method == "lda":
        vocab = features.fit_vocabulary(corpus, min_df=cfg.min_df, max_df=cfg.max_df)
        model = lda.fit_lda(
            corpus,
            vocab,
            n_topics=cfg.topics,
            alpha=cfg.lda_alpha,
            beta=cfg.lda_beta,
            iterations=cfg.lda_iterations,
            burn_in=cfg.lda_burn_in,
            seed=cfg.seed_train,
        )
        curve = lda.lda_indicator(model, pairs)
        return curve, confusion.predict_changepoint(curve), grid.candidates

    if cfg.features == "embedding":
        _require(cfg, "embeddings")
        matrix = features.load_embeddings(cfg.embeddings, corpus)
    else:
        vocab = features.fit_vocabulary(corpus, min_df=cfg.min_df, max_df=cfg.max_df)
        matrix = features.tfidf_transform(corpus, vocab)
    layout = confusion.build_tasks(pairs, corpus, cfg.seed_split)
    result = confusion.train(
        layout,
        matrix,
        confusion.TrainConfig(
            lr=cfg.lr,
            batch_size=cfg.batch_size,
            min_epochs=cfg.min_epochs,
            max_epochs=cfg.max_epochs,
            patience=cfg.patience,
            seed=cfg.seed_train,
        ),
    )
    if log is not None:
        log.write(
            f"training stopped at epoch {result.epochs_run} "
            f"(best val loss at epoch {result.best_epoch})"
        )
    curve = confusion.indicator(result.model, layout, matrix)
    return curve, confusion.predict_changepoint(curve), grid.candidates


def _write_prediction(
    out_dir: Path, cfg: RunConfig, curve, predicted, candidates
) -> None:
    chash = config_hash(cfg)
    confusion.write_indicator_csv(curve, out_dir / "indicator.csv", config_hash=chash)
    payload = {
        "method": cfg.method,
        "predicted_changepoint": predicted.isoformat(),
        "interval": cfg.interval,
        "window_l": cfg.window_l,
        "corpus": cfg.corpus,
        "features": cfg.features if cfg.method == "confusion" else None,
        "seeds": {
            "data": cfg.seed_data,
            "split": cfg.seed_split,
            "train": cfg.seed_train,
        },
        "config_hash": chash,
    }
    if cfg.method == "random":
        payload["candidates"] = [c.isoformat() for c in candidates]
    (out_dir / "prediction.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8"
    )


def cmd_detect(cfg: RunConfig) -> int:
    _require(cfg, "corpus", "interval", "window_l")
    _validate_common(cfg)
    out_dir = Path(cfg.out_dir)
    log = _RunLog(out_dir)
    log.write(f"detect method={cfg.method} corpus={cfg.corpus}")
    t0 = time.time()
    curve, predicted, candidates = _detect_curve(cfg, log)
    _write_prediction(out_dir, cfg, curve, predicted, candidates)
    log.write(f"detect finished in {time.time() - t0:.1f}s; predicted {predicted}")
    log.close()
    print(f"predicted changepoint: {predicted} (method={cfg.method})")
    print(f"artifacts in {out_dir}")
    return 0


def cmd_fetch(cfg: RunConfig) -> int:
    _require(cfg, "fetch_category", "interval", "fetch_out")
    api_key = os.environ.get(GUARDIAN_API_KEY_ENV, "")
    if not api_key:
        raise ConfigError(f"environment variable {GUARDIAN_API_KEY_ENV} is not set")
    interval = parse_interval(cfg.interval)
    count = fetch_guardian(
        api_key,
        cfg.fetch_category,
        interval,
        cfg.fetch_out,
        base_url=cfg.guardian_url,
        page_size=cfg.page_size,
        cache_dir=cfg.cache_dir,
    )
    print(f"wrote {count} articles to {cfg.fetch_out}")
    return 0


def _benchgen_paths(out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / "benchmark.jsonl"


def cmd_benchgen(cfg: RunConfig) -> int:
    _require(cfg, "interval")
    _validate_common(cfg)
    interval = parse_interval(cfg.interval)
    out_dir = Path(cfg.out_dir)
    corpus_path = _benchgen_paths(out_dir)
    if cfg.change_date is not None:
        change = dt.date.fromisoformat(cfg.change_date)
    else:
        span = (interval[1] - interval[0]).days
        offset = int(np.random.default_rng(cfg.seed_data).integers(0, span + 1))
        change = interval[0] + dt.timedelta(days=offset)
    if cfg.scheme == "topic-switch":
        margin = cfg.margin_days if cfg.margin_days is not None else cfg.window_l
        if margin is None:
            raise ConfigError("topic-switch needs margin_days or window_l")
        lexicon = benchgen.make_lexicon(cfg.vocab_size)
        topic_a, topic_b = benchgen.disjoint_topics(
            lexicon,
            cfg.seed_data,
            doc_length=cfg.doc_length,
            background_mix=cfg.background_mix,
        )
        bench = benchgen.generate_topic_switch(
            lexicon, topic_a, topic_b, interval, change,
            cfg.per_day, margin, cfg.seed_data, corpus_path,
            per_day_jitter=cfg.per_day_jitter,
        )
    elif cfg.scheme == "splice":
        _require(cfg, "source_corpus", "category_a", "category_b")
        source = ingest(cfg.source_corpus)
        bench = benchgen.splice_categories(
            source, cfg.category_a, cfg.category_b, change,
            interval, cfg.seed_data, corpus_path,
        )
    else:
        raise ConfigError(f"scheme must be one of {SCHEMES}, got {cfg.scheme!r}")
    (out_dir / "benchgen.json").write_text(
        json.dumps(
            {
                "config_hash": config_hash(cfg),
                "seeds": {"data": cfg.seed_data, "split": cfg.seed_split,
                          "train": cfg.seed_train},
                "corpus": str(corpus_path),
                "true_changepoint": bench.true_changepoint.isoformat(),
            },
            indent=2, sort_keys=True,
        ),
        encoding="utf-8",
    )
    print(f"benchmark corpus: {bench.corpus_path}")
    print(f"true changepoint: {bench.true_changepoint}")
    return 0


def _load_prediction(path: Path) -> dict:
    payload = json.loads(path.read_text(encoding="utf-8"))
    for key in ("method", "predicted_changepoint", "seeds"):
        if key not in payload:
            raise ConfigError(f"{path}: not a prediction file (missing {key})")
    return payload


def cmd_eval(cfg: RunConfig) -> int:
    _require(cfg, "predictions", "events", "interval")
    interval = parse_interval(cfg.interval)
    events = evaluation.load_events(cfg.events, interval)
    interval_days = cfg.interval_days or (interval[1] - interval[0]).days + 1
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    by_method: dict[str, list] = {}
    for raw in cfg.predictions.split(","):
        path = Path(raw.strip())
        payload = _load_prediction(path)
        by_method.setdefault(payload["method"], []).append((path, payload))

    summary: dict = {"interval_days": interval_days, "config_hash": config_hash(cfg)}
    for method, entries in sorted(by_method.items()):
        if method == "random":
            # averaged-over-all-dates baseline from the stored candidate set
            cands = [
                dt.date.fromisoformat(c) for _, p in entries for c in p["candidates"]
            ]
            deltas = [evaluation.delta_days(c, events) for c in cands]
            curve = evaluation.success_curve_from_deltas(deltas, interval_days)
            summary[method] = {
                "mean_delta": sum(deltas) / len(deltas),
                "auc": curve.auc,
                "n_candidates": len(cands),
            }
            continue
        records = [
            evaluation.RunRecord(
                dataset=payload.get("corpus") or str(path),
                seed=payload["seeds"]["train"],
                predicted=dt.date.fromisoformat(payload["predicted_changepoint"]),
                delta=evaluation.delta_days(
                    dt.date.fromisoformat(payload["predicted_changepoint"]), events
                ),
            )
            for path, payload in entries
        ]
        report = evaluation.aggregate(records, interval_days)
        extra = {"method": method, "config_hash": summary["config_hash"]}
        (out_dir / f"report_{method}.json").write_text(
            evaluation.report_to_json(report, extra), encoding="utf-8"
        )
        evaluation.write_report_csv(report, out_dir / f"report_{method}.csv")
        summary[method] = {
            "mean_delta": report.mean_delta,
            "se_delta": report.se_delta,
            "auc": report.auc,
        }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True), encoding="utf-8"
    )
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _pipeline_run(args: tuple) -> tuple:
    """One (method, seed) detect pass; module-level for process pools."""
    cfg_dict, method, seed = args
    cfg = RunConfig(**cfg_dict)
    cfg.method = method
    cfg.seed_split = seed
    cfg.seed_train = seed
    cfg.out_dir = str(Path(cfg.out_dir) / f"{method}-seed{seed}")
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    curve, predicted, candidates = _detect_curve(cfg)
    _write_prediction(out_dir, cfg, curve, predicted, candidates)
    return method, seed, predicted.isoformat(), [c.isoformat() for c in candidates]


def cmd_pipeline(cfg: RunConfig) -> int:
    _require(cfg, "interval", "window_l")
    _validate_common(cfg)
    out_dir = Path(cfg.out_dir)
    log = _RunLog(out_dir)
    t0 = time.time()

    gen_cfg = dataclasses.replace(cfg, out_dir=str(out_dir))
    cmd_benchgen(gen_cfg)
    corpus_path = out_dir / "benchmark.jsonl"
    manifest = benchgen.load_manifest(corpus_path)
    true_date = dt.date.fromisoformat(manifest["true_changepoint"])
    log.write(f"benchmark generated, true changepoint {true_date}")

    interval = parse_interval(cfg.interval)
    events = evaluation.EventList(
        events=((true_date, "induced changepoint"),), interval=interval
    )
    interval_days = cfg.interval_days or (interval[1] - interval[0]).days + 1

    methods = [m.strip() for m in (cfg.methods or cfg.method).split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {m!r}")
    seeds = [int(s) for s in cfg.seeds.split(",") if s.strip()] or [cfg.seed_train]

    base = dataclasses.asdict(cfg)
    base["corpus"] = str(corpus_path)
    jobs = [(base, m, s) for m in methods for s in seeds]
    if cfg.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_pipeline_run, jobs))
    else:
        results = [_pipeline_run(job) for job in jobs]
    log.write(f"{len(results)} detect runs finished in {time.time() - t0:.1f}s")

    summary: dict = {
        "true_changepoint": true_date.isoformat(),
        "interval_days": interval_days,
        "config_hash": config_hash(cfg),
    }
    for method in methods:
        if method == "random":
            cands = next(
                [dt.date.fromisoformat(c) for c in r[3]]
                for r in results
                if r[0] == "random"
            )
            deltas = [evaluation.delta_days(c, events) for c in cands]
            curve = evaluation.success_curve_from_deltas(deltas, interval_days)
            summary[method] = {
                "mean_delta": sum(deltas) / len(deltas),
                "auc": curve.auc,
            }
            continue
        records = [
            evaluation.RunRecord(
                dataset=str(corpus_path),
                seed=seed,
                predicted=dt.date.fromisoformat(pred),
                delta=evaluation.delta_days(dt.date.fromisoformat(pred), events),
            )
            for m, seed, pred, _ in results
            if m == method
        ]
        report = evaluation.aggregate(records, interval_days)
        extra = {"method": method, "config_hash": summary["config_hash"]}
        (out_dir / f"report_{method}.json").write_text(
            evaluation.report_to_json(report, extra), encoding="utf-8"
        )
        evaluation.write_report_csv(report, out_dir / f"report_{method}.csv")
        summary[method] = {
            "mean_delta": report.mean_delta,
            "se_delta": report.se_delta,
            "auc": report.auc,
        }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True), encoding="utf-8"
    )
    log.write(f"pipeline finished in {time.time() - t0:.1f}s")
    log.close()
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


_COMMANDS = {
    "fetch": cmd_fetch,
    "benchgen": cmd_benchgen,
    "detect": cmd_detect,
    "eval": cmd_eval,
    "pipeline": cmd_pipeline,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newsshift",
        description="Changepoint detection in dated document streams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config key")
        p.add_argument("--method", dest="method")
        p.add_argument("--methods", dest="methods")
        p.add_argument("--window-l", dest="window_l", type=int)
        p.add_argument("--interval", dest="interval")
        p.add_argument("--seed-data", dest="seed_data", type=int)
        p.add_argument("--seed-split", dest="seed_split", type=int)
        p.add_argument("--seed-train", dest="seed_train", type=int)
        p.add_argument("--seeds", dest="seeds")
        p.add_argument("--jobs", dest="jobs", type=int)
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--corpus", dest="corpus")
        p.add_argument("--min-words", dest="min_words", type=int)
        p.add_argument("--categories", dest="categories")
        p.add_argument("--features", dest="features")
        p.add_argument("--embeddings", dest="embeddings")
        p.add_argument("--events", dest="events")
        p.add_argument("--predictions", dest="predictions")
        p.add_argument("--interval-days", dest="interval_days", type=int)
        p.add_argument("--scheme", dest="scheme")
        p.add_argument("--change-date", dest="change_date")
        p.add_argument("--per-day", dest="per_day", type=int)
        p.add_argument("--margin-days", dest="margin_days", type=int)
        p.add_argument("--source-corpus", dest="source_corpus")
        p.add_argument("--category-a", dest="category_a")
        p.add_argument("--category-b", dest="category_b")
        p.add_argument("--category", dest="fetch_category")
        p.add_argument("--out", dest="fetch_out")
        p.add_argument("--cache-dir", dest="cache_dir")
    return parser


_FLAG_KEYS = (
    "method", "methods", "window_l", "interval", "seed_data", "seed_split",
    "seed_train", "seeds", "jobs", "out_dir", "corpus", "min_words",
    "categories", "features", "embeddings", "events", "predictions",
    "interval_days", "scheme", "change_date", "per_day", "margin_days",
    "source_corpus", "category_a", "category_b", "fetch_category", "fetch_out",
    "cache_dir",
)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        flag_values = {key: getattr(args, key) for key in _FLAG_KEYS}
        cfg = resolve_config(file_values, flag_values, args.set)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
