"""Classification-confusion changepoint indicator.

One shared-feature linear classifier carries an independent sigmoid head
per candidate date. Each head is trained to separate the documents of the
candidate's before-window from its after-window under a class-size
normalized (unbiased) binary cross-entropy,

    L(theta | t*) = -1/2 sum_y (1/|D_y|) sum_{x in D_y} BCE(y, yhat(x)),

and the multi-task objective is the mean of the per-head losses. The
validation error rate p_err of each head, estimated with the same per-class
normalization, converts to a total-variation indicator value

    D_hat(t*) = 1 - 2 p_err(t*),

which lower-bounds the true TV distance between the segment distributions.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import CorpusIndex
from .features import FeatureMatrix
from .windows import SegmentPair

PROB_EPS = 1e-12

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


class TaskLayoutError(ValueError):
    """A candidate task cannot be trained or evaluated as laid out."""


class TrainingDivergedError(RuntimeError):
    """Loss became non-finite during optimization."""

    def __init__(self, epoch: int):
        super().__init__(f"non-finite loss at epoch {epoch}")
        self.epoch = epoch


@dataclass(frozen=True)
class TaskLayout:
    """Per-candidate window membership, labels, and the shared 80/20 split.

    ``labels[i, t]`` is 0/1 when document i lies in candidate t's
    before/after window and -1 otherwise. The train/validation split is
    drawn once per publication date (ceil(20%) of each date's documents,
    at least one, go to validation) and is identical across tasks.
    ``omega_train``/``omega_val`` hold the per-row class weights
    1/(2 |D_y|) for the respective split, zero outside the window.
    """

    candidates: tuple[dt.date, ...]
    labels: np.ndarray
    train_mask: np.ndarray
    n_train: np.ndarray
    n_val: np.ndarray
    omega_train: np.ndarray
    omega_val: np.ndarray
    window: int
    split_seed: int

    @property
    def n_tasks(self) -> int:
        return len(self.candidates)

    def rows(self, split: str) -> np.ndarray:
        """Indices of documents in ``split`` that belong to >= 1 window."""
        member = (self.labels >= 0).any(axis=1)
        if split == "train":
            return np.flatnonzero(member & self.train_mask)
        if split == "val":
            return np.flatnonzero(member & ~self.train_mask)
        raise ValueError(f"unknown split {split!r}")

    def omega(self, split: str) -> np.ndarray:
        return self.omega_train if split == "train" else self.omega_val


@dataclass
class ConfusionModel:
    """Linear multi-head classifier state after training."""

    weights: np.ndarray
    biases: np.ndarray
    candidates: tuple[dt.date, ...]
    seed: int
    adam_state: dict = field(default_factory=dict)

    def logits(self, rows: np.ndarray) -> np.ndarray:
        return rows @ self.weights + self.biases


@dataclass
class TrainConfig:
    """Optimization settings; defaults follow the published protocol."""

    lr: float = 8e-5
    batch_size: int = 64
    min_epochs: int = 1000
    max_epochs: int = 5000
    patience: int = 50
    seed: int = 0


@dataclass
class TrainResult:
    model: "ConfusionModel"
    train_loss: list[float]
    val_loss: list[float]
    best_epoch: int
    epochs_run: int


@dataclass(frozen=True)
class IndicatorCurve:
    """Per-candidate dissimilarity values with method metadata.

    ``values`` are clamped to [0, 1] for reporting (TV >= 0); ``raw_values``
    keep the unclamped 1 - 2*p_err estimates for diagnostics.
    """

    method: str
    candidates: tuple[dt.date, ...]
    values: np.ndarray
    raw_values: np.ndarray
    window: int
    seed: int

    @property
    def points(self) -> list[tuple[dt.date, float]]:
        return list(zip(self.candidates, (float(v) for v in self.values)))


def _val_count(n: int) -> int:
    # ceil(20%) with a floor of one document per date
    return (n + 4) // 5


def build_tasks(
    pairs: Sequence[SegmentPair], corpus: CorpusIndex, split_seed: int
) -> TaskLayout:
    """Lay out labels, the per-date 80/20 split, and class weights.

    The split is derived from ``split_seed`` and the date alone, so two
    layouts over the same corpus agree on the split regardless of the
    candidate set. Raises TaskLayoutError if any task would have an empty
    validation class (impossible for grids built by this package, checked
    defensively).
    """
    if not pairs:
        raise TaskLayoutError("no segment pairs supplied")
    n_docs = len(corpus)
    n_tasks = len(pairs)
    labels = np.full((n_docs, n_tasks), -1, dtype=np.int8)
    for t, pair in enumerate(pairs):
        labels[list(pair.before_docs), t] = 0
        labels[list(pair.after_docs), t] = 1

    train_mask = np.ones(n_docs, dtype=bool)
    for date, idx in corpus.by_date.items():
        order = np.random.default_rng([split_seed, date.toordinal()]).permutation(
            len(idx)
        )
        for j in order[: _val_count(len(idx))]:
            train_mask[idx[j]] = False

    n_train = np.zeros((n_tasks, 2), dtype=np.int64)
    n_val = np.zeros((n_tasks, 2), dtype=np.int64)
    for y in (0, 1):
        is_y = labels == y
        n_train[:, y] = (is_y & train_mask[:, None]).sum(axis=0)
        n_val[:, y] = (is_y & ~train_mask[:, None]).sum(axis=0)
    for t in range(n_tasks):
        if n_val[t, 0] == 0 or n_val[t, 1] == 0:
            raise TaskLayoutError(
                f"candidate {pairs[t].candidate} has an empty validation class"
            )

    def class_weights(counts: np.ndarray, mask: np.ndarray) -> np.ndarray:
        om = np.zeros((n_docs, n_tasks))
        for y in (0, 1):
            member = (labels == y) & mask[:, None]
            with np.errstate(divide="ignore"):
                w = np.where(counts[:, y] > 0, 1.0 / (2.0 * counts[:, y]), 0.0)
            om += member * w
        return om

    return TaskLayout(
        candidates=tuple(p.candidate for p in pairs),
        labels=labels,
        train_mask=train_mask,
        n_train=n_train,
        n_val=n_val,
        omega_train=class_weights(n_train, train_mask),
        omega_val=class_weights(n_val, ~train_mask),
        window=len(pairs[0].before),
        split_seed=split_seed,
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def loss_and_grad(
    weights: np.ndarray,
    biases: np.ndarray,
    rows: np.ndarray,
    targets: np.ndarray,
    omega: np.ndarray,
    n_tasks: int,
    want_grad: bool = True,
):
    """Unbiased multi-task loss and its analytic gradient.

    ``targets`` holds 0/1 labels and ``omega`` the per-(row, task) class
    weights 1/(2 |D_y|), zero outside a task's window. The value returned
    is (1/n_tasks) * sum over tasks of the class-weighted BCE; predicted
    probabilities are clamped away from {0, 1} by 1e-12 so the loss stays
    finite.
    """
    z = rows @ weights + biases
    p = _sigmoid(z)
    pc = np.clip(p, PROB_EPS, 1.0 - PROB_EPS)
    loss = -(omega * (targets * np.log(pc) + (1.0 - targets) * np.log(1.0 - pc))).sum()
    loss /= n_tasks
    if not want_grad:
        return loss, None, None
    g = omega * (p - targets) / n_tasks
    return loss, rows.T @ g, g.sum(axis=0)


def unbiased_loss(
    model: ConfusionModel,
    layout: TaskLayout,
    features: FeatureMatrix,
    split: str = "train",
) -> float:
    """Multi-task unbiased loss of a model over one split at fixed weights."""
    idx = layout.rows(split)
    targets = (layout.labels[idx] == 1).astype(float)
    loss, _, _ = loss_and_grad(
        model.weights,
        model.biases,
        features.rows[idx],
        targets,
        layout.omega(split)[idx],
        layout.n_tasks,
        want_grad=False,
    )
    return float(loss)


def train(
    layout: TaskLayout, features: FeatureMatrix, cfg: TrainConfig | None = None
) -> TrainResult:
    """Train the multi-head classifier with Adam on the unbiased loss.

    Weights start at zero (the per-head objective is convex), batches are
    reshuffled every epoch from ``cfg.seed``, and the returned model holds
    the parameters of the epoch with the best validation loss. Training
    runs at least ``min_epochs`` epochs and stops once the validation loss
    has not improved for ``patience`` epochs, or at ``max_epochs``.

    The recorded per-epoch train loss is the sum of batch losses, which
    equals the full unbiased loss apart from within-epoch parameter drift.
    """
    cfg = cfg or TrainConfig()
    X = features.rows
    T = layout.n_tasks
    targets = (layout.labels == 1).astype(float)
    om_tr = layout.omega_train
    om_va = layout.omega_val
    rows_tr = layout.rows("train")
    rows_va = layout.rows("val")
    Xv, Yv, Ov = X[rows_va], targets[rows_va], om_va[rows_va]

    dim = X.shape[1]
    W = np.zeros((dim, T))
    b = np.zeros(T)
    mW = np.zeros_like(W)
    vW = np.zeros_like(W)
    mb = np.zeros_like(b)
    vb = np.zeros_like(b)
    step = 0

    rng = np.random.default_rng(cfg.seed)
    train_hist: list[float] = []
    val_hist: list[float] = []
    best_val = np.inf
    best_W, best_b, best_epoch = W.copy(), b.copy(), 0
    since_best = 0
    epoch = 0

    for epoch in range(1, cfg.max_epochs + 1):
        perm = rng.permutation(rows_tr)
        epoch_loss = 0.0
        for s in range(0, len(perm), cfg.batch_size):
            idx = perm[s : s + cfg.batch_size]
            loss, gW, gb = loss_and_grad(W, b, X[idx], targets[idx], om_tr[idx], T)
            epoch_loss += loss
            step += 1
            mW = ADAM_BETA1 * mW + (1.0 - ADAM_BETA1) * gW
            vW = ADAM_BETA2 * vW + (1.0 - ADAM_BETA2) * gW * gW
            mb = ADAM_BETA1 * mb + (1.0 - ADAM_BETA1) * gb
            vb = ADAM_BETA2 * vb + (1.0 - ADAM_BETA2) * gb * gb
            c1 = 1.0 - ADAM_BETA1**step
            c2 = 1.0 - ADAM_BETA2**step
            W -= cfg.lr * (mW / c1) / (np.sqrt(vW / c2) + ADAM_EPS)
            b -= cfg.lr * (mb / c1) / (np.sqrt(vb / c2) + ADAM_EPS)

        val_loss, _, _ = loss_and_grad(W, b, Xv, Yv, Ov, T, want_grad=False)
        if not np.isfinite(epoch_loss) or not np.isfinite(val_loss):
            raise TrainingDivergedError(epoch)
        train_hist.append(float(epoch_loss))
        val_hist.append(float(val_loss))
        if val_loss < best_val:
            best_val = val_loss
            best_W, best_b, best_epoch = W.copy(), b.copy(), epoch
            since_best = 0
        else:
            since_best += 1
        if epoch >= cfg.min_epochs and since_best >= cfg.patience:
            break

    model = ConfusionModel(
        weights=best_W,
        biases=best_b,
        candidates=layout.candidates,
        seed=cfg.seed,
        adam_state={"step": step, "m_w": mW, "v_w": vW, "m_b": mb, "v_b": vb},
    )
    return TrainResult(
        model=model,
        train_loss=train_hist,
        val_loss=val_hist,
        best_epoch=best_epoch,
        epochs_run=epoch,
    )


def error_rates(
    model: ConfusionModel, layout: TaskLayout, features: FeatureMatrix
) -> np.ndarray:
    """Validation error rate of every head, class-balanced per the layout.

    A document is predicted "after" when its head's sigmoid is >= 0.5.
    """
    idx = layout.rows("val")
    preds = (features.rows[idx] @ model.weights + model.biases >= 0.0).astype(np.int8)
    wrong = (preds != layout.labels[idx]).astype(float)
    return (layout.omega_val[idx] * wrong).sum(axis=0)


def error_rate(
    model: ConfusionModel,
    layout: TaskLayout,
    features: FeatureMatrix,
    candidate: dt.date,
) -> float:
    """Validation error rate of the head for one candidate date."""
    try:
        t = layout.candidates.index(candidate)
    except ValueError:
        raise TaskLayoutError(f"{candidate} is not a candidate in this layout")
    return float(error_rates(model, layout, features)[t])


def indicator(
    model: ConfusionModel, layout: TaskLayout, features: FeatureMatrix
) -> IndicatorCurve:
    """TV-distance indicator curve D_hat(t*) = 1 - 2 p_err(t*)."""
    raw = 1.0 - 2.0 * error_rates(model, layout, features)
    return IndicatorCurve(
        method="confusion",
        candidates=layout.candidates,
        values=np.maximum(raw, 0.0),
        raw_values=raw,
        window=layout.window,
        seed=model.seed,
    )


def predict_changepoint(curve: IndicatorCurve) -> dt.date:
    """Date of the curve's global maximum; ties break to the earliest date."""
    if len(curve.candidates) == 0:
        raise ValueError("empty indicator curve")
    return curve.candidates[int(np.argmax(curve.values))]


def write_indicator_csv(
    curve: IndicatorCurve, path, config_hash: str | None = None
) -> None:
    """Export a curve as CSV with columns method,candidate_date,value,raw_value,L,seed.

    An optional ``# config_hash=...`` comment line precedes the header so
    artifacts carry their provenance.
    """
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        if config_hash is not None:
            fh.write(f"# config_hash={config_hash}\n")
        writer = csv.writer(fh)
        writer.writerow(["method", "candidate_date", "value", "raw_value", "L", "seed"])
        for cand, value, raw in zip(curve.candidates, curve.values, curve.raw_values):
            writer.writerow(
                [curve.method, cand.isoformat(), repr(float(value)),
                 repr(float(raw)), curve.window, curve.seed]
            )


def read_indicator_csv(path) -> IndicatorCurve:
    """Parse a curve written by :func:`write_indicator_csv`."""
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    cands, values, raws = [], [], []
    method, window, seed = "", 0, 0
    for row in reader:
        method = row["method"]
        window = int(row["L"])
        seed = int(row["seed"])
        cands.append(dt.date.fromisoformat(row["candidate_date"]))
        values.append(float(row["value"]))
        raws.append(float(row["raw_value"]))
    return IndicatorCurve(
        method=method,
        candidates=tuple(cands),
        values=np.array(values),
        raw_values=np.array(raws),
        window=window,
        seed=seed,
    )
