"""Scoring, stratified cross-validation, per-user consistency adjustment and
parameter sweeps.

Cross-validation selects features inside each training fold (the leaky
variant, selecting once on the full corpus, exists behind a flag for
comparison runs only).  The pooled out-of-fold predictions are kept so the
per-user adjustment can be evaluated on exactly the same prediction set.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, replace
from typing import IO, Iterable, Sequence

from .features import collect_stats, select_features, vectorize
from .stance import Stance
from .supervision import LabeledDataset
from .svm import TrainConfig, predict, train


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class MetricsReport:
    per_class: dict[Stance, ClassMetrics]
    micro_f1: float
    macro_f1: float


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def compute_metrics(pairs: Sequence[tuple[Stance, Stance]]) -> MetricsReport:
    """Per-class precision/recall/F1 from (gold, predicted) pairs.

    Zero denominators score 0.  Micro averages pool the counts over both
    classes; macro is the unweighted mean of the class F1 values.
    """
    if not pairs:
        raise ValueError("no predictions to score")
    per_class: dict[Stance, ClassMetrics] = {}
    for cls in (Stance.SUPPORTING, Stance.OPPOSING):
        tp = sum(1 for gold, pred in pairs if gold is cls and pred is cls)
        fp = sum(1 for gold, pred in pairs if gold is not cls and pred is cls)
        fn = sum(1 for gold, pred in pairs if gold is cls and pred is not cls)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        per_class[cls] = ClassMetrics(precision, recall, _f1(precision, recall), tp, fp, fn)
    tp_all = sum(m.tp for m in per_class.values())
    fp_all = sum(m.fp for m in per_class.values())
    fn_all = sum(m.fn for m in per_class.values())
    micro_p = tp_all / (tp_all + fp_all) if tp_all + fp_all else 0.0
    micro_r = tp_all / (tp_all + fn_all) if tp_all + fn_all else 0.0
    micro_f1 = _f1(micro_p, micro_r)
    macro_f1 = sum(m.f1 for m in per_class.values()) / len(per_class)
    return MetricsReport(per_class, micro_f1, macro_f1)


def stratified_kfold(
    dataset: LabeledDataset, k: int, seed: int
) -> list[tuple[list[int], list[int]]]:
    """k (train_indices, test_indices) splits with per-class round-robin deal."""
    if k < 2:
        raise ValueError("k must be at least 2")
    by_class: dict[Stance, list[int]] = {Stance.SUPPORTING: [], Stance.OPPOSING: []}
    for i, doc in enumerate(dataset.documents):
        if doc.label is None:
            raise ValueError("dataset contains an unlabeled document")
        by_class[doc.label].append(i)
    rng = random.Random(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in (Stance.SUPPORTING, Stance.OPPOSING):
        idxs = list(by_class[cls])
        if len(idxs) < k:
            raise ValueError(f"class {cls.wire} has fewer than k={k} examples")
        rng.shuffle(idxs)
        for j, doc_index in enumerate(idxs):
            folds[j % k].append(doc_index)
    everything = set(range(len(dataset.documents)))
    splits = []
    for fold in folds:
        test = sorted(fold)
        train_part = sorted(everything.difference(fold))
        splits.append((train_part, test))
    return splits


@dataclass(frozen=True)
class Prediction:
    user_id: str
    tweet_id: str
    stance: Stance


@dataclass(frozen=True)
class CVResult:
    report: MetricsReport
    predictions: tuple[Prediction, ...]   # pooled out-of-fold, fold order
    golds: dict[str, Stance]              # tweet_id -> gold label


def _label_to_y(stance: Stance) -> int:
    return 1 if stance is Stance.SUPPORTING else -1


def cross_validate(
    dataset: LabeledDataset,
    feature_count: int,
    cfg: TrainConfig,
    k: int = 5,
    *,
    seed: int | None = None,
    leaky_selection: bool = False,
) -> CVResult:
    fold_seed = cfg.seed if seed is None else seed
    splits = stratified_kfold(dataset, k, fold_seed)
    docs = dataset.documents
    shared_fs = None
    if leaky_selection:
        shared_fs = select_features(collect_stats(dataset), feature_count)
    predictions: list[Prediction] = []
    pairs: list[tuple[Stance, Stance]] = []
    golds: dict[str, Stance] = {}
    for train_idx, test_idx in splits:
        train_docs = tuple(docs[i] for i in train_idx)
        if shared_fs is not None:
            fs = shared_fs
        else:
            fold_set = LabeledDataset(train_docs, dataset.users)
            fs = select_features(collect_stats(fold_set), feature_count)
        digest = fs.digest()
        data = [(vectorize(d, fs), _label_to_y(d.label)) for d in train_docs]
        model = train(data, cfg, n_features=len(fs), feature_set_digest=digest)
        for i in test_idx:
            doc = docs[i]
            stance, _margin = predict(model, vectorize(doc, fs))
            predictions.append(Prediction(doc.user_id, doc.tweet_id, stance))
            pairs.append((doc.label, stance))
            golds[doc.tweet_id] = doc.label
    return CVResult(compute_metrics(pairs), tuple(predictions), golds)


def gamma_of(count_support: int, count_oppose: int) -> float:
    """Majority share of one user's predictions; always in [0.5, 1.0]."""
    if count_support < 0 or count_oppose < 0:
        raise ValueError("counts must be non-negative")
    total = count_support + count_oppose
    if total == 0:
        raise ValueError("at least one prediction required")
    return max(count_support, count_oppose) / total


def adjust(predictions: Sequence[Prediction], gamma_min: float) -> list[Prediction]:
    """Snap each sufficiently consistent user to their majority stance.

    A user qualifies when a strict majority exists (gamma > 0.5) and the
    majority share reaches gamma_min.  Idempotent; never flips a majority.
    """
    if not 0.5 <= gamma_min <= 1.0:
        raise ValueError("gamma_min must be in [0.5, 1.0]")
    counts: dict[str, list[int]] = {}
    for p in predictions:
        slot = 0 if p.stance is Stance.SUPPORTING else 1
        counts.setdefault(p.user_id, [0, 0])[slot] += 1
    majority: dict[str, Stance] = {}
    for uid, (c_s, c_o) in counts.items():
        gamma = gamma_of(c_s, c_o)
        if gamma > 0.5 and gamma >= gamma_min:
            majority[uid] = Stance.SUPPORTING if c_s > c_o else Stance.OPPOSING
    return [
        replace(p, stance=majority[p.user_id]) if p.user_id in majority else p
        for p in predictions
    ]


SWEEP_AXES = ("feature_count", "wi", "gamma_min")


def sweep(
    dataset: LabeledDataset,
    axis: str,
    values: Sequence[float],
    *,
    feature_count: int = 3000,
    cfg: TrainConfig | None = None,
    k: int = 5,
    seed: int | None = None,
    gamma_min: float = 0.5,
    leaky_selection: bool = False,
) -> list[tuple[float, MetricsReport]]:
    """One metrics row per value, rows ordered by value ascending.

    feature_count and wi rows are fresh cross-validations at that setting and
    score the raw classifier (no per-user adjustment).  gamma_min rows come
    from a single cross-validation whose pooled predictions are re-adjusted
    at each threshold.
    """
    cfg = cfg or TrainConfig()
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}")
    if not values:
        raise ValueError("values must be non-empty")
    vals = sorted(values)
    rows: list[tuple[float, MetricsReport]] = []
    if axis == "gamma_min":
        for v in vals:
            if not 0.5 <= v <= 1.0:
                raise ValueError("gamma_min values must be in [0.5, 1.0]")
        result = cross_validate(
            dataset, feature_count, cfg, k, seed=seed, leaky_selection=leaky_selection
        )
        for v in vals:
            adjusted = adjust(result.predictions, v)
            pairs = [(result.golds[p.tweet_id], p.stance) for p in adjusted]
            rows.append((v, compute_metrics(pairs)))
    elif axis == "wi":
        for v in vals:
            if not 0 < v <= 1:
                raise ValueError("wi values must be in (0, 1]")
        for v in vals:
            result = cross_validate(
                dataset,
                feature_count,
                replace(cfg, wi=v),
                k,
                seed=seed,
                leaky_selection=leaky_selection,
            )
            rows.append((v, result.report))
    else:
        for v in vals:
            if v < 1 or int(v) != v:
                raise ValueError("feature_count values must be positive integers")
        for v in vals:
            result = cross_validate(
                dataset, int(v), cfg, k, seed=seed, leaky_selection=leaky_selection
            )
            rows.append((float(v), result.report))
    return rows


# ---------------------------------------------------------------------------
# CSV emission: axis_value,class,precision,recall,f1,micro_f1,macro_f1

METRICS_CSV_HEADER = ["axis_value", "class", "precision", "recall", "f1", "micro_f1", "macro_f1"]


def format_axis_value(value: float | int | str) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, int) or float(value).is_integer():
        return str(int(value))
    return f"{value:g}"


def metrics_csv_rows(rows: Iterable[tuple[float | int | str, MetricsReport]]) -> list[list[str]]:
    out = [list(METRICS_CSV_HEADER)]
    for value, report in rows:
        label = format_axis_value(value)
        for cls in (Stance.SUPPORTING, Stance.OPPOSING):
            m = report.per_class[cls]
            out.append(
                [
                    label,
                    cls.wire,
                    f"{m.precision:.4f}",
                    f"{m.recall:.4f}",
                    f"{m.f1:.4f}",
                    f"{report.micro_f1:.4f}",
                    f"{report.macro_f1:.4f}",
                ]
            )
    return out


def write_metrics_csv(
    fh: IO[str], rows: Iterable[tuple[float | int | str, MetricsReport]]
) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerows(metrics_csv_rows(rows))
