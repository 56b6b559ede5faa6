"""Metrics, stratified folds, per-user adjustment, parameter sweeps."""

from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_dataset, separable_dataset
from tcm_stance.evaluation import (
    METRICS_CSV_HEADER,
    Prediction,
    adjust,
    compute_metrics,
    cross_validate,
    format_axis_value,
    gamma_of,
    metrics_csv_rows,
    stratified_kfold,
    sweep,
    write_metrics_csv,
)
from tcm_stance.stance import Stance
from tcm_stance.svm import TrainConfig

S, O = Stance.SUPPORTING, Stance.OPPOSING

stance_st = st.sampled_from([S, O])


def test_perfect_predictions():
    report = compute_metrics([(S, S), (O, O), (S, S)])
    for cls in (S, O):
        assert report.per_class[cls].precision == 1.0
        assert report.per_class[cls].recall == 1.0
        assert report.per_class[cls].f1 == 1.0
    assert report.micro_f1 == 1.0
    assert report.macro_f1 == 1.0


def test_hand_counted_mixed_case():
    pairs = [(S, S), (S, O), (O, O), (O, O), (S, S)]
    report = compute_metrics(pairs)
    sup = report.per_class[S]
    opp = report.per_class[O]
    assert (sup.tp, sup.fp, sup.fn) == (2, 0, 1)
    assert (opp.tp, opp.fp, opp.fn) == (2, 1, 0)
    assert sup.precision == 1.0
    assert sup.recall == pytest.approx(2 / 3)
    assert sup.f1 == pytest.approx(0.8)
    assert opp.precision == pytest.approx(2 / 3)
    assert opp.recall == 1.0
    assert report.micro_f1 == pytest.approx(0.8)
    assert report.macro_f1 == pytest.approx(0.8)


def test_frozen_f1_value():
    # per-class counts chosen to make precision 0.96 and recall 0.98 exactly
    pairs = [(S, S)] * 1176 + [(O, S)] * 49 + [(S, O)] * 24
    report = compute_metrics(pairs)
    sup = report.per_class[S]
    assert sup.precision == pytest.approx(0.96, abs=1e-12)
    assert sup.recall == pytest.approx(0.98, abs=1e-12)
    assert sup.f1 == pytest.approx(0.96990, abs=1e-5)


def test_zero_denominators_score_zero():
    report = compute_metrics([(S, O), (S, O)])
    assert report.per_class[S].recall == 0.0
    assert report.per_class[S].precision == 0.0  # nothing predicted supporting
    assert report.per_class[O].precision == 0.0
    assert report.per_class[O].recall == 0.0  # no opposing gold
    assert report.micro_f1 == 0.0
    assert report.macro_f1 == 0.0


def test_empty_pairs_are_rejected():
    with pytest.raises(ValueError):
        compute_metrics([])


@given(st.lists(st.tuples(stance_st, stance_st), min_size=1, max_size=40))
def test_micro_f1_equals_accuracy(pairs):
    report = compute_metrics(pairs)
    accuracy = sum(1 for g, p in pairs if g is p) / len(pairs)
    assert report.micro_f1 == pytest.approx(accuracy, abs=1e-12)
    for cls in (S, O):
        m = report.per_class[cls]
        for value in (m.precision, m.recall, m.f1):
            assert 0.0 <= value <= 1.0


def balanced_dataset(n_pos: int, n_neg: int):
    rows = [(f"p{i}", ("经络", "有效"), S) for i in range(n_pos)]
    rows += [(f"n{i}", ("经络", "骗局"), O) for i in range(n_neg)]
    return make_dataset(rows)


def test_kfold_even_split():
    dataset = balanced_dataset(10, 10)
    splits = stratified_kfold(dataset, 5, seed=3)
    assert len(splits) == 5
    docs = dataset.documents
    for train_idx, test_idx in splits:
        assert len(test_idx) == 4
        assert sorted(train_idx + test_idx) == list(range(20))
        test_labels = [docs[i].label for i in test_idx]
        assert test_labels.count(S) == 2
        assert test_labels.count(O) == 2


def test_kfold_test_folds_partition_the_dataset():
    dataset = balanced_dataset(7, 5)
    splits = stratified_kfold(dataset, 3, seed=1)
    seen = sorted(i for _, test in splits for i in test)
    assert seen == list(range(12))


def test_kfold_is_seed_deterministic():
    dataset = balanced_dataset(9, 6)
    assert stratified_kfold(dataset, 3, seed=5) == stratified_kfold(dataset, 3, seed=5)


def test_kfold_rejects_underfilled_classes():
    with pytest.raises(ValueError):
        stratified_kfold(balanced_dataset(4, 2), 3, seed=0)
    with pytest.raises(ValueError):
        stratified_kfold(balanced_dataset(4, 4), 1, seed=0)


@given(st.integers(2, 5), st.integers(5, 25), st.integers(5, 25), st.integers(0, 9))
def test_kfold_stratification_is_tight(k, n_pos, n_neg, seed):
    dataset = balanced_dataset(n_pos, n_neg)
    splits = stratified_kfold(dataset, k, seed)
    docs = dataset.documents
    for _, test_idx in splits:
        pos = sum(1 for i in test_idx if docs[i].label is S)
        neg = len(test_idx) - pos
        assert abs(pos - n_pos / k) < 1.0
        assert abs(neg - n_neg / k) < 1.0


def test_gamma_of_values():
    assert gamma_of(3, 1) == pytest.approx(0.75)
    assert gamma_of(2, 2) == pytest.approx(0.5)
    assert gamma_of(0, 5) == 1.0
    with pytest.raises(ValueError):
        gamma_of(0, 0)
    with pytest.raises(ValueError):
        gamma_of(-1, 2)


@given(st.integers(0, 50), st.integers(0, 50))
def test_gamma_of_range(a, b):
    if a + b == 0:
        return
    assert 0.5 <= gamma_of(a, b) <= 1.0


def preds(*rows) -> list[Prediction]:
    return [Prediction(uid, f"t{i}", s) for i, (uid, s) in enumerate(rows)]


def test_adjust_snaps_consistent_users():
    p = preds(("a", S), ("a", S), ("a", O), ("b", O))
    adjusted = adjust(p, 0.6)
    assert [x.stance for x in adjusted] == [S, S, S, O]
    assert [x.tweet_id for x in adjusted] == [x.tweet_id for x in p]


def test_adjust_respects_the_threshold():
    p = preds(("a", S), ("a", S), ("a", O))
    assert adjust(p, 0.7) == p  # gamma 2/3 misses the bar


def test_adjust_leaves_ties_alone():
    p = preds(("a", S), ("a", O))
    assert adjust(p, 0.5) == p


def test_adjust_at_one_only_confirms_unanimity():
    p = preds(("a", S), ("a", S), ("b", S), ("b", O))
    assert adjust(p, 1.0) == p


def test_adjust_validates_threshold():
    with pytest.raises(ValueError):
        adjust([], 0.4)
    with pytest.raises(ValueError):
        adjust([], 1.01)
    assert adjust([], 0.5) == []


@given(
    st.lists(st.tuples(st.sampled_from(["a", "b", "c"]), stance_st), max_size=30),
    st.floats(0.5, 1.0),
)
def test_adjust_is_idempotent_and_majority_preserving(rows, gamma_min):
    p = preds(*rows)
    once = adjust(p, gamma_min)
    assert adjust(once, gamma_min) == once
    for uid in {x.user_id for x in p}:
        before = [x.stance for x in p if x.user_id == uid]
        after = [x.stance for x in once if x.user_id == uid]
        if before.count(S) > before.count(O):
            assert after.count(S) >= before.count(S)
        elif before.count(O) > before.count(S):
            assert after.count(O) >= before.count(O)
        else:
            assert after == before


CV_CFG = TrainConfig(C=1.0, wi=0.9, seed=7)


def test_cross_validate_separable_corpus():
    dataset = separable_dataset()
    result = cross_validate(dataset, 20, CV_CFG, k=4)
    assert result.report.micro_f1 >= 0.95
    assert len(result.predictions) == len(dataset.documents)
    assert set(result.golds) == {d.tweet_id for d in dataset.documents}
    for p in result.predictions:
        assert p.tweet_id in result.golds


def test_cross_validate_report_matches_its_own_pairs():
    dataset = separable_dataset()
    result = cross_validate(dataset, 20, CV_CFG, k=4)
    pairs = [(result.golds[p.tweet_id], p.stance) for p in result.predictions]
    again = compute_metrics(pairs)
    assert again == result.report


def test_cross_validate_leaky_variant_runs():
    dataset = separable_dataset()
    result = cross_validate(dataset, 20, CV_CFG, k=4, leaky_selection=True)
    assert result.report.micro_f1 >= 0.95


def test_cross_validate_is_deterministic():
    dataset = separable_dataset()
    a = cross_validate(dataset, 20, CV_CFG, k=4)
    b = cross_validate(dataset, 20, CV_CFG, k=4)
    assert a.predictions == b.predictions
    assert a.report == b.report


def test_sweep_rows_come_back_sorted():
    dataset = separable_dataset()
    rows = sweep(dataset, "wi", [1.0, 0.5], feature_count=20, cfg=CV_CFG, k=4)
    assert [v for v, _ in rows] == [0.5, 1.0]
    rows = sweep(dataset, "feature_count", [8, 4], cfg=CV_CFG, k=4)
    assert [v for v, _ in rows] == [4.0, 8.0]


def test_sweep_gamma_reuses_one_cross_validation():
    dataset = separable_dataset()
    rows = sweep(dataset, "gamma_min", [1.0, 0.5], feature_count=20, cfg=CV_CFG, k=4)
    assert [v for v, _ in rows] == [0.5, 1.0]
    unadjusted = cross_validate(dataset, 20, CV_CFG, k=4)
    by_value = dict(rows)
    # the 1.0 row only confirms unanimous users, which cannot beat raw output
    assert by_value[1.0].micro_f1 <= by_value[0.5].micro_f1 + 1e-12
    assert by_value[1.0].micro_f1 == pytest.approx(unadjusted.report.micro_f1, abs=1e-12)


def test_sweep_validates_inputs():
    dataset = separable_dataset(4, 1)
    with pytest.raises(ValueError):
        sweep(dataset, "temperature", [1.0])
    with pytest.raises(ValueError):
        sweep(dataset, "wi", [])
    with pytest.raises(ValueError):
        sweep(dataset, "wi", [0.0])
    with pytest.raises(ValueError):
        sweep(dataset, "gamma_min", [0.3])
    with pytest.raises(ValueError):
        sweep(dataset, "feature_count", [2.5])


def test_metrics_csv_shape(tmp_path):
    report = compute_metrics([(S, S), (O, O), (S, O)])
    rows = metrics_csv_rows([(0.5, report), (3000, report)])
    assert rows[0] == METRICS_CSV_HEADER
    assert len(rows) == 5
    assert rows[1][:2] == ["0.5", "support"]
    assert rows[2][:2] == ["0.5", "oppose"]
    assert rows[3][0] == "3000"
    for row in rows[1:]:
        for cell in row[2:]:
            assert len(cell.split(".")[1]) == 4

    out = tmp_path / "metrics.csv"
    with open(out, "w", encoding="utf-8", newline="") as fh:
        write_metrics_csv(fh, [(0.5, report)])
    text = out.read_bytes()
    assert b"\r" not in text
    assert text.decode("utf-8").splitlines()[0] == ",".join(METRICS_CSV_HEADER)


def test_format_axis_value():
    assert format_axis_value(0.5) == "0.5"
    assert format_axis_value(3000.0) == "3000"
    assert format_axis_value(7) == "7"
    assert format_axis_value("pre") == "pre"
