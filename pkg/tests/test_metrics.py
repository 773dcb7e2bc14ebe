import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from roomsense.classifier import DecisionTreeModel, Leaf
from roomsense.errors import EmptySet
from roomsense.fingerprints import FingerprintDatabase, LabeledSample
from roomsense.metrics import (DegenerateClass, LengthMismatch, UnknownLabel, accuracy,
                               binary_roc, confusion, dump_metrics, evaluate, rank_auc, roc_csv,
                               roc_macro, roc_micro, roc_ovr)

from conftest import mac
from oracles import pair_count_auc


def test_confusion_nineteen_room1():
    cm = confusion([1] * 19, [1] * 19, (1, 2, 3))
    assert cm.counts[0] == (19, 0, 0)


def test_confusion_perfect_is_diagonal():
    truths = [1, 2, 3, 3, 2]
    cm = confusion(truths, truths, (1, 2, 3))
    assert cm.counts == ((1, 0, 0), (0, 2, 0), (0, 0, 2))


def test_confusion_hand_tally():
    cm = confusion([1, 1, 2], [1, 2, 2], (1, 2))
    assert cm.counts == ((1, 1), (0, 1))
    assert cm.cell(1, 2) == 1


def test_confusion_errors():
    with pytest.raises(LengthMismatch):
        confusion([1, 2], [1], (1, 2))
    with pytest.raises(UnknownLabel):
        confusion([1, 4], [1, 1], (1, 2))


@given(st.lists(st.tuples(st.integers(1, 4), st.integers(1, 4)), max_size=60))
def test_confusion_margins(pairs):
    truths = [t for t, _ in pairs]
    preds = [p for _, p in pairs]
    cm = confusion(truths, preds, (1, 2, 3, 4))
    assert cm.row_sums() == [truths.count(c) for c in (1, 2, 3, 4)]
    assert cm.column_sums() == [preds.count(c) for c in (1, 2, 3, 4)]
    assert cm.total == len(pairs)
    if pairs:
        assert 0.0 <= accuracy(cm) <= 1.0


def test_accuracy():
    assert accuracy(confusion([1, 2, 3], [1, 2, 3], (1, 2, 3))) == 1.0
    assert accuracy(confusion([1, 2, 3], [2, 3, 1], (1, 2, 3))) == 0.0
    with pytest.raises(EmptySet):
        accuracy(confusion([], [], (1, 2)))


def test_accuracy_for_room2_two_wrong():
    # room1 19/19, room2 two mislabeled, room3 all right: (19 + n2 - 2 + n3) / (19 + n2 + n3)
    for n2, n3 in [(19, 19), (20, 18), (15, 21)]:
        truths = [1] * 19 + [2] * n2 + [3] * n3
        preds = [1] * 19 + [2] * (n2 - 2) + [3, 1] + [3] * n3
        acc = accuracy(confusion(truths, preds, (1, 2, 3)))
        assert acc == (19 + n2 - 2 + n3) / (19 + n2 + n3)


def test_roc_separable():
    curve = binary_roc([0.9, 0.8, 0.3, 0.1], [True, True, False, False])
    assert curve.auc == 1.0
    assert curve.points[0] == (0.0, 0.0) and curve.points[-1] == (1.0, 1.0)


def test_roc_constant_scores():
    curve = binary_roc([0.4] * 6, [True, False, True, False, False, True])
    assert curve.points == [(0.0, 0.0), (1.0, 1.0)]
    assert curve.auc == 0.5


def test_roc_worked_example():
    pos, neg = [0.9, 0.4], [0.6, 0.1]
    curve = binary_roc(pos + neg, [True, True, False, False])
    assert pair_count_auc(pos, neg) == 0.75
    assert curve.auc == 0.75


def test_roc_degenerate():
    with pytest.raises(DegenerateClass):
        binary_roc([0.1, 0.2], [True, True])
    with pytest.raises(DegenerateClass):
        roc_ovr([{1: 1.0}, {1: 0.5}], [2, 2], 1)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0]) | st.floats(0, 1),
                          st.booleans()), min_size=2, max_size=50)
       .filter(lambda xs: any(b for _, b in xs) and not all(b for _, b in xs)))
def test_auc_equals_pair_counting(pairs):
    scores = [s for s, _ in pairs]
    labels = [b for _, b in pairs]
    curve = binary_roc(scores, labels)
    pos = [s for s, b in pairs if b]
    neg = [s for s, b in pairs if not b]
    assert abs(curve.auc - float(pair_count_auc(pos, neg))) <= 1e-12
    assert abs(rank_auc(pos, neg) - float(pair_count_auc(pos, neg))) <= 1e-12
    assert all(np.diff(curve.fpr) >= 0) and all(np.diff(curve.tpr) >= 0)
    assert curve.points[0] == (0.0, 0.0) and curve.points[-1] == (1.0, 1.0)


def test_roc_ovr_uses_class_score():
    scores = [{1: 0.8, 2: 0.2}, {1: 0.3, 2: 0.7}, {1: 0.6, 2: 0.4}]
    truths = [1, 2, 2]
    assert roc_ovr(scores, truths, 1).auc == float(pair_count_auc([0.8], [0.3, 0.6]))
    assert roc_ovr(scores, truths, 2).auc == float(pair_count_auc([0.7, 0.4], [0.2]))


def test_micro_pools_all_decisions():
    scores = [{1: 0.8, 2: 0.2}, {1: 0.3, 2: 0.7}, {1: 0.6, 2: 0.4}]
    truths = [1, 2, 2]
    pos = [0.8, 0.7, 0.4]
    neg = [0.2, 0.3, 0.6]
    assert roc_micro(scores, truths, (1, 2)).auc == pytest.approx(float(pair_count_auc(pos, neg)), abs=1e-12)


def test_perfect_classifier_micro_macro():
    scores = [{1: 1.0, 2: 0.0, 3: 0.0}, {1: 0.0, 2: 1.0, 3: 0.0}, {1: 0.0, 2: 0.0, 3: 1.0}] * 3
    truths = [1, 2, 3] * 3
    curves = [roc_ovr(scores, truths, c) for c in (1, 2, 3)]
    assert roc_micro(scores, truths, (1, 2, 3)).auc == 1.0
    assert roc_macro(curves).auc == 1.0


def test_macro_of_identical_curves():
    curve = binary_roc([0.9, 0.7, 0.6, 0.4, 0.3, 0.2], [True, False, True, True, False, False])
    macro = roc_macro([curve, curve, curve])
    assert abs(macro.auc - curve.auc) <= 0.01
    # away from the vertical step at fpr = 1/3 the grid curve equals the step curve
    at = dict(macro.points[1:])
    assert at[0.2] == pytest.approx(1 / 3) and at[0.5] == 1.0 and at[0.0] == pytest.approx(1 / 3)
    assert macro.points[0] == (0.0, 0.0) and macro.points[-1] == (1.0, 1.0)


def test_macro_average_of_perfect_and_chance():
    perfect = binary_roc([0.9, 0.8, 0.2, 0.1], [True, True, False, False])
    chance = binary_roc([0.5] * 4, [True, True, False, False])
    assert (perfect.auc, chance.auc) == (1.0, 0.5)
    assert roc_macro([perfect, chance]).auc == pytest.approx(0.75, abs=0.01)


def test_evaluate_and_exports():
    model = DecisionTreeModel(Leaf({1: 3, 2: 1}), 1, (1, 2))
    test = FingerprintDatabase([mac(1)], [LabeledSample([-50], 1), LabeledSample([-60], 2)])
    result = evaluate(model, test)
    doc = json.loads(dump_metrics(result))
    assert doc["accuracy"] == 0.5
    assert doc["confusion"]["counts"] == [[1, 0], [1, 0]]
    assert doc["auc"]["per_class"] == {"1": 0.5, "2": 0.5}
    rows = list(csv.reader(io.StringIO(roc_csv(result))))
    assert rows[0] == ["class", "fpr", "tpr"]
    assert {r[0] for r in rows[1:]} == {"1", "2", "micro", "macro"}


def test_render_orientation():
    text = confusion([1, 1, 2], [1, 2, 2], (1, 2)).render()
    lines = text.splitlines()
    assert lines[0].split()[1:] == ["room1", "room2"]
    assert lines[1].split() == ["room1", "1", "1"]
    assert lines[2].split() == ["room2", "0", "1"]
