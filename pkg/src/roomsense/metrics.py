"""Accuracy, confusion matrix and one-vs-rest ROC analysis.

Confusion matrices are oriented rows = true class, columns = predicted class
everywhere in this package, including the text renderer.
"""

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import EmptySet, RoomsenseError

MACRO_GRID = np.linspace(0.0, 1.0, 101)


class LengthMismatch(RoomsenseError, ValueError):
    pass


class UnknownLabel(RoomsenseError, ValueError):
    pass


class DegenerateClass(RoomsenseError, ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple
    counts: tuple   # counts[i][j]: truth classes[i], predicted classes[j]

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))

    def row_sums(self) -> list:
        return [sum(r) for r in self.counts]

    def column_sums(self) -> list:
        return [sum(col) for col in zip(*self.counts)]

    def cell(self, truth, pred) -> int:
        return self.counts[self.classes.index(truth)][self.classes.index(pred)]

    def render(self) -> str:
        labels = [f"room{c}" for c in self.classes]
        width = max(len(s) for s in labels + [str(self.total), "true\\pred"])
        head = "true\\pred".ljust(width) + "".join(s.rjust(width + 1) for s in labels)
        lines = [head]
        for label, row in zip(labels, self.counts):
            lines.append(label.ljust(width) + "".join(str(v).rjust(width + 1) for v in row))
        return "\n".join(lines)


def confusion(truths, preds, classes) -> ConfusionMatrix:
    truths, preds, classes = list(truths), list(preds), tuple(classes)
    if len(truths) != len(preds):
        raise LengthMismatch(f"{len(truths)} truths vs {len(preds)} predictions")
    index = {c: i for i, c in enumerate(classes)}
    grid = [[0] * len(classes) for _ in classes]
    for t, p in zip(truths, preds):
        if t not in index or p not in index:
            raise UnknownLabel(f"label {t if t not in index else p!r} not in {classes}")
        grid[index[t]][index[p]] += 1
    return ConfusionMatrix(classes, tuple(tuple(r) for r in grid))


def accuracy(cm: ConfusionMatrix) -> float:
    total = cm.total
    if total == 0:
        raise EmptySet("accuracy of an empty confusion matrix")
    return sum(cm.counts[i][i] for i in range(len(cm.classes))) / total


@dataclass(frozen=True)
class RocCurve:
    fpr: tuple
    tpr: tuple
    auc: float

    @property
    def points(self) -> list:
        return list(zip(self.fpr, self.tpr))


def trapezoid(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.sum((x[1:] - x[:-1]) * (y[1:] + y[:-1]) / 2.0))


def binary_roc(scores, labels) -> RocCurve:
    """ROC for one binary problem; samples sharing a score move as one step."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateClass(f"need positives and negatives, got {n_pos} and {n_neg}")
    order = np.argsort(-scores, kind="stable")
    s, lab = scores[order], labels[order]
    tp = np.cumsum(lab)
    fp = np.cumsum(~lab)
    # keep only the last index of each run of equal scores
    last = np.r_[s[1:] != s[:-1], True]
    fpr = np.r_[0.0, fp[last] / n_neg]
    tpr = np.r_[0.0, tp[last] / n_pos]
    if fpr[-1] != 1.0 or tpr[-1] != 1.0:
        fpr, tpr = np.r_[fpr, 1.0], np.r_[tpr, 1.0]
    return RocCurve(tuple(map(float, fpr)), tuple(map(float, tpr)), trapezoid(fpr, tpr))


def roc_ovr(scores, truths, positive_class) -> RocCurve:
    """One-vs-rest ROC from per-sample probability maps."""
    s = [float(m.get(positive_class, 0.0)) for m in scores]
    y = [t == positive_class for t in truths]
    if len(s) != len(y):
        raise LengthMismatch(f"{len(s)} score maps vs {len(y)} truths")
    return binary_roc(s, y)


def roc_micro(scores, truths, classes) -> RocCurve:
    truths = list(truths)
    if len(scores) != len(truths):
        raise LengthMismatch(f"{len(scores)} score maps vs {len(truths)} truths")
    s, y = [], []
    for m, t in zip(scores, truths):
        for c in classes:
            s.append(float(m.get(c, 0.0)))
            y.append(t == c)
    return binary_roc(s, y)


def _tpr_on_grid(curve: RocCurve, grid) -> np.ndarray:
    """Piecewise-linear TPR at each grid FPR; at a vertical step take the top."""
    fpr = np.asarray(curve.fpr)
    tpr = np.asarray(curve.tpr)
    out = np.zeros(len(grid))
    for j, x in enumerate(grid):
        best = 0.0
        for i in range(len(fpr) - 1):
            x0, x1 = fpr[i], fpr[i + 1]
            if x0 <= x <= x1:
                y = tpr[i + 1] if x1 == x0 else tpr[i] + (x - x0) / (x1 - x0) * (tpr[i + 1] - tpr[i])
                best = max(best, y)
        out[j] = best
    return out


def roc_macro(curves, grid=MACRO_GRID) -> RocCurve:
    """Average per-class TPR on a fixed FPR grid (linear interpolation)."""
    curves = list(curves)
    if not curves:
        raise EmptySet("macro average of zero curves")
    grid = np.asarray(grid, dtype=float)
    mean_tpr = np.mean([_tpr_on_grid(c, grid) for c in curves], axis=0)
    auc = trapezoid(grid, mean_tpr)
    fpr, tpr = grid, mean_tpr
    if tpr[0] != 0.0:
        fpr, tpr = np.r_[0.0, fpr], np.r_[0.0, tpr]
    return RocCurve(tuple(map(float, fpr)), tuple(map(float, tpr)), auc)


def rank_auc(pos_scores, neg_scores) -> float:
    """Mann-Whitney statistic by pair counting (ties count one half)."""
    pos = np.asarray(pos_scores, dtype=float)[:, None]
    neg = np.asarray(neg_scores, dtype=float)[None, :]
    return float(((pos > neg).sum() + 0.5 * (pos == neg).sum()) / (pos.size * neg.size))


def evaluate(model, test, classes=None) -> dict:
    """Full metric suite for ``model`` on a test database."""
    classes = tuple(classes or model.classes)
    truths = [s.room for s in test.samples]
    scores = [model.predict_proba(s.rssi) for s in test.samples]
    preds = [model.predict(s.rssi) for s in test.samples]
    cm = confusion(truths, preds, classes)
    per_class = {c: roc_ovr(scores, truths, c) for c in classes}
    return {
        "confusion": cm,
        "accuracy": accuracy(cm),
        "roc": per_class,
        "micro": roc_micro(scores, truths, classes),
        "macro": roc_macro(per_class.values()),
    }


def metrics_json(result: dict) -> dict:
    cm = result["confusion"]
    return {
        "accuracy": result["accuracy"],
        "confusion": {"classes": list(cm.classes), "orientation": "rows=true,columns=predicted",
                      "counts": [list(r) for r in cm.counts]},
        "auc": {"per_class": {str(c): r.auc for c, r in result["roc"].items()},
                "micro": result["micro"].auc, "macro": result["macro"].auc},
    }


def dump_metrics(result: dict) -> str:
    return json.dumps(metrics_json(result), indent=2, sort_keys=True) + "\n"


def roc_csv(result: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["class", "fpr", "tpr"])
    named = [(str(c), r) for c, r in result["roc"].items()]
    named += [("micro", result["micro"]), ("macro", result["macro"])]
    for name, curve in named:
        for f, t in curve.points:
            w.writerow([name, repr(f), repr(t)])
    return buf.getvalue()
