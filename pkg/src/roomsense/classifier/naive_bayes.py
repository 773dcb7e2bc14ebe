"""Gaussian naive Bayes baseline."""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyClass, EmptyDataset, ShapeError
from .tree import _argmax_proba

VAR_FLOOR = 1e-6


@dataclass(frozen=True)
class GaussianNBModel:
    classes: tuple
    priors: tuple          # per class
    means: tuple           # per class, per feature
    variances: tuple       # per class, per feature, floored
    ap_count: int

    def log_joint(self, rssi) -> np.ndarray:
        if len(rssi) != self.ap_count:
            raise ShapeError(f"expected {self.ap_count} readings, got {len(rssi)}")
        x = np.asarray(rssi, dtype=float)
        mu = np.asarray(self.means)
        var = np.asarray(self.variances)
        ll = -0.5 * np.sum(np.log(2 * math.pi * var) + (x - mu) ** 2 / var, axis=1)
        return np.log(np.asarray(self.priors)) + ll

    def predict_proba(self, rssi) -> dict:
        lj = self.log_joint(rssi)
        top = lj.max()
        w = np.exp(lj - top)
        p = w / w.sum()
        return {c: float(v) for c, v in zip(self.classes, p)}

    def predict(self, rssi) -> int:
        return _argmax_proba(self.predict_proba(rssi))


def fit_gnb_arrays(X, y, classes=None) -> GaussianNBModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if len(y) == 0:
        raise EmptyDataset("cannot fit naive Bayes on zero samples")
    if classes is None:
        classes = sorted(int(c) for c in np.unique(y))
    priors, means, variances = [], [], []
    for c in classes:
        rows = X[y == c]
        if len(rows) == 0:
            raise EmptyClass(f"class {c} has no training samples")
        priors.append(len(rows) / len(y))
        means.append(tuple(float(v) for v in rows.mean(axis=0)))
        variances.append(tuple(float(max(v, VAR_FLOOR)) for v in rows.var(axis=0)))
    return GaussianNBModel(tuple(classes), tuple(priors), tuple(means), tuple(variances), X.shape[1])


def fit_gnb(train) -> GaussianNBModel:
    X, y = train.matrix()
    return fit_gnb_arrays(X, y)


def predict_gnb(model: GaussianNBModel, rssi):
    proba = model.predict_proba(rssi)
    return _argmax_proba(proba), proba
