"""Bagged random forest of CART trees."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import EmptyDataset
from ..rng import stream
from .tree import DecisionTreeModel, TrainConfig, _argmax_proba, default_feature_subsample, fit_arrays


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 25
    feature_subsample: Optional[int] = None   # None -> ceil(sqrt(ap_count))
    bootstrap: bool = True
    tree: TrainConfig = TrainConfig()

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.feature_subsample is not None and self.feature_subsample < 1:
            raise ValueError("feature_subsample must be >= 1")


@dataclass(frozen=True)
class RandomForestModel:
    trees: tuple
    classes: tuple
    ap_count: int
    n_trees: int
    feature_subsample: int
    bootstrap: bool
    seed: int

    def predict_proba(self, rssi) -> dict:
        acc = {c: 0.0 for c in self.classes}
        for tree in self.trees:
            for c, p in tree.predict_proba(rssi).items():
                acc[c] += p
        return {c: v / len(self.trees) for c, v in acc.items()}

    def predict(self, rssi) -> int:
        return _argmax_proba(self.predict_proba(rssi))


def _fit_one(X, y, classes, params, k, seed, index) -> DecisionTreeModel:
    # each tree gets its own stream so results do not depend on fit order
    rng = stream(seed, "forest", index)
    n, ap_count = X.shape
    if params.bootstrap:
        rows = rng.integers(0, n, size=n)
        X, y = X[rows], y[rows]

    def pick():
        return sorted(int(f) for f in rng.choice(ap_count, size=k, replace=False))

    return fit_arrays(X, y, params.tree, pick_features=pick, classes=classes)


def fit_forest(train, params: ForestParams = ForestParams(), seed: int = 0) -> RandomForestModel:
    if len(train) == 0:
        raise EmptyDataset("cannot fit a forest on an empty database")
    X, y = train.matrix()
    ap_count = X.shape[1]
    k = params.feature_subsample or default_feature_subsample(ap_count)
    k = min(k, ap_count)
    classes = tuple(sorted(int(c) for c in np.unique(y)))
    trees = tuple(_fit_one(X, y, classes, params, k, seed, i) for i in range(params.n_trees))
    return RandomForestModel(trees, classes, ap_count, params.n_trees, k, params.bootstrap, seed)


def predict_forest(model: RandomForestModel, rssi):
    proba = model.predict_proba(rssi)
    return _argmax_proba(proba), proba
