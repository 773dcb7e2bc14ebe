"""Room classifiers over RSSI vectors.

All models expose ``predict(rssi) -> room`` and ``predict_proba(rssi) ->
{room: p}``; ``predict`` is the argmax of ``predict_proba`` with ties going to
the lowest room id.
"""

from .forest import ForestParams, RandomForestModel, fit_forest, predict_forest
from .io import load_model, model_from_dict, model_to_dict, save_model
from .naive_bayes import GaussianNBModel, fit_gnb, predict_gnb
from .tree import (DecisionTreeModel, Internal, Leaf, TrainConfig, best_split, fit_tree,
                   gini)

KINDS = ("tree", "gnb", "forest")


def predict(model, rssi) -> int:
    return model.predict(rssi)


def predict_proba(model, rssi) -> dict:
    return model.predict_proba(rssi)


def fit(kind: str, train, tree_cfg: TrainConfig = TrainConfig(),
        forest: ForestParams = ForestParams(), seed: int = 0):
    if kind == "tree":
        return fit_tree(train, tree_cfg)
    if kind == "gnb":
        return fit_gnb(train)
    if kind == "forest":
        return fit_forest(train, forest, seed)
    raise ValueError(f"unknown classifier kind {kind!r}; expected one of {KINDS}")


__all__ = [
    "DecisionTreeModel", "ForestParams", "GaussianNBModel", "Internal", "KINDS", "Leaf",
    "RandomForestModel", "TrainConfig", "best_split", "fit", "fit_forest", "fit_gnb",
    "fit_tree", "gini", "load_model", "model_from_dict", "model_to_dict", "predict",
    "predict_forest", "predict_gnb", "predict_proba", "save_model",
]
