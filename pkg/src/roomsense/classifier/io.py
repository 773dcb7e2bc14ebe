"""JSON model files.

Every file carries ``kind`` (``tree`` | ``gnb`` | ``forest``), ``version``,
``ap_count`` and ``classes``. Tree nodes are nested objects: leaves are
``{"counts": {"<room>": n, ...}}``, internal nodes are
``{"feature": i, "threshold": t, "left": {...}, "right": {...}}``.
"""

import json
from pathlib import Path

from ..errors import ParseError
from .forest import RandomForestModel
from .naive_bayes import GaussianNBModel
from .tree import DecisionTreeModel, Internal, Leaf

FORMAT_VERSION = 1


def _node_to_dict(node):
    if isinstance(node, Leaf):
        return {"counts": {str(k): v for k, v in sorted(node.counts.items())}}
    return {"feature": node.feature, "threshold": node.threshold,
            "left": _node_to_dict(node.left), "right": _node_to_dict(node.right)}


def _node_from_dict(doc):
    if "counts" in doc:
        return Leaf({int(k): int(v) for k, v in doc["counts"].items()})
    return Internal(int(doc["feature"]), float(doc["threshold"]),
                    _node_from_dict(doc["left"]), _node_from_dict(doc["right"]))


def _tree_body(model: DecisionTreeModel):
    return {"ap_count": model.ap_count, "classes": list(model.classes),
            "root": _node_to_dict(model.root)}


def _tree_from_body(doc):
    return DecisionTreeModel(_node_from_dict(doc["root"]), int(doc["ap_count"]),
                             tuple(int(c) for c in doc["classes"]))


def model_to_dict(model) -> dict:
    if isinstance(model, DecisionTreeModel):
        return {"kind": "tree", "version": FORMAT_VERSION, **_tree_body(model), "params": {}}
    if isinstance(model, GaussianNBModel):
        return {"kind": "gnb", "version": FORMAT_VERSION, "ap_count": model.ap_count,
                "classes": list(model.classes),
                "params": {"priors": list(model.priors),
                           "means": [list(m) for m in model.means],
                           "variances": [list(v) for v in model.variances]}}
    if isinstance(model, RandomForestModel):
        return {"kind": "forest", "version": FORMAT_VERSION, "ap_count": model.ap_count,
                "classes": list(model.classes),
                "params": {"n_trees": model.n_trees, "feature_subsample": model.feature_subsample,
                           "bootstrap": model.bootstrap, "seed": model.seed,
                           "trees": [_tree_body(t) for t in model.trees]}}
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(doc: dict):
    try:
        kind = doc["kind"]
        if doc.get("version") != FORMAT_VERSION:
            raise ParseError(f"unsupported model version {doc.get('version')!r}")
        classes = tuple(int(c) for c in doc["classes"])
        ap_count = int(doc["ap_count"])
        p = doc["params"]
        if kind == "tree":
            return _tree_from_body(doc)
        if kind == "gnb":
            return GaussianNBModel(classes, tuple(p["priors"]),
                                   tuple(tuple(m) for m in p["means"]),
                                   tuple(tuple(v) for v in p["variances"]), ap_count)
        if kind == "forest":
            trees = tuple(_tree_from_body(t) for t in p["trees"])
            return RandomForestModel(trees, classes, ap_count, int(p["n_trees"]),
                                     int(p["feature_subsample"]), bool(p["bootstrap"]), int(p["seed"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed model document: {exc!r}") from exc
    raise ParseError(f"unknown model kind {kind!r}")


def save_model(model, path) -> None:
    text = json.dumps(model_to_dict(model), indent=1, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_model(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}", line=exc.lineno) from exc
    return model_from_dict(doc)
