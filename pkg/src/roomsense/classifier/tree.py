"""CART decision tree with Gini impurity over integer RSSI features."""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..errors import EmptyDataset, EmptySet, ShapeError

# gains within this distance of the best are treated as ties
TIE_EPS = 1e-12


def gini(counts) -> float:
    """``1 - sum(p_k^2)`` for a mapping (or sequence) of class counts."""
    values = list(counts.values()) if isinstance(counts, dict) else list(counts)
    n = sum(values)
    if n <= 0:
        raise EmptySet("gini of an empty set")
    return 1.0 - sum((c / n) ** 2 for c in values)


@dataclass(frozen=True)
class TrainConfig:
    max_depth: Optional[int] = None
    min_samples_leaf: int = 1
    min_gain: float = 1e-12

    def __post_init__(self):
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")


@dataclass(frozen=True)
class Leaf:
    counts: dict

    def __post_init__(self):
        if not self.counts or sum(self.counts.values()) <= 0:
            raise ValueError("leaf needs a non-empty class distribution")


@dataclass(frozen=True)
class Internal:
    feature: int
    threshold: float
    left: "Node"
    right: "Node"


Node = Union[Leaf, Internal]


def _argmax_proba(proba: dict) -> int:
    best = max(proba.values())
    return min(room for room, p in proba.items() if p == best)


@dataclass(frozen=True)
class DecisionTreeModel:
    root: Node
    ap_count: int
    classes: tuple

    def _check(self, rssi):
        if len(rssi) != self.ap_count:
            raise ShapeError(f"expected {self.ap_count} readings, got {len(rssi)}")

    def leaf(self, rssi) -> Leaf:
        self._check(rssi)
        node = self.root
        while isinstance(node, Internal):
            node = node.left if rssi[node.feature] <= node.threshold else node.right
        return node

    def predict_proba(self, rssi) -> dict:
        counts = self.leaf(rssi).counts
        total = sum(counts.values())
        return {c: counts.get(c, 0) / total for c in self.classes}

    def predict(self, rssi) -> int:
        return _argmax_proba(self.predict_proba(rssi))

    @property
    def depth(self) -> int:
        def walk(node):
            if isinstance(node, Leaf):
                return 0
            return 1 + max(walk(node.left), walk(node.right))
        return walk(self.root)

    @property
    def n_leaves(self) -> int:
        def walk(node):
            if isinstance(node, Leaf):
                return 1
            return walk(node.left) + walk(node.right)
        return walk(self.root)


def best_split(X, y, candidate_features, min_samples_leaf=1, min_gain=1e-12):
    """Exhaustive search for the Gini-optimal ``(feature, threshold, gain)``.

    Thresholds are midpoints between consecutive distinct values. Ties go to
    the lowest feature index, then the lowest threshold. Returns ``None``
    when no candidate beats ``min_gain``.
    """
    X = np.asarray(X)
    y = np.asarray(y)
    n = len(y)
    if n < 2:
        return None
    _, y_idx = np.unique(y, return_inverse=True)
    k = int(y_idx.max()) + 1
    onehot = np.eye(k, dtype=np.int64)[y_idx]
    total = onehot.sum(axis=0)
    parent = 1.0 - float(np.sum((total / n) ** 2))

    candidates = []  # (gain, feature, threshold) in tie-break order
    for f in sorted(candidate_features):
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        left = np.cumsum(onehot[order], axis=0)[:-1]
        n_left = np.arange(1, n)
        valid = (xs[1:] != xs[:-1]) & (n_left >= min_samples_leaf) & (n - n_left >= min_samples_leaf)
        if not valid.any():
            continue
        left = left[valid]
        n_l = n_left[valid].astype(float)
        n_r = n - n_l
        right = total - left
        g_l = 1.0 - np.sum((left / n_l[:, None]) ** 2, axis=1)
        g_r = 1.0 - np.sum((right / n_r[:, None]) ** 2, axis=1)
        gains = parent - (n_l / n) * g_l - (n_r / n) * g_r
        lo = xs[:-1][valid]
        hi = xs[1:][valid]
        for gain, a, b in zip(gains, lo, hi):
            candidates.append((float(gain), int(f), (float(a) + float(b)) / 2.0))
    if not candidates:
        return None
    top = max(c[0] for c in candidates)
    if top <= min_gain:
        return None
    for gain, f, thr in candidates:
        if gain >= top - TIE_EPS:
            return f, thr, gain


def _grow(X, y, depth, cfg: TrainConfig, pick_features):
    rooms, counts = np.unique(y, return_counts=True)
    leaf = Leaf({int(r): int(c) for r, c in zip(rooms, counts)})
    if len(rooms) == 1:
        return leaf
    if cfg.max_depth is not None and depth >= cfg.max_depth:
        return leaf
    if len(y) < 2 * cfg.min_samples_leaf:
        return leaf
    found = best_split(X, y, pick_features(), cfg.min_samples_leaf, cfg.min_gain)
    if found is None:
        return leaf
    f, thr, _ = found
    mask = X[:, f] <= thr
    return Internal(f, thr,
                    _grow(X[mask], y[mask], depth + 1, cfg, pick_features),
                    _grow(X[~mask], y[~mask], depth + 1, cfg, pick_features))


def fit_arrays(X, y, cfg: TrainConfig = TrainConfig(), pick_features=None, classes=None):
    X = np.asarray(X)
    y = np.asarray(y)
    if len(y) == 0:
        raise EmptyDataset("cannot fit a tree on zero samples")
    ap_count = X.shape[1]
    if pick_features is None:
        all_features = list(range(ap_count))
        pick_features = lambda: all_features  # noqa: E731
    if classes is None:
        classes = sorted(int(c) for c in np.unique(y))
    root = _grow(X, y, 0, cfg, pick_features)
    return DecisionTreeModel(root, ap_count, tuple(classes))


def fit_tree(train, cfg: TrainConfig = TrainConfig()) -> DecisionTreeModel:
    if len(train) == 0:
        raise EmptyDataset("cannot fit a tree on an empty database")
    X, y = train.matrix()
    return fit_arrays(X, y, cfg)


def default_feature_subsample(ap_count: int) -> int:
    return math.ceil(math.sqrt(ap_count))
