"""Regression trees and the three tree ensembles (RF, extra-trees, boosting).

Trees greedily maximize variance reduction.  Random-forest trees search all
midpoint thresholds between sorted distinct feature values; extra-trees draw
one uniform random threshold per feature and keep the best-scoring feature.
The split scan is a hot loop and runs through the compiled kernel backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import _kernels

SPLIT_BEST = "best"
SPLIT_RANDOM = "random"

MIN_SAMPLES_SPLIT = 2


@dataclass
class TreeNode:
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    left: int = -1  # child indices into the tree's node list
    right: int = -1
    value: float = 0.0


@dataclass
class RegressionTree:
    nodes: list[TreeNode] = field(default_factory=list)

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0])
        for i in range(X.shape[0]):
            j = 0
            node = self.nodes[j]
            while node.feature >= 0:
                j = node.left if X[i, node.feature] <= node.threshold else node.right
                node = self.nodes[j]
            out[i] = node.value
        return out


def build_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int,
    split_strategy: str = SPLIT_BEST,
    rng: np.random.Generator | None = None,
) -> RegressionTree:
    """Grow one variance-reduction regression tree to ``max_depth``."""
    if split_strategy == SPLIT_RANDOM and rng is None:
        raise ValueError("random split strategy needs an rng")
    tree = RegressionTree()

    def grow(idx: np.ndarray, depth: int) -> int:
        node_id = len(tree.nodes)
        tree.nodes.append(TreeNode(value=float(np.mean(y[idx]))))
        if depth >= max_depth or idx.shape[0] < MIN_SAMPLES_SPLIT:
            return node_id
        best_gain, best_feat, best_thr = 0.0, -1, 0.0
        for f in range(X.shape[1]):
            xs = X[idx, f]
            order = np.argsort(xs, kind="stable")
            x_sorted = np.ascontiguousarray(xs[order])
            y_sorted = np.ascontiguousarray(y[idx][order])
            if x_sorted[0] == x_sorted[-1]:
                continue
            if split_strategy == SPLIT_BEST:
                thr, gain, _ = _kernels.best_split(x_sorted, y_sorted)
            else:
                thr = float(rng.uniform(x_sorted[0], x_sorted[-1]))
                gain, _ = _kernels.split_gain(x_sorted, y_sorted, thr)
            if gain > best_gain:
                best_gain, best_feat, best_thr = gain, f, thr
        if best_feat < 0:
            return node_id
        mask = X[idx, best_feat] <= best_thr
        left_idx, right_idx = idx[mask], idx[~mask]
        if left_idx.shape[0] == 0 or right_idx.shape[0] == 0:
            return node_id
        node = tree.nodes[node_id]
        node.feature = best_feat
        node.threshold = float(best_thr)
        node.left = grow(left_idx, depth + 1)
        node.right = grow(right_idx, depth + 1)
        return node_id

    grow(np.arange(X.shape[0]), 0)
    return tree


def _canonical_order(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row order independent of input permutation (features then target)."""
    return np.lexsort((y,) + tuple(X[:, f] for f in reversed(range(X.shape[1]))))


@dataclass
class ForestParams:
    trees: list[RegressionTree]

    def predict(self, X: np.ndarray) -> np.ndarray:
        acc = np.zeros(X.shape[0])
        for t in self.trees:
            acc += t.predict(X)
        return acc / len(self.trees)


def fit_forest(
    X: np.ndarray,
    y: np.ndarray,
    n_trees: int,
    max_depth: int,
    bootstrap: bool,
    seed: int,
    split_strategy: str = SPLIT_BEST,
) -> ForestParams:
    """Bagged ensemble of trees (random forest / extra-trees backbone).

    Rows are put in canonical order before bootstrap indices are drawn, so
    training is invariant to the input row order for a fixed seed.
    """
    order = _canonical_order(X, y)
    Xc, yc = X[order], y[order]
    rng = np.random.default_rng(seed)
    trees = []
    n = Xc.shape[0]
    for _ in range(n_trees):
        if bootstrap:
            pick = rng.integers(0, n, n)
            Xb, yb = Xc[pick], yc[pick]
        else:
            Xb, yb = Xc, yc
        trees.append(build_tree(Xb, yb, max_depth, split_strategy, rng))
    return ForestParams(trees)


@dataclass
class BoostingParams:
    init_value: float
    learning_rate: float
    trees: list[RegressionTree]

    def predict(self, X: np.ndarray) -> np.ndarray:
        acc = np.full(X.shape[0], self.init_value)
        for t in self.trees:
            acc += self.learning_rate * t.predict(X)
        return acc


def fit_boosting(
    X: np.ndarray,
    y: np.ndarray,
    n_stages: int,
    learning_rate: float,
    max_depth: int,
) -> BoostingParams:
    """Sequential least-squares boosting: each stage fits the residual."""
    order = _canonical_order(X, y)
    Xc, yc = X[order], y[order]
    init = float(np.mean(yc))
    current = np.full(Xc.shape[0], init)
    trees = []
    for _ in range(n_stages):
        residual = yc - current
        tree = build_tree(Xc, residual, max_depth, SPLIT_BEST)
        trees.append(tree)
        current += learning_rate * tree.predict(Xc)
    return BoostingParams(init, learning_rate, trees)
