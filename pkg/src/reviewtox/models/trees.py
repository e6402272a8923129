"""CART trees and the two tree ensembles (bagged forest, gradient boosting)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .. import _backend
from ..rng import SplitMix64, derive_seed
from . import _kernels as K

_NO_LIMIT = np.iinfo(np.int64).max


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_node_samples: np.ndarray
    weighted_n_node_samples: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.feature.size)

    @property
    def n_leaves(self) -> int:
        return int((self.feature < 0).sum())

    def apply(self, X: sp.csr_matrix) -> np.ndarray:
        if _backend.BACKEND == "numba":
            return K.apply_tree_nb(X.indptr.astype(np.int64), X.indices.astype(np.int64),
                                   X.data.astype(np.float64), self.feature, self.threshold,
                                   self.left, self.right)
        return K.apply_tree_np(X, self.feature, self.threshold, self.left, self.right)

    def predict_value(self, X: sp.csr_matrix) -> np.ndarray:
        return self.value[self.apply(X)]


def as_csr(X) -> sp.csr_matrix:
    X = sp.csr_matrix(X, dtype=np.float64)
    X.eliminate_zeros()
    X.sort_indices()
    return X


def _csc_parts(X: sp.csr_matrix):
    C = X.tocsc()
    C.sort_indices()
    return C.indptr.astype(np.int64), C.indices.astype(np.int64), C.data.astype(np.float64)


def grow_tree(csc, n_features, y, w, *, max_depth=None, min_samples_split=2,
              min_samples_leaf=1, max_features=None, criterion="gini", seed=0) -> Tree:
    """Grow one tree on rows with positive weight.

    ``csc`` is the ``(indptr, indices, data)`` triple of a CSC matrix. With
    ``max_features`` below ``n_features`` each node scans features in a
    seeded random order and stops after that many non-constant ones.
    """
    builder = K.build_tree_nb if _backend.BACKEND == "numba" else K.build_tree_np
    arrays = builder(
        n_features, csc[0], csc[1], csc[2],
        np.ascontiguousarray(y, dtype=np.float64), np.ascontiguousarray(w, dtype=np.float64),
        _NO_LIMIT if max_depth is None else int(max_depth),
        int(min_samples_split), int(min_samples_leaf),
        n_features if max_features is None else int(max_features),
        K.GINI if criterion == "gini" else K.MSE,
        np.uint64(seed & ((1 << 64) - 1)),
    )
    return Tree(*arrays)


def bootstrap_counts(n: int, seed: int) -> np.ndarray:
    """How often each of ``n`` rows is drawn in ``n`` draws with replacement."""
    g = SplitMix64(seed)
    counts = np.zeros(n, dtype=np.float64)
    for _ in range(n):
        counts[g.next_u64() % n] += 1
    return counts


if _backend.HAVE_NUMBA:
    @_backend.njit
    def _bootstrap_counts_nb(n, seed):
        state = np.empty(1, np.uint64)
        state[0] = np.uint64(seed)
        counts = np.zeros(n, np.float64)
        for _ in range(n):
            counts[np.int64(K._sm_next_nb(state) % np.uint64(n))] += 1.0
        return counts

    def _bootstrap(n, seed):
        if _backend.BACKEND == "numba":
            return _bootstrap_counts_nb(n, np.uint64(seed))
        return bootstrap_counts(n, seed)
else:  # pragma: no cover
    _bootstrap = bootstrap_counts


class DecisionTree:
    """CART classifier with Gini impurity; scores are leaf class-1 fractions."""

    kind = "DT"

    def __init__(self, max_depth=None, min_samples_split=2, seed=0):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.seed = seed
        self.tree_: Tree | None = None
        self.n_features = 0

    def fit(self, X, y):
        X = as_csr(X)
        self.n_features = X.shape[1]
        y = np.asarray(y, dtype=np.float64)
        self.tree_ = grow_tree(_csc_parts(X), self.n_features, y, np.ones_like(y),
                               max_depth=self.max_depth, min_samples_split=self.min_samples_split,
                               seed=self.seed)
        return self

    def scores(self, X):
        return self.tree_.predict_value(X)

    def trees(self):
        return [self.tree_]


class RandomForest:
    """Bagged CART forest; a row's score is the fraction of trees voting class 1."""

    kind = "RF"

    def __init__(self, n_trees=100, min_samples_split=5, max_features="sqrt",
                 bootstrap=True, max_depth=None, seed=0):
        self.n_trees = n_trees
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.max_depth = max_depth
        self.seed = seed
        self.trees_: list[Tree] = []
        self.n_features = 0

    def _n_candidates(self, d):
        mf = self.max_features
        if mf is None or mf == "all":
            return d
        if mf == "sqrt":
            return max(1, int(math.sqrt(d)))
        return max(1, min(d, int(mf)))

    def fit(self, X, y):
        X = as_csr(X)
        n, d = X.shape
        self.n_features = d
        y = np.asarray(y, dtype=np.float64)
        csc = _csc_parts(X)
        mf = self._n_candidates(d)
        self.trees_ = []
        for t in range(self.n_trees):
            tseed = derive_seed(self.seed, t)
            w = _bootstrap(n, derive_seed(tseed, 0)) if self.bootstrap else np.ones(n)
            self.trees_.append(grow_tree(csc, d, y, w, max_depth=self.max_depth,
                                         min_samples_split=self.min_samples_split,
                                         max_features=mf, seed=derive_seed(tseed, 1)))
        return self

    def votes(self, X):
        X = as_csr(X)
        out = np.zeros(X.shape[0], dtype=np.int64)
        for tree in self.trees_:
            out += tree.predict_value(X) >= 0.5
        return out

    def scores(self, X):
        return self.votes(X) / len(self.trees_)

    def trees(self):
        return self.trees_


def _sigmoid(z):
    return np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))), np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))


def _logloss(y, F):
    # mean of log(1 + e^F) - y F
    return float(np.mean(np.logaddexp(0.0, F) - y * F))


def _validation_split(y: np.ndarray, fraction: float, seed: int):
    g = SplitMix64(seed)
    val = []
    for label in (0, 1):
        members = np.flatnonzero(y == label).tolist()
        g.shuffle(members)
        k = int(fraction * len(members))
        if len(members) >= 2:
            k = max(1, k)
        val.extend(members[:k])
    mask = np.zeros(y.size, dtype=bool)
    mask[val] = True
    return mask


class GradientBoosting:
    """Stagewise boosting of depth-limited regression trees on logistic loss.

    Leaf values are one Newton step (sum of residuals over sum of p(1-p)).
    With ``early_stop_rounds`` set, a stratified slice of the training rows is
    held out; training stops once that many consecutive stages fail to improve
    validation accuracy (ties in accuracy are broken by validation log-loss
    falling by more than ``tol``).
    """

    kind = "GBT"

    def __init__(self, n_stages=100, learning_rate=0.1, max_depth=3, early_stop_rounds=5,
                 validation_fraction=0.1, tol=1e-4, seed=0):
        self.n_stages = n_stages
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.early_stop_rounds = early_stop_rounds
        self.validation_fraction = validation_fraction
        self.tol = tol
        self.seed = seed
        self.init_score_ = 0.0
        self.trees_: list[Tree] = []
        self.train_loss_: list[float] = []
        self.val_accuracy_: list[float] = []
        self.n_features = 0

    def fit(self, X, y):
        X = as_csr(X)
        n, d = X.shape
        self.n_features = d
        y = np.asarray(y, dtype=np.float64)
        if self.early_stop_rounds:
            val = _validation_split(y, self.validation_fraction, derive_seed(self.seed, 0))
        else:
            val = np.zeros(n, dtype=bool)
        tr_rows = np.flatnonzero(~val)
        va_rows = np.flatnonzero(val)
        y_tr, y_va = y[tr_rows], y[va_rows]
        X_tr, X_va = X[tr_rows], X[va_rows]
        prior = min(max(y_tr.mean(), 1e-12), 1 - 1e-12)
        self.init_score_ = math.log(prior / (1.0 - prior))

        csc = _csc_parts(X)
        w = (~val).astype(np.float64)
        F = np.full(n, self.init_score_)
        F_va = F[va_rows].copy()
        self.trees_, self.train_loss_, self.val_accuracy_ = [], [_logloss(y_tr, F[tr_rows])], []
        best = (-1.0, math.inf)
        since_best = 0
        for stage in range(self.n_stages):
            p = _sigmoid(F)
            resid = y - p
            tree = grow_tree(csc, d, resid, w, max_depth=self.max_depth, criterion="mse",
                             seed=derive_seed(self.seed, stage + 1))
            leaf_tr = tree.apply(X_tr)
            num = np.bincount(leaf_tr, weights=resid[tr_rows], minlength=tree.node_count)
            den = np.bincount(leaf_tr, weights=(p * (1 - p))[tr_rows], minlength=tree.node_count)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(np.abs(den) < 1e-150, 0.0, num / den)
            tree.value = np.where(tree.feature < 0, step, 0.0)
            self.trees_.append(tree)
            F[tr_rows] += self.learning_rate * tree.value[leaf_tr]
            self.train_loss_.append(_logloss(y_tr, F[tr_rows]))

            if va_rows.size:
                F_va += self.learning_rate * tree.predict_value(X_va)
                acc = float(np.mean((F_va >= 0) == (y_va == 1)))
                loss = _logloss(y_va, F_va)
                self.val_accuracy_.append(acc)
                if acc > best[0] or (acc == best[0] and loss < best[1] - self.tol):
                    best = (acc, loss)
                    since_best = 0
                else:
                    since_best += 1
                    if since_best >= self.early_stop_rounds:
                        break
        return self

    def decision_function(self, X):
        X = as_csr(X)
        F = np.full(X.shape[0], self.init_score_)
        for tree in self.trees_:
            F += self.learning_rate * tree.predict_value(X)
        return F

    def scores(self, X):
        return _sigmoid(self.decision_function(X))

    def trees(self):
        return self.trees_
