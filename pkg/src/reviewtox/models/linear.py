"""Linear learners: L2 logistic regression and a hinge-loss SVM."""

from __future__ import annotations

import math

import numpy as np

from .. import _backend
from . import _kernels as K
from .trees import as_csr


def logistic_objective(params, X, y, l2):
    """Regularised negative log-likelihood and its gradient.

    ``params`` is ``[w_1 .. w_d, b]``; the intercept is not penalised::

        f = sum_i log(1 + exp(z_i)) - y_i z_i + l2/2 * ||w||^2,   z = Xw + b
    """
    w, b = params[:-1], params[-1]
    z = X @ w + b
    f = float(np.sum(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w))
    r = _sigmoid(z) - y
    grad = np.empty_like(params)
    grad[:-1] = X.T @ r + l2 * w
    grad[-1] = r.sum()
    return f, grad


def _sigmoid(z):
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


class LogisticRegression:
    """Fitted by accelerated gradient descent with backtracking and restarts.

    Stops when the largest gradient component drops below ``tol`` or after
    ``max_iter`` iterations.
    """

    kind = "LR"

    def __init__(self, l2=1.0, max_iter=1000, tol=1e-4):
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol
        self.coef_ = None
        self.intercept_ = 0.0
        self.n_iter_ = 0
        self.n_features = 0

    def fit(self, X, y):
        X = as_csr(X)
        y = np.asarray(y, dtype=np.float64)
        self.n_features = X.shape[1]
        x = np.zeros(self.n_features + 1)
        fx, gx = logistic_objective(x, X, y, self.l2)
        z, fz, gz = x, fx, gx
        L, t = 1.0, 1.0
        for it in range(1, self.max_iter + 1):
            self.n_iter_ = it
            while True:
                x_new = z - gz / L
                f_new, g_new = logistic_objective(x_new, X, y, self.l2)
                if f_new <= fz - 0.5 * (gz @ gz) / L or L > 1e12:
                    break
                L *= 2.0
            if f_new > fx:
                # objective went up: restart momentum from the last iterate
                t = 1.0
                z, fz, gz = x, fx, gx
                continue
            t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
            z = x_new + ((t - 1.0) / t_new) * (x_new - x)
            x, fx, gx = x_new, f_new, g_new
            t = t_new
            if np.max(np.abs(gx)) < self.tol:
                break
            fz, gz = logistic_objective(z, X, y, self.l2)
            L *= 0.9
        self.coef_, self.intercept_ = x[:-1].copy(), float(x[-1])
        return self

    def decision_function(self, X):
        return as_csr(X) @ self.coef_ + self.intercept_

    def scores(self, X):
        return _sigmoid(self.decision_function(X))


class LinearSVM:
    """Pegasos: stochastic subgradient descent on the hinge-loss primal.

    Minimises ``lam/2 ||w||^2 + mean_i max(0, 1 - y_i (w.x_i + b))`` with
    ``lam = 1 / (C n)``; the bias is a regularised constant feature. The
    returned weights average the end-of-epoch iterates over the second half of
    training. Scores map the margin onto [0, 1] by ``clip(0.5 + margin/2)``,
    so a score of at least 0.5 is the same as a non-negative margin.
    """

    kind = "SVM"

    def __init__(self, C=1.0, epochs=20, seed=0):
        self.C = C
        self.epochs = epochs
        self.seed = seed
        self.coef_ = None
        self.intercept_ = 0.0
        self.n_features = 0

    def fit(self, X, y):
        X = as_csr(X)
        n, d = X.shape
        self.n_features = d
        ysign = np.where(np.asarray(y) == 1, 1.0, -1.0)
        lam = 1.0 / (self.C * n)
        kernel = K.pegasos_nb if _backend.BACKEND == "numba" else K.pegasos_np
        w = kernel(X.indptr.astype(np.int64), X.indices.astype(np.int64), X.data.astype(np.float64),
                   d, ysign, lam, int(self.epochs), np.uint64(self.seed & ((1 << 64) - 1)),
                   int(self.epochs) // 2)
        self.coef_, self.intercept_ = w[:-1].copy(), float(w[-1])
        return self

    def decision_function(self, X):
        return as_csr(X) @ self.coef_ + self.intercept_

    def scores(self, X):
        return np.clip(0.5 + 0.5 * self.decision_function(X), 0.0, 1.0)
