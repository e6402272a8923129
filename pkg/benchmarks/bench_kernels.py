"""Time the numba kernels against the pure-numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--rows N] [--terms D] [--density P]

The input is a random sparse non-negative matrix shaped like a TF-IDF
training partition. Each learner is fitted once per backend after a warm-up
fit (to exclude numba compilation), and the two backends' scores are
compared.
"""

import argparse
import time

import numpy as np
import scipy.sparse as sp

from reviewtox import _backend
from reviewtox.models import GradientBoosting, LinearSVM, RandomForest


def make_data(n, d, density, seed):
    rng = np.random.default_rng(seed)
    X = sp.random(n, d, density=density, random_state=rng, format="csr",
                  data_rvs=lambda k: rng.exponential(0.05, k))
    w = rng.normal(size=d) * (rng.random(d) < 0.05)
    y = (X @ w + rng.normal(scale=0.02, size=n) > 0.01).astype(np.int64)
    return X, y


def timed(factory, X, y):
    t0 = time.perf_counter()
    est = factory().fit(X, y)
    return time.perf_counter() - t0, est.scores(X)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=17_000)
    ap.add_argument("--terms", type=int, default=2_000)
    ap.add_argument("--density", type=float, default=0.004)
    ap.add_argument("--trees", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    X, y = make_data(args.rows, args.terms, args.density, args.seed)
    print(f"rows={args.rows} terms={args.terms} nnz={X.nnz} positives={y.sum()}")
    learners = {
        f"RF({args.trees} trees)": lambda: RandomForest(n_trees=args.trees, seed=1),
        "GBT(100 stages)": lambda: GradientBoosting(seed=1),
        "SVM(20 epochs)": lambda: LinearSVM(seed=1),
    }
    Xs, ys = X[:300], y[:300]
    print(f"{'learner':<18}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  max|score diff|")
    for name, factory in learners.items():
        with _backend.use_backend("numba"):
            factory().fit(Xs, ys)  # compile
            t_nb, s_nb = timed(factory, X, y)
        with _backend.use_backend("numpy"):
            t_np, s_np = timed(factory, X, y)
        diff = float(np.max(np.abs(s_nb - s_np)))
        print(f"{name:<18}{t_nb:>10.2f}{t_np:>10.2f}{t_np / t_nb:>8.1f}x  {diff:.3g}")


if __name__ == "__main__":
    main()
