"""Training and prediction entry points shared by the five learners."""

from __future__ import annotations

import time
import warnings
from dataclasses import asdict, dataclass, field, fields
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from ..preprocess import LexiconSet, PreprocessConfig, default_lexicon, run_pipeline
from ..vectorizer import FeatureVector, Vocabulary, stack, transform
from .linear import LinearSVM, LogisticRegression
from .trees import DecisionTree, GradientBoosting, RandomForest, as_csr

ALGORITHMS = ("DT", "LR", "SVM", "RF", "GBT")


class ModelError(Exception):
    pass


class DimensionError(ModelError, ValueError):
    pass


class DegenerateModelWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Hyperparams:
    algorithm: str = "RF"
    rf_n_trees: int = 100
    rf_min_samples_split: int = 5
    rf_max_features: str = "sqrt"
    rf_bootstrap: bool = True
    gbt_n_stages: int = 100
    gbt_learning_rate: float = 0.1
    gbt_max_depth: int = 3
    gbt_early_stop_rounds: int = 5
    lr_l2_strength: float = 1.0
    lr_max_iters: int = 1000
    svm_regularization: float = 1.0
    svm_max_iters: int = 20
    dt_max_depth: Optional[int] = None
    decision_threshold: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if not 0.0 <= self.decision_threshold <= 1.0:
            raise ValueError("decision_threshold must lie in [0, 1]")
        for f in ("rf_n_trees", "rf_min_samples_split", "gbt_n_stages", "gbt_max_depth",
                  "lr_max_iters", "svm_max_iters"):
            if getattr(self, f) <= 0:
                raise ValueError(f"{f} must be positive")
        if self.gbt_early_stop_rounds < 0:
            raise ValueError("gbt_early_stop_rounds must be non-negative")
        if self.dt_max_depth is not None and self.dt_max_depth <= 0:
            raise ValueError("dt_max_depth must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Hyperparams":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})


class ConstantModel:
    """Predicts the single class seen in training."""

    kind = "CONST"

    def __init__(self, label: int = 0, n_features: int = 0):
        self.label = int(label)
        self.n_features = n_features

    def fit(self, X, y):
        return self

    def scores(self, X):
        return np.full(X.shape[0], float(self.label))


def make_estimator(hp: Hyperparams):
    a = hp.algorithm
    if a == "DT":
        return DecisionTree(max_depth=hp.dt_max_depth, seed=hp.seed)
    if a == "RF":
        mf = hp.rf_max_features
        if mf not in ("sqrt", "all"):
            mf = int(mf)
        return RandomForest(n_trees=hp.rf_n_trees, min_samples_split=hp.rf_min_samples_split,
                            max_features=mf, bootstrap=hp.rf_bootstrap, seed=hp.seed)
    if a == "GBT":
        return GradientBoosting(n_stages=hp.gbt_n_stages, learning_rate=hp.gbt_learning_rate,
                                max_depth=hp.gbt_max_depth, early_stop_rounds=hp.gbt_early_stop_rounds,
                                seed=hp.seed)
    if a == "LR":
        return LogisticRegression(l2=hp.lr_l2_strength, max_iter=hp.lr_max_iters)
    return LinearSVM(C=hp.svm_regularization, epochs=hp.svm_max_iters, seed=hp.seed)


@dataclass(frozen=True)
class Prediction:
    score: float
    label: int


@dataclass(eq=False)
class TrainedModel:
    algorithm: str
    estimator: object
    vocab: Vocabulary
    preprocess_cfg: PreprocessConfig
    hyperparams: Hyperparams
    training_meta: dict = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return len(self.vocab) + (1 if self.preprocess_cfg.count_profanity else 0)

    def scores(self, X) -> np.ndarray:
        X = as_csr(X)
        if X.shape[1] != self.n_features:
            raise DimensionError(f"input has {X.shape[1]} features, model expects {self.n_features}")
        return np.asarray(self.estimator.scores(X), dtype=np.float64)

    def labels(self, scores: np.ndarray) -> np.ndarray:
        return (scores >= self.hyperparams.decision_threshold).astype(np.int64)


def _as_matrix(X, dim=None):
    if isinstance(X, (list, tuple)) and X and isinstance(X[0], FeatureVector):
        return stack(X, dim)
    return as_csr(X)


def train(algorithm: str, X, y: Sequence[int], hp: Optional[Hyperparams] = None, *,
          vocab: Optional[Vocabulary] = None,
          preprocess_cfg: PreprocessConfig = PreprocessConfig()) -> TrainedModel:
    """Fit one learner on feature rows ``X`` (CSR matrix or FeatureVectors).

    Without a ``vocab`` a placeholder vocabulary sized to ``X`` is attached,
    which is enough for :func:`predict` but not for :func:`classify_text`.
    """
    hp = Hyperparams(algorithm=algorithm) if hp is None else hp
    if hp.algorithm != algorithm:
        hp = Hyperparams.from_dict({**hp.to_dict(), "algorithm": algorithm})
    X = _as_matrix(X)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] != y.size:
        raise DimensionError(f"{X.shape[0]} feature rows but {y.size} labels")
    if y.size < 2:
        raise ModelError("need at least two training rows")
    if not np.isin(y, (0, 1)).all():
        raise ModelError("labels must be 0 or 1")
    if vocab is None:
        d = X.shape[1] - (1 if preprocess_cfg.count_profanity else 0)
        vocab = Vocabulary.from_df([f"f{i}" for i in range(d)], [1] * d, 1, 1)
    expected = len(vocab) + (1 if preprocess_cfg.count_profanity else 0)
    if X.shape[1] != expected:
        raise DimensionError(f"feature rows have {X.shape[1]} columns, vocabulary implies {expected}")

    t0 = time.perf_counter()
    classes = np.unique(y)
    if classes.size == 1:
        warnings.warn(f"training data has only class {classes[0]}; returning a constant predictor",
                      DegenerateModelWarning)
        est = ConstantModel(int(classes[0]), X.shape[1])
    else:
        est = make_estimator(hp).fit(X, y)
    elapsed = time.perf_counter() - t0
    meta = {"n_samples": int(y.size), "n_positive": int(y.sum()), "train_seconds": elapsed}
    return TrainedModel(algorithm, est, vocab, preprocess_cfg, hp, meta)


def predict(model: TrainedModel, x) -> Prediction:
    if isinstance(x, FeatureVector):
        if x.dim != model.n_features:
            raise DimensionError(f"vector has dimension {x.dim}, model expects {model.n_features}")
        X = stack([x])
    else:
        X = as_csr(x)
        if X.ndim == 2 and X.shape[0] != 1:
            raise ValueError("predict takes one row; use predict_many")
    s = float(model.scores(X)[0])
    return Prediction(s, int(s >= model.hyperparams.decision_threshold))


def predict_many(model: TrainedModel, X) -> tuple[np.ndarray, np.ndarray]:
    s = model.scores(_as_matrix(X, model.n_features))
    return s, model.labels(s)


def featurize(texts: Sequence[str], vocab: Vocabulary, cfg: PreprocessConfig,
              lexicon: Optional[LexiconSet] = None) -> sp.csr_matrix:
    lex = lexicon or default_lexicon()
    vecs = []
    for t in texts:
        clean, count = run_pipeline(t, cfg, lex)
        vecs.append(transform(clean, vocab, count))
    return stack(vecs, len(vocab) + (1 if cfg.count_profanity else 0))


def classify_text(model: TrainedModel, raw_text: str, lexicon: Optional[LexiconSet] = None) -> Prediction:
    X = featurize([raw_text], model.vocab, model.preprocess_cfg, lexicon)
    s = float(model.scores(X)[0])
    return Prediction(s, int(s >= model.hyperparams.decision_threshold))


def classify_texts(model: TrainedModel, texts: Sequence[str],
                   lexicon: Optional[LexiconSet] = None) -> list[Prediction]:
    if not texts:
        return []
    X = featurize(texts, model.vocab, model.preprocess_cfg, lexicon)
    s = model.scores(X)
    return [Prediction(float(v), int(v >= model.hyperparams.decision_threshold)) for v in s]


def fit_pipeline(texts: Sequence[str], labels: Sequence[int], hp: Hyperparams,
                 cfg: PreprocessConfig = PreprocessConfig(), min_df: int = 20,
                 lexicon: Optional[LexiconSet] = None, fingerprint: str = "") -> TrainedModel:
    """Preprocess, fit the vocabulary and train on the full text collection."""
    from ..vectorizer import fit as fit_vocab

    lex = lexicon or default_lexicon()
    clean, counts = [], []
    for t in texts:
        c, n = run_pipeline(t, cfg, lex)
        clean.append(c)
        counts.append(n)
    vocab = fit_vocab(clean, min_df)
    X = stack([transform(c, vocab, n) for c, n in zip(clean, counts)],
              len(vocab) + (1 if cfg.count_profanity else 0))
    model = train(hp.algorithm, X, labels, hp, vocab=vocab, preprocess_cfg=cfg)
    model.training_meta["dataset_fingerprint"] = fingerprint
    return model
