"""The five learners and the trained-model wrapper."""

from .base import (
    ALGORITHMS,
    ConstantModel,
    DegenerateModelWarning,
    DimensionError,
    Hyperparams,
    ModelError,
    Prediction,
    TrainedModel,
    classify_text,
    classify_texts,
    featurize,
    fit_pipeline,
    make_estimator,
    predict,
    predict_many,
    train,
)
from .linear import LinearSVM, LogisticRegression, logistic_objective
from .persist import (
    SCHEMA_VERSION,
    SUPPORTED_VERSIONS,
    FormatError,
    VersionError,
    dumps,
    load_model,
    loads,
    save_model,
)
from .trees import DecisionTree, GradientBoosting, RandomForest, Tree

__all__ = [
    "ALGORITHMS", "ConstantModel", "DecisionTree", "DegenerateModelWarning", "DimensionError",
    "FormatError", "GradientBoosting", "Hyperparams", "LinearSVM", "LogisticRegression",
    "ModelError", "Prediction", "RandomForest", "SCHEMA_VERSION", "SUPPORTED_VERSIONS",
    "TrainedModel", "Tree", "VersionError", "classify_text", "classify_texts", "dumps",
    "featurize", "fit_pipeline", "load_model", "loads", "logistic_objective", "make_estimator",
    "predict", "predict_many", "save_model", "train",
]
