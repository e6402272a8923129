"""Model file format.

Byte layout (all integers little-endian)::

    offset  size  field
    0       8     magic  b"RVTXMDL\\x00"
    8       4     uint32 schema version
    12      8     uint64 header length H
    20      H     UTF-8 JSON header
    20+H    ...   raw arrays, concatenated in header["arrays"] order
    end-32  32    SHA-256 of every preceding byte

The JSON header holds the algorithm tag, preprocessing flags, hyperparameters,
vocabulary terms and scalars, estimator scalars, and for every array its name,
dtype and shape. Arrays are stored in native little-endian form so a
round-trip restores them bit for bit. Keys are sorted and no timestamps are
written, so the same model always serializes to the same bytes.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from ..corpus import atomic_write_bytes
from ..preprocess import PreprocessConfig
from ..vectorizer import Vocabulary
from .base import ConstantModel, Hyperparams, TrainedModel
from .linear import LinearSVM, LogisticRegression
from .trees import DecisionTree, GradientBoosting, RandomForest, Tree

MAGIC = b"RVTXMDL\x00"
SCHEMA_VERSION = 1
SUPPORTED_VERSIONS = (1,)
_PREFIX = struct.Struct("<8sIQ")
_TREE_FIELDS = ("feature", "threshold", "left", "right", "value",
                "n_node_samples", "weighted_n_node_samples")


class FormatError(Exception):
    """The file is not a model file or is damaged."""


class VersionError(FormatError):
    def __init__(self, found: int):
        self.found = found
        supported = ", ".join(str(v) for v in SUPPORTED_VERSIONS)
        super().__init__(f"model schema version {found} is not supported (supported: {supported})")


def _tree_arrays(prefix, tree, out):
    for f in _TREE_FIELDS:
        out[f"{prefix}.{f}"] = getattr(tree, f)


def _tree_from(prefix, arrays):
    return Tree(*(arrays[f"{prefix}.{f}"] for f in _TREE_FIELDS))


def _encode_estimator(est):
    arrays: dict[str, np.ndarray] = {}
    kind = est.kind
    if kind == "CONST":
        params = {"label": est.label}
    elif kind == "DT":
        params = {"max_depth": est.max_depth, "min_samples_split": est.min_samples_split, "seed": est.seed}
        _tree_arrays("tree0", est.tree_, arrays)
    elif kind == "RF":
        params = {"n_trees": est.n_trees, "min_samples_split": est.min_samples_split,
                  "max_features": est.max_features, "bootstrap": est.bootstrap,
                  "max_depth": est.max_depth, "seed": est.seed, "n_fitted": len(est.trees_)}
        for i, t in enumerate(est.trees_):
            _tree_arrays(f"tree{i}", t, arrays)
    elif kind == "GBT":
        params = {"n_stages": est.n_stages, "learning_rate": est.learning_rate,
                  "max_depth": est.max_depth, "early_stop_rounds": est.early_stop_rounds,
                  "validation_fraction": est.validation_fraction, "tol": est.tol,
                  "seed": est.seed, "n_fitted": len(est.trees_)}
        arrays["init_score"] = np.array([est.init_score_])
        arrays["train_loss"] = np.asarray(est.train_loss_, dtype=np.float64)
        arrays["val_accuracy"] = np.asarray(est.val_accuracy_, dtype=np.float64)
        for i, t in enumerate(est.trees_):
            _tree_arrays(f"tree{i}", t, arrays)
    elif kind in ("LR", "SVM"):
        if kind == "LR":
            params = {"l2": est.l2, "max_iter": est.max_iter, "tol": est.tol, "n_iter": est.n_iter_}
        else:
            params = {"C": est.C, "epochs": est.epochs, "seed": est.seed}
        arrays["coef"] = est.coef_
        arrays["intercept"] = np.array([est.intercept_])
    else:
        raise TypeError(f"cannot serialize estimator of kind {kind!r}")
    params["n_features"] = est.n_features
    return kind, params, arrays


def _decode_estimator(kind, p, arrays):
    if kind == "CONST":
        est = ConstantModel(p["label"], p["n_features"])
    elif kind == "DT":
        est = DecisionTree(p["max_depth"], p["min_samples_split"], p["seed"])
        est.tree_ = _tree_from("tree0", arrays)
    elif kind == "RF":
        est = RandomForest(p["n_trees"], p["min_samples_split"], p["max_features"],
                           p["bootstrap"], p["max_depth"], p["seed"])
        est.trees_ = [_tree_from(f"tree{i}", arrays) for i in range(p["n_fitted"])]
    elif kind == "GBT":
        est = GradientBoosting(p["n_stages"], p["learning_rate"], p["max_depth"],
                               p["early_stop_rounds"], p["validation_fraction"], p["tol"], p["seed"])
        est.init_score_ = float(arrays["init_score"][0])
        est.train_loss_ = arrays["train_loss"].tolist()
        est.val_accuracy_ = arrays["val_accuracy"].tolist()
        est.trees_ = [_tree_from(f"tree{i}", arrays) for i in range(p["n_fitted"])]
    elif kind == "LR":
        est = LogisticRegression(p["l2"], p["max_iter"], p["tol"])
        est.n_iter_ = p["n_iter"]
    elif kind == "SVM":
        est = LinearSVM(p["C"], p["epochs"], p["seed"])
    else:
        raise FormatError(f"unknown estimator kind {kind!r}")
    if kind in ("LR", "SVM"):
        est.coef_ = arrays["coef"]
        est.intercept_ = float(arrays["intercept"][0])
    est.n_features = p["n_features"]
    return est


def dumps(model: TrainedModel) -> bytes:
    kind, params, arrays = _encode_estimator(model.estimator)
    v = model.vocab
    all_arrays = {"vocab.df": v.df.astype("<i8"), "vocab.idf": v.idf.astype("<f8")}
    all_arrays.update(arrays)
    manifest, blobs = [], []
    for name, a in all_arrays.items():
        a = np.ascontiguousarray(a)
        a = a.astype(a.dtype.newbyteorder("<"), copy=False)
        manifest.append({"name": name, "dtype": a.dtype.str, "shape": list(a.shape)})
        blobs.append(a.tobytes())
    cfg = model.preprocess_cfg
    meta = {k: v for k, v in model.training_meta.items() if k != "train_seconds"}
    header = {
        "algorithm": model.algorithm,
        "estimator": {"kind": kind, "params": params},
        "preprocess": {"split_identifiers": cfg.split_identifiers,
                       "remove_keywords": cfg.remove_keywords,
                       "count_profanity": cfg.count_profanity},
        "hyperparams": model.hyperparams.to_dict(),
        "vocab": {"terms": list(v.terms), "n_docs": v.n_docs, "min_df": v.min_df},
        "meta": meta,
        "arrays": manifest,
    }
    hbytes = json.dumps(header, sort_keys=True, ensure_ascii=False, separators=(",", ":")).encode("utf-8")
    body = _PREFIX.pack(MAGIC, SCHEMA_VERSION, len(hbytes)) + hbytes + b"".join(blobs)
    return body + hashlib.sha256(body).digest()


def loads(data: bytes) -> TrainedModel:
    if len(data) < _PREFIX.size + 32 or data[:8] != MAGIC:
        raise FormatError("not a model file (bad magic header)")
    _, version, hlen = _PREFIX.unpack_from(data)
    if version not in SUPPORTED_VERSIONS:
        raise VersionError(version)
    body, digest = data[:-32], data[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise FormatError("model file is corrupted (checksum mismatch)")
    try:
        header = json.loads(body[_PREFIX.size:_PREFIX.size + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"unreadable model header: {exc}") from None
    off = _PREFIX.size + hlen
    arrays = {}
    for entry in header["arrays"]:
        dt = np.dtype(entry["dtype"])
        count = int(np.prod(entry["shape"], dtype=np.int64))
        nbytes = count * dt.itemsize
        if off + nbytes > len(body):
            raise FormatError("model file is truncated")
        a = np.frombuffer(body, dtype=dt, count=count, offset=off).reshape(entry["shape"])
        arrays[entry["name"]] = a.astype(dt.newbyteorder("="))
        off += nbytes
    if off != len(body):
        raise FormatError("trailing bytes after model arrays")

    vh = header["vocab"]
    vocab = Vocabulary(tuple(vh["terms"]), arrays["vocab.df"], arrays["vocab.idf"],
                       vh["n_docs"], vh["min_df"])
    cfg = PreprocessConfig(**header["preprocess"])
    hp = Hyperparams.from_dict(header["hyperparams"])
    est = _decode_estimator(header["estimator"]["kind"], header["estimator"]["params"], arrays)
    return TrainedModel(header["algorithm"], est, vocab, cfg, hp, dict(header["meta"]))


def save_model(model: TrainedModel, path) -> None:
    atomic_write_bytes(Path(path), dumps(model))


def load_model(path) -> TrainedModel:
    return loads(Path(path).read_bytes())
