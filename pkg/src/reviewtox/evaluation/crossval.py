"""Repeated stratified cross-validation and the result spreadsheets."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from ..corpus import Dataset, atomic_write_text, stratified_folds
from ..models import Hyperparams, train
from ..preprocess import LexiconSet, PreprocessConfig, default_lexicon, preprocess_many
from ..rng import derive_seed
from ..vectorizer import DEFAULT_MIN_DF, DocumentTermCounts
from .metrics import METRIC_NAMES, ConfusionMatrix, MetricSet, confusion, metrics


@dataclass(frozen=True)
class RunResult:
    repeat: int
    fold: int
    confusion: ConfusionMatrix
    metrics: MetricSet
    n_terms: int
    train_seconds: float


@dataclass(eq=False)
class EvalReport:
    """Per-run metrics of a ``k`` x ``repeats`` cross-validation plus aggregates.

    ``oof_scores[r, i]`` is the score row ``i`` received in repeat ``r`` while
    it sat in the test fold.
    """

    algorithm: str
    preprocess_cfg: PreprocessConfig
    seed: int
    k: int
    repeats: int
    min_df: int
    dataset_fingerprint: str
    runs: list[RunResult]
    oof_scores: np.ndarray
    oof_labels: np.ndarray
    fold_plans: list = field(default_factory=list)

    def values(self, name: str) -> list[float]:
        return [r.metrics.as_dict()[name] for r in self.runs]

    @property
    def means(self) -> MetricSet:
        return MetricSet(*(float(np.mean(self.values(n))) for n in METRIC_NAMES))

    @property
    def stds(self) -> MetricSet:
        ddof = 1 if len(self.runs) > 1 else 0
        return MetricSet(*(float(np.std(self.values(n), ddof=ddof)) for n in METRIC_NAMES))

    @property
    def fingerprint(self) -> str:
        c = self.preprocess_cfg
        return (f"algo={self.algorithm};split={int(c.split_identifiers)};keyword={int(c.remove_keywords)};"
                f"profanity={int(c.count_profanity)};seed={self.seed};k={self.k};repeats={self.repeats};"
                f"min_df={self.min_df};data={self.dataset_fingerprint}")

    @property
    def total_train_seconds(self) -> float:
        return sum(r.train_seconds for r in self.runs)


def cross_validate(
    ds: Dataset,
    algorithm: str,
    preprocess_cfg: PreprocessConfig = PreprocessConfig(),
    hp: Optional[Hyperparams] = None,
    k: int = 10,
    repeats: int = 5,
    seed: int = 0,
    min_df: int = DEFAULT_MIN_DF,
    lexicon: Optional[LexiconSet] = None,
    progress=None,
) -> EvalReport:
    """Evaluate one algorithm and preprocessing setup by repeated k-fold CV.

    Repeat ``r`` uses the fold plan seeded with ``derive_seed(seed, r)``, which
    depends only on the dataset and ``seed``. Every algorithm and
    preprocessing setup therefore sees the same partitions. The vocabulary is
    refit on each training partition. Learners are seeded with
    ``derive_seed(seed, r, f)``, so ``hp.seed`` has no effect here.
    """
    if not ds.is_labeled:
        raise ValueError("cross-validation needs a label on every comment")
    hp = Hyperparams(algorithm=algorithm) if hp is None else replace(hp, algorithm=algorithm)
    lex = lexicon or default_lexicon()
    texts, counts = preprocess_many(ds.texts, preprocess_cfg, lex)
    dtc = DocumentTermCounts(texts)
    pc = np.asarray(counts, dtype=np.float64) if counts is not None else None
    y = np.asarray(ds.labels, dtype=np.int64)
    n = len(ds)

    runs: list[RunResult] = []
    plans = []
    oof = np.full((repeats, n), np.nan)
    oof_lab = np.full((repeats, n), -1, dtype=np.int64)
    for r in range(repeats):
        plan = stratified_folds(ds, k, derive_seed(seed, r))
        plans.append(plan)
        assign = np.asarray(plan.assignments)
        for f in range(k):
            te = np.flatnonzero(assign == f)
            tr = np.flatnonzero(assign != f)
            vocab = dtc.fit_vocabulary(tr, min_df)
            X_tr = dtc.matrix(tr, vocab, None if pc is None else pc[tr])
            X_te = dtc.matrix(te, vocab, None if pc is None else pc[te])
            t0 = time.perf_counter()
            model = train(algorithm, X_tr, y[tr], replace(hp, seed=derive_seed(seed, r, f)),
                          vocab=vocab, preprocess_cfg=preprocess_cfg)
            elapsed = time.perf_counter() - t0
            s = model.scores(X_te)
            lab = model.labels(s)
            oof[r, te] = s
            oof_lab[r, te] = lab
            cm = confusion(y[te], lab)
            runs.append(RunResult(r, f, cm, metrics(cm), len(vocab), elapsed))
            if progress is not None:
                progress(r, f, runs[-1])
    return EvalReport(algorithm, preprocess_cfg, seed, k, repeats, min_df, ds.fingerprint(),
                      runs, oof, oof_lab, plans)


def _fmt(v: float) -> str:
    return repr(float(v))


def results_csv(report: EvalReport) -> str:
    """One row per run, then ``mean`` and ``std`` rows. Contains no timings."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["# " + report.fingerprint])
    w.writerow(["repeat", "fold", "tp", "fp", "tn", "fn", "n_terms", *METRIC_NAMES])
    for run in report.runs:
        c = run.confusion
        w.writerow([run.repeat, run.fold, c.tp, c.fp, c.tn, c.fn, run.n_terms,
                    *(_fmt(v) for v in run.metrics.as_tuple())])
    w.writerow(["mean", "", "", "", "", "", "", *(_fmt(v) for v in report.means.as_tuple())])
    w.writerow(["std", "", "", "", "", "", "", *(_fmt(v) for v in report.stds.as_tuple())])
    return buf.getvalue()


def timings_csv(report: EvalReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["repeat", "fold", "train_seconds"])
    for run in report.runs:
        w.writerow([run.repeat, run.fold, f"{run.train_seconds:.6f}"])
    w.writerow(["total", "", f"{report.total_train_seconds:.6f}"])
    return buf.getvalue()


def write_results(report: EvalReport, path, timings_path=None) -> None:
    atomic_write_text(path, results_csv(report))
    if timings_path is not None:
        atomic_write_text(timings_path, timings_csv(report))


def retro_rows(ds: Dataset, predictions: Sequence[int], scores: Optional[Sequence[float]] = None):
    if len(predictions) != len(ds):
        raise ValueError(f"{len(predictions)} predictions for {len(ds)} comments")
    if scores is not None and len(scores) != len(ds):
        raise ValueError(f"{len(scores)} scores for {len(ds)} comments")
    fps, fns = [], []
    for i, (c, p) in enumerate(zip(ds.comments, predictions)):
        p = int(p)
        s = "" if scores is None else _fmt(scores[i])
        if c.label == 0 and p == 1:
            fps.append([c.id, c.text, c.label, p, s])
        elif c.label == 1 and p == 0:
            fns.append([c.id, c.text, c.label, p, s])
    return fps + fns


def retro_export(ds: Dataset, predictions: Sequence[int], path,
                 scores: Optional[Sequence[float]] = None) -> int:
    """Write every misclassified comment, false positives first; returns the row count."""
    rows = retro_rows(ds, predictions, scores)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "text", "true_label", "predicted_label", "score"])
    w.writerows(rows)
    atomic_write_text(path, buf.getvalue())
    return len(rows)
