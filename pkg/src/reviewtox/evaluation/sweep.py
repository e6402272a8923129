"""Evaluate all eight optional-preprocessing combinations for one learner."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional

from ..corpus import Dataset, atomic_write_text
from ..models import Hyperparams
from ..preprocess import LexiconSet, PreprocessConfig
from ..vectorizer import DEFAULT_MIN_DF
from .crossval import EvalReport, cross_validate
from .stats import paired_t_test

ALPHA = 0.05


@dataclass(frozen=True)
class SweepEntry:
    rank: int
    config: PreprocessConfig
    report: EvalReport
    t: float
    p: float
    significant: bool


def tuning_sweep(ds: Dataset, algorithm: str, hp: Optional[Hyperparams] = None, seed: int = 0,
                 k: int = 10, repeats: int = 5, min_df: int = DEFAULT_MIN_DF,
                 lexicon: Optional[LexiconSet] = None, progress=None) -> list[SweepEntry]:
    """Cross-validate every combination and rank by mean F1_1, then mean accuracy.

    Each combination's per-run F1_1 is compared with the no-optional-step
    baseline by paired t test. A combination is marked significant when it
    has a higher mean and p < 0.05. All runs share the same fold plans, so
    the runs pair up by index.
    """
    reports = []
    for cfg in PreprocessConfig.all_combinations():
        reports.append(cross_validate(ds, algorithm, cfg, hp, k, repeats, seed, min_df, lexicon))
        if progress is not None:
            progress(cfg, reports[-1])
    base = reports[0]
    scored = []
    for rep in reports:
        if rep is base:
            t, p = float("nan"), 1.0
        else:
            t, p, _ = paired_t_test(rep.values("f1_1"), base.values("f1_1"))
        better = rep.means.f1_1 > base.means.f1_1
        scored.append((rep, t, p, better and p < ALPHA))
    order = sorted(range(len(scored)),
                   key=lambda i: (-scored[i][0].means.f1_1, -scored[i][0].means.accuracy, i))
    return [SweepEntry(rank + 1, scored[i][0].preprocess_cfg, *scored[i])
            for rank, i in enumerate(order)]


def sweep_csv(entries: list[SweepEntry]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "config", "split", "keyword", "profanity", "mean_f1_1", "mean_accuracy",
                "std_f1_1", "t_vs_base", "p_vs_base", "significant"])
    for e in entries:
        c = e.config
        w.writerow([e.rank, c.label(), int(c.split_identifiers), int(c.remove_keywords),
                    int(c.count_profanity), repr(e.report.means.f1_1), repr(e.report.means.accuracy),
                    repr(e.report.stds.f1_1), repr(e.t), repr(e.p), int(e.significant)])
    return buf.getvalue()


def write_sweep(entries: list[SweepEntry], path) -> None:
    atomic_write_text(path, sweep_csv(entries))
