"""Metrics, significance tests and the cross-validation harness."""

from .crossval import (
    EvalReport,
    RunResult,
    cross_validate,
    results_csv,
    retro_export,
    retro_rows,
    timings_csv,
    write_results,
)
from .metrics import METRIC_NAMES, ConfusionMatrix, MetricSet, cohen_kappa, confusion, metrics
from .stats import TTestResult, betainc, one_sample_t_test, paired_t_test, t_cdf, t_sf_two_sided
from .sweep import ALPHA, SweepEntry, sweep_csv, tuning_sweep, write_sweep

__all__ = [
    "ALPHA", "ConfusionMatrix", "EvalReport", "METRIC_NAMES", "MetricSet", "RunResult",
    "SweepEntry", "TTestResult", "betainc", "cohen_kappa", "confusion", "cross_validate",
    "metrics", "one_sample_t_test", "paired_t_test", "results_csv", "retro_export", "retro_rows",
    "sweep_csv", "t_cdf", "t_sf_two_sided", "timings_csv", "tuning_sweep", "write_results",
    "write_sweep",
]
