"""Characteristic-function goodness-of-fit tests for the Cauchy family."""

import json as _json

from ._core import (
    AccuracyError,
    DataError,
    DegenerateSampleError,
    Error,
    OptimizationError,
    ParameterError,
    critical_values,
    delta,
    dnl,
    edf_statistics,
    expected_norm_sq,
    fit,
    ingest_returns,
    kernel,
    kl,
    p_value,
    power,
    residuals,
    sample,
    statistic,
    tn0,
    tna,
)
from ._core import run_battery as _run_battery

__all__ = [
    "AccuracyError",
    "DataError",
    "DegenerateSampleError",
    "Error",
    "OptimizationError",
    "ParameterError",
    "critical_values",
    "delta",
    "dnl",
    "edf_statistics",
    "expected_norm_sq",
    "fit",
    "ingest_returns",
    "kernel",
    "kl",
    "p_value",
    "power",
    "residuals",
    "run_battery",
    "sample",
    "statistic",
    "tn0",
    "tna",
]


def run_battery(x, ids=None, estimator="ml", reps=10_000, seed=1, workers=0):
    """Run the default (or given) statistics on x; returns the report as a dict."""
    return _json.loads(_run_battery(list(x), ids, estimator, reps, seed, workers))
