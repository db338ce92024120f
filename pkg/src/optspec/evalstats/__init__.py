"""Executability/correctness metrics, significance tests, and reports."""
from .metrics import MetricsSummary, MissingGroundTruth, relative_error, summarize
from .report import (
    Comparison,
    Report,
    ReportConfigError,
    delta_rows,
    load_comparisons,
    report,
    run_comparisons,
)
from .stats import StatTestResult, a12, a12_magnitude, mann_whitney_u, z_test_proportions

__all__ = [
    "Comparison",
    "MetricsSummary",
    "MissingGroundTruth",
    "Report",
    "ReportConfigError",
    "StatTestResult",
    "a12",
    "a12_magnitude",
    "delta_rows",
    "load_comparisons",
    "mann_whitney_u",
    "relative_error",
    "report",
    "run_comparisons",
    "summarize",
    "z_test_proportions",
]
