"""Executability and correctness metrics over run records."""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Protocol

# relative errors at or below this count as exact matches (#Zero); the
# embedded solver works in floating point, so 140 can come back as 139.99999999
ZERO_TOL = 1e-9

OUTCOME_CLASSES = ("solved", "compile-error", "runtime-error")


class RecordLike(Protocol):
    problem_id: str

    @property
    def outcome_class(self) -> str: ...

    @property
    def objective(self) -> float | None: ...


class MissingGroundTruth(KeyError):
    def __init__(self, problem: str) -> None:
        super().__init__(problem)
        self.problem = problem

    def __str__(self) -> str:
        return f"no ground truth for problem {self.problem!r}"


def relative_error(s: float, g: float) -> float | None:
    """``|s - g| / |g|``; 0 when both are 0, ``None`` (undefined) when only g is."""
    if not (math.isfinite(s) and math.isfinite(g)):
        raise ValueError("relative_error needs finite inputs")
    if g == 0:
        return 0.0 if s == 0 else None
    return abs(s - g) / abs(g)


@dataclass(frozen=True)
class MetricsSummary:
    n_total: int
    n_exec: int
    n_ce: int
    n_re: int
    relerr_mean: float | None = None
    relerr_median: float | None = None
    relerr_std: float | None = None
    n_zero: int = 0
    # executed records whose RelErr is undefined (ground truth 0, s != 0)
    n_undefined: int = 0
    relerrs: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if self.n_exec + self.n_ce + self.n_re != self.n_total:
            raise ValueError("outcome counts do not add up to n_total")
        if self.n_zero > self.n_exec:
            raise ValueError("n_zero exceeds n_exec")

    @property
    def success_rate(self) -> float:
        return self.n_exec / self.n_total if self.n_total else 0.0


def summarize(records: Iterable[RecordLike], ground_truths: Mapping[str, float]) -> MetricsSummary:
    """Partition counts plus RelErr statistics over the solved records.

    Std is the sample standard deviation (n - 1 denominator), left as
    ``None`` below two defined values.
    """
    counts = dict.fromkeys(OUTCOME_CLASSES, 0)
    errors: list[float] = []
    undefined = 0
    for rec in records:
        cls = rec.outcome_class
        if cls not in counts:
            raise ValueError(f"unknown outcome class {cls!r}")
        counts[cls] += 1
        if cls != "solved":
            continue
        if rec.problem_id not in ground_truths:
            raise MissingGroundTruth(rec.problem_id)
        err = relative_error(rec.objective, ground_truths[rec.problem_id])
        if err is None:
            undefined += 1
        else:
            errors.append(err)
    total = sum(counts.values())
    return MetricsSummary(
        n_total=total,
        n_exec=counts["solved"],
        n_ce=counts["compile-error"],
        n_re=counts["runtime-error"],
        relerr_mean=statistics.fmean(errors) if errors else None,
        relerr_median=statistics.median(errors) if errors else None,
        relerr_std=statistics.stdev(errors) if len(errors) >= 2 else None,
        n_zero=sum(1 for e in errors if e <= ZERO_TOL),
        n_undefined=undefined,
        relerrs=tuple(errors),
    )
