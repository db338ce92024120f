"""
Metrics and statistical comparisons
===================================

Runs are summarised per (variant, model) cell: how many specifications
executed, how many failed at compile or run time, and the relative error
of executed ones against the ground truth. Cells are compared with a
two-proportion Z-test on executability and a U-test plus the A12 effect
size on relative error.
"""
from __future__ import annotations

from dataclasses import dataclass

from optspec.evalstats import a12, mann_whitney_u, relative_error, report, summarize, z_test_proportions


@dataclass
class Run:
    problem_id: str
    outcome_class: str
    objective: float | None = None


truth = {"p1": 100.0, "p2": 40.0, "p3": -12.0}

# %% Relative error is |s - g| / |g|; a zero ground truth only scores an exact match
print(relative_error(110.0, 100.0), relative_error(0.0, 0.0), relative_error(1.0, 0.0))

# %% Summaries per cell
runs_a = [Run("p1", "solved", 100.0), Run("p2", "solved", 44.0), Run("p3", "solved", -12.0),
          Run("p1", "compile-error"), Run("p2", "solved", 40.0)]
runs_b = [Run("p1", "solved", 150.0), Run("p2", "runtime-error"), Run("p3", "solved", -6.0),
          Run("p1", "compile-error"), Run("p2", "compile-error")]
a = summarize(runs_a, truth)
b = summarize(runs_b, truth)
print(a.n_exec, a.n_ce, a.n_re, a.success_rate, a.relerr_mean)
print(b.n_exec, b.n_ce, b.n_re, b.success_rate, b.relerr_mean)

# %% Z-test on executability counts, U-test and A12 on relative errors
print(z_test_proportions(a.n_exec, a.n_total, b.n_exec, b.n_total))
print(mann_whitney_u(a.relerrs, b.relerrs))
print(a12(a.relerrs, b.relerrs))

# %% A report renders deterministic markdown and CSV tables
rep = report({("Ampl4", "demo"): a, ("Python4", "demo"): b})
print(rep.markdown)
