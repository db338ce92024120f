"""Embedded LP/MILP solver: two-phase simplex plus branch-and-bound."""
from .branch_bound import solve_milp
from .diagnostics import infeasible_rows, render_diagnostics
from .outcome import RuntimeFailure, Solved, SolveOutcome, SolverParams
from .simplex import solve_lp

__all__ = [
    "RuntimeFailure",
    "SolveOutcome",
    "Solved",
    "SolverParams",
    "infeasible_rows",
    "render_diagnostics",
    "solve_lp",
    "solve_milp",
]
