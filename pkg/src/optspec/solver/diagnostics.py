"""Feedback text for failed solves, fed back to the LLM during refinement.

Layout (fixed, tests depend on it)::

    ERROR <kind>
    row <name>        # zero or more
    var <name>        # zero or more
    <one free-text sentence>
"""
from __future__ import annotations

from ..ampl.instance import Objective, ProblemInstance
from .branch_bound import solve_milp
from .outcome import RuntimeFailure, Solved, SolverParams


def _feasible(instance: ProblemInstance, rows, params: SolverParams) -> bool:
    probe = ProblemInstance(instance.variables, Objective("minimize", {}), tuple(rows))
    return isinstance(solve_milp(probe, params), Solved)


def infeasible_rows(instance: ProblemInstance, params: SolverParams | None = None) -> list[str]:
    """Greedy deletion filter over rows; variable bounds always stay in.

    Drops each row in turn and keeps it out if the rest is still
    infeasible. What remains explains the conflict, though it is not
    guaranteed minimal when integrality is involved.
    """
    params = params or SolverParams()
    kept = list(instance.rows)
    if _feasible(instance, kept, params):
        return []
    i = 0
    while i < len(kept):
        trial = kept[:i] + kept[i + 1:]
        if not _feasible(instance, trial, params):
            kept = trial
        else:
            i += 1
    return [row.name for row in kept]


def _declarations(instance: ProblemInstance, names) -> list[str]:
    prov = instance.provenance
    seen: list[str] = []
    for n in names:
        origin = prov.get(n) or n
        if origin not in seen:
            seen.append(origin)
    return seen


def render_diagnostics(
    outcome: RuntimeFailure, instance: ProblemInstance, params: SolverParams | None = None
) -> str:
    """Render a runtime failure as a refinement-prompt feedback block."""
    lines = [f"ERROR {outcome.kind}"]
    if outcome.kind == "infeasible":
        rows = infeasible_rows(instance, params)
        lines += [f"row {r}" for r in rows]
        if rows:
            decls = ", ".join(_declarations(instance, rows))
            lines.append(
                "The problem is infeasible: the rows listed above cannot all hold together"
                f" with the variable bounds; check the declarations {decls}."
            )
        else:
            lines.append(
                "The problem is infeasible: the variable bounds and integrality"
                " requirements alone admit no solution."
            )
    elif outcome.kind == "unbounded":
        lines += [f"var {v}" for v in outcome.vars]
        decls = ", ".join(_declarations(instance, outcome.vars)) or "the objective"
        lines.append(
            "The problem is unbounded: the objective improves without limit by moving the"
            f" variables listed above; a constraint or bound on {decls} is probably missing."
        )
    else:
        lines.append(f"The solver stopped early ({outcome.kind}): {outcome.message}.")
    return "\n".join(lines)
