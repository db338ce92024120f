"""LP-based branch-and-bound for mixed-integer instances."""
from __future__ import annotations

import heapq
import math

from ..ampl.instance import Objective, ProblemInstance
from .outcome import RuntimeFailure, Solved, SolveOutcome, SolverParams
from .simplex import (
    _failure,
    check_solution,
    lexicographic_bound_row,
    solve_lp,
    solve_relaxation,
)


def _most_fractional(instance: ProblemInstance, x, tol: float) -> int | None:
    best, best_frac = None, tol
    for v in instance.variables:
        if not v.is_integer:
            continue
        f = x[v.id] - math.floor(x[v.id])
        frac = min(f, 1.0 - f)
        if frac > best_frac:  # strict: lowest id wins ties
            best, best_frac = v.id, frac
    return best


def _snap(instance: ProblemInstance, x, tol: float):
    x = x.copy()
    for v in instance.variables:
        if v.is_integer:
            r = round(x[v.id])
            if abs(x[v.id] - r) <= tol:
                x[v.id] = float(r)
    return x


def _branch_and_bound(
    instance: ProblemInstance, objective: Objective, params: SolverParams
) -> tuple[str, object, int, int]:
    """Returns (status, x-or-failure, nodes, iterations) for one objective."""
    sign = -1.0 if objective.sense == "maximize" else 1.0  # internal minimization
    lower0 = [v.lower for v in instance.variables]
    upper0 = [v.upper for v in instance.variables]
    # integer variables can tighten fractional bounds right away
    for v in instance.variables:
        if v.is_integer:
            lower0[v.id] = math.ceil(v.lower - params.integrality_tol) if math.isfinite(v.lower) else v.lower
            upper0[v.id] = math.floor(v.upper + params.integrality_tol) if math.isfinite(v.upper) else v.upper
    heap = [(-math.inf, 0, 0, lower0, upper0)]  # (bound, -depth, seq, lower, upper)
    seq = 1
    incumbent = None
    incumbent_val = math.inf
    nodes = 0
    iterations = 0
    while heap:
        bound, neg_depth, _, lower, upper = heapq.heappop(heap)
        if incumbent is not None and bound >= incumbent_val - _prune_tol(incumbent_val):
            continue
        if nodes >= params.max_bb_nodes:
            return "node-limit", None, nodes, iterations
        nodes += 1
        res = solve_relaxation(instance, params, lower, upper, objective)
        iterations += res.iterations
        if res.status == "infeasible":
            continue
        if res.status != "optimal":
            return res.status, res, nodes, iterations
        value = sign * res.objective
        if incumbent is not None and value >= incumbent_val - _prune_tol(incumbent_val):
            continue
        j = _most_fractional(instance, res.x, params.integrality_tol)
        if j is None:
            x = _snap(instance, res.x, params.integrality_tol)
            incumbent, incumbent_val = x, sign * objective.value(x)
            continue
        xj = res.x[j]
        down_upper = list(upper)
        down_upper[j] = math.floor(xj)
        up_lower = list(lower)
        up_lower[j] = math.ceil(xj)
        depth = -neg_depth + 1
        heapq.heappush(heap, (value, -depth, seq, lower, down_upper))
        heapq.heappush(heap, (value, -depth, seq + 1, up_lower, upper))
        seq += 2
    if incumbent is None:
        return "infeasible", None, nodes, iterations
    return "optimal", incumbent, nodes, iterations


def _prune_tol(value: float) -> float:
    return 1e-9 * max(1.0, abs(value))


def solve_milp(instance: ProblemInstance, params: SolverParams | None = None) -> SolveOutcome:
    """Optimize over the integer lattice within the variable bounds.

    Best-bound node selection, deepest node first among equal bounds,
    branching on the most fractional variable (lowest id on ties).
    Continuous instances go straight to :func:`solve_lp`.
    """
    params = params or SolverParams()
    if not instance.is_mip:
        return solve_lp(instance, params)
    stages = (instance.objective, *instance.tail_objectives)
    current = instance
    nodes_total = iterations_total = 0
    x = None
    for idx, stage in enumerate(stages):
        status, payload, nodes, iterations = _branch_and_bound(current, stage, params)
        nodes_total += nodes
        iterations_total += iterations
        if status == "node-limit":
            return RuntimeFailure("node-limit", f"branch-and-bound stopped after {params.max_bb_nodes} nodes")
        if status == "infeasible":
            return RuntimeFailure("infeasible", "no integer assignment satisfies all rows and bounds")
        if status != "optimal":
            return _failure(instance, payload, params)
        x = payload
        if idx + 1 < len(stages):
            extra = lexicographic_bound_row(stage, stage.value(x), params)
            current = ProblemInstance(current.variables, current.objective, current.rows + (extra,))
    bad = check_solution(instance, x, params)
    if bad is not None:
        return RuntimeFailure("numeric-failure", f"solution violates {bad} beyond tolerance")
    assignment = {v.name: float(x[v.id]) for v in instance.variables}
    return Solved(float(instance.objective.value(x)), assignment, nodes_total, iterations_total)
