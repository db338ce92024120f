"""Two-phase dense-tableau simplex with Bland's rule.

Instances are desk-sized, so the tableau is a plain numpy array and every
iteration recomputes reduced costs from scratch. Bland's rule (lowest
eligible index enters, lowest basic index leaves on ratio ties) guarantees
termination and makes the pivot sequence a pure function of the input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..ampl.instance import ProblemInstance
from .outcome import RuntimeFailure, Solved, SolveOutcome, SolverParams

_ZERO = 1e-12


@dataclass
class _Column:
    var: int
    sign: float


@dataclass
class LpResult:
    status: str  # optimal | infeasible | unbounded | iteration-limit
    x: np.ndarray | None = None
    objective: float = math.nan
    iterations: int = 0
    ray_vars: tuple[int, ...] = ()


class _StandardForm:
    """``min c·z`` s.t. ``A z (<=|=|>=) b``, ``z >= 0`` with ``b >= 0``.

    Each original variable maps to one or two nonnegative columns plus an
    offset; finite ranges add an explicit ``<=`` bound row.
    """

    def __init__(self, instance: ProblemInstance, lower, upper, objective) -> None:
        self.n = len(instance.variables)
        self.columns: list[_Column] = []
        self.offset = np.zeros(self.n)
        var_cols: list[list[tuple[int, float]]] = []
        bound_rows: list[tuple[int, float]] = []
        for j in range(self.n):
            lo, hi = lower[j], upper[j]
            cols = []
            if math.isfinite(lo):
                self.offset[j] = lo
                cols.append((len(self.columns), 1.0))
                self.columns.append(_Column(j, 1.0))
                if math.isfinite(hi):
                    bound_rows.append((cols[0][0], hi - lo))
            elif math.isfinite(hi):
                self.offset[j] = hi
                cols.append((len(self.columns), -1.0))
                self.columns.append(_Column(j, -1.0))
            else:
                cols.append((len(self.columns), 1.0))
                self.columns.append(_Column(j, 1.0))
                cols.append((len(self.columns), -1.0))
                self.columns.append(_Column(j, -1.0))
            var_cols.append(cols)

        self.k = len(self.columns)
        sense = -1.0 if objective.sense == "maximize" else 1.0
        self.cost = np.zeros(self.k)
        for j, c in objective.coefs.items():
            for col, sign in var_cols[j]:
                self.cost[col] += sense * c * sign

        rows, rels, rhs = [], [], []
        for row in instance.rows:
            a = np.zeros(self.k)
            b = row.rhs
            for j, c in row.coefs.items():
                b -= c * self.offset[j]
                for col, sign in var_cols[j]:
                    a[col] += c * sign
            rows.append(a)
            rels.append(row.relation)
            rhs.append(b)
        for col, width in bound_rows:
            a = np.zeros(self.k)
            a[col] = 1.0
            rows.append(a)
            rels.append("<=")
            rhs.append(width)
        self.A = np.array(rows).reshape(len(rows), self.k)
        self.rel = rels
        self.b = np.array(rhs, dtype=float)

    def recover(self, z: np.ndarray) -> np.ndarray:
        x = self.offset.copy()
        for col, info in enumerate(self.columns):
            x[info.var] += info.sign * z[col]
        return x


def _pivot(T: np.ndarray, basis: list[int], r: int, j: int) -> None:
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    T[np.abs(T) < _ZERO] = 0.0
    basis[r] = j


def _iterate(T, basis, cost, allowed, params: SolverParams, budget: list[int]):
    """Run simplex iterations on ``T`` until optimal or unbounded.

    Returns ``("optimal", None)``, ``("unbounded", j)`` or ``("iteration-limit", None)``.
    """
    ncols = T.shape[1] - 1
    while True:
        cb = cost[basis]
        reduced = cost[:ncols] - cb @ T[:, :ncols]
        entering = -1
        for j in allowed:
            if reduced[j] < -params.pivot_tol:
                entering = j
                break
        if entering < 0:
            return "optimal", None
        if budget[0] >= params.max_simplex_iterations:
            return "iteration-limit", None
        column = T[:, entering]
        leave = -1
        best = math.inf
        for i in range(T.shape[0]):
            if column[i] > params.pivot_tol:
                ratio = T[i, -1] / column[i]
                if leave < 0:
                    best, leave = ratio, i
                    continue
                tie = abs(ratio - best) <= 1e-12 * (1.0 + abs(best))
                if tie:
                    if basis[i] < basis[leave]:
                        leave = i
                elif ratio < best:
                    best, leave = ratio, i
        if leave < 0:
            return "unbounded", entering
        _pivot(T, basis, leave, entering)
        budget[0] += 1


def solve_relaxation(
    instance: ProblemInstance,
    params: SolverParams,
    lower=None,
    upper=None,
    objective=None,
) -> LpResult:
    """Solve the LP relaxation, optionally with overridden bounds/objective."""
    lower = [v.lower for v in instance.variables] if lower is None else lower
    upper = [v.upper for v in instance.variables] if upper is None else upper
    objective = objective or instance.objective
    if any(lo > hi for lo, hi in zip(lower, upper)):
        return LpResult("infeasible")
    sf = _StandardForm(instance, lower, upper, objective)
    m, k = sf.A.shape

    # normalize to b >= 0, then lay out slack/surplus and artificial columns
    A = sf.A.copy()
    b = sf.b.copy()
    rel = list(sf.rel)
    for i in range(m):
        if b[i] < 0:
            A[i] *= -1
            b[i] *= -1
            rel[i] = {"<=": ">=", ">=": "<=", "=": "="}[rel[i]]
    n_slack = sum(1 for r in rel if r != "=")
    n_art = sum(1 for r in rel if r != "<=")
    ncols = k + n_slack + n_art
    T = np.zeros((m, ncols + 1))
    T[:, :k] = A
    T[:, -1] = b
    basis = [0] * m
    s_col, a_col = k, k + n_slack
    artificial = set()
    for i in range(m):
        if rel[i] == "<=":
            T[i, s_col] = 1.0
            basis[i] = s_col
            s_col += 1
        else:
            if rel[i] == ">=":
                T[i, s_col] = -1.0
                s_col += 1
            T[i, a_col] = 1.0
            basis[i] = a_col
            artificial.add(a_col)
            a_col += 1

    budget = [0]
    if artificial:
        phase1 = np.zeros(ncols)
        phase1[sorted(artificial)] = 1.0
        status, _ = _iterate(T, basis, phase1, range(ncols), params, budget)
        if status == "iteration-limit":
            return LpResult(status, iterations=budget[0])
        infeasibility = float(phase1[basis] @ T[:, -1])
        if infeasibility > params.feasibility_tol:
            return LpResult("infeasible", iterations=budget[0])
        # drive remaining (zero-valued) artificials out of the basis
        keep = []
        for r in range(T.shape[0]):
            if basis[r] in artificial:
                for j in range(k + n_slack):
                    if abs(T[r, j]) > params.pivot_tol:
                        _pivot(T, basis, r, j)
                        break
                else:
                    continue  # redundant row
            keep.append(r)
        T = T[keep]
        basis = [basis[r] for r in keep]

    cost = np.zeros(ncols)
    cost[:k] = sf.cost
    allowed = range(k + n_slack)
    status, entering = _iterate(T, basis, cost, allowed, params, budget)
    if status == "iteration-limit":
        return LpResult(status, iterations=budget[0])
    z = np.zeros(ncols)
    for r, j in enumerate(basis):
        z[j] = T[r, -1]
    if status == "unbounded":
        direction = np.zeros(ncols)
        direction[entering] = 1.0
        for r, j in enumerate(basis):
            direction[j] = -T[r, entering]
        dx = np.zeros(sf.n)
        for col, info in enumerate(sf.columns):
            dx[info.var] += info.sign * direction[col]
        moving = tuple(int(j) for j in np.flatnonzero(np.abs(dx) > params.pivot_tol))
        return LpResult("unbounded", iterations=budget[0], ray_vars=moving)
    x = sf.recover(z[:k])
    return LpResult("optimal", x, objective.value(x), budget[0])


def check_solution(instance: ProblemInstance, x, params: SolverParams) -> str | None:
    """Name of the first row or bound violated beyond tolerance, if any."""
    for v in instance.variables:
        tol = params.feasibility_tol * max(1.0, abs(x[v.id]))
        if x[v.id] < v.lower - tol or x[v.id] > v.upper + tol:
            return v.name
    for row in instance.rows:
        act = instance.row_activity(row, x)
        tol = params.feasibility_tol * max(1.0, abs(row.rhs), abs(act))
        if row.relation == "<=" and act > row.rhs + tol:
            return row.name
        if row.relation == ">=" and act < row.rhs - tol:
            return row.name
        if row.relation == "=" and abs(act - row.rhs) > tol:
            return row.name
    return None


def _failure(instance: ProblemInstance, res: LpResult, params: SolverParams) -> RuntimeFailure:
    if res.status == "infeasible":
        return RuntimeFailure("infeasible", "no assignment satisfies all rows and bounds")
    if res.status == "unbounded":
        names = tuple(instance.variables[j].name for j in res.ray_vars)
        return RuntimeFailure(
            "unbounded", "the objective improves without limit along a feasible ray", names
        )
    if res.status == "iteration-limit":
        return RuntimeFailure(
            "iteration-limit",
            f"simplex stopped after {params.max_simplex_iterations} iterations",
        )
    return RuntimeFailure("numeric-failure", f"unexpected solver status {res.status}")


def lexicographic_bound_row(objective, value: float, params: SolverParams | None = None):
    """Row that keeps a finished lexicographic stage at its optimum."""
    from ..ampl.instance import Row

    # phase 1 already tolerates feasibility_tol, so no explicit slack here
    target = value - objective.constant
    relation = ">=" if objective.sense == "maximize" else "<="
    return Row(f"stage[{objective.name}]", dict(objective.coefs), relation, target, objective.name)


def solve_lp(instance: ProblemInstance, params: SolverParams | None = None) -> SolveOutcome:
    """Solve a purely continuous instance.

    Integrality attributes must be absent; use :func:`solve_milp` otherwise.
    """
    params = params or SolverParams()
    if instance.is_mip:
        raise ValueError("solve_lp needs a continuous instance; use solve_milp")
    stages = (instance.objective, *instance.tail_objectives)
    current = instance
    iterations = 0
    res = None
    for idx, stage in enumerate(stages):
        res = solve_relaxation(current, params, objective=stage)
        iterations += res.iterations
        if res.status != "optimal":
            return _failure(instance, res, params)
        if idx + 1 < len(stages):
            extra = lexicographic_bound_row(stage, res.objective, params)
            current = ProblemInstance(current.variables, current.objective, current.rows + (extra,))
    x = res.x
    bad = check_solution(instance, x, params)
    if bad is not None:
        return RuntimeFailure("numeric-failure", f"solution violates {bad} beyond tolerance")
    assignment = {v.name: float(x[v.id]) for v in instance.variables}
    return Solved(float(instance.objective.value(x)), assignment, 0, iterations)
