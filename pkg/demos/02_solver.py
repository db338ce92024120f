"""
The embedded solver: simplex, branch and bound, diagnostics
===========================================================

Grounded instances go to a two-phase simplex (for LPs) or to branch and
bound on top of it (for MILPs). Failures come back as typed outcomes with
a feedback text that names the rows involved.
"""
from __future__ import annotations

import itertools

from optspec.ampl import ObjectivePolicy, instantiate, parse_data, parse_model
from optspec.solver import RuntimeFailure, Solved, SolverParams, render_diagnostics, solve_milp


def ground(model: str, data: str = ""):
    return instantiate(parse_model(model), parse_data(data), ObjectivePolicy())


# %% A small knapsack, solved exactly
KNAPSACK = """
set ITEMS;
param value {ITEMS};
param weight {ITEMS};
param capacity;
var take {ITEMS} binary;
maximize Value: sum {i in ITEMS} value[i] * take[i];
subject to Capacity: sum {i in ITEMS} weight[i] * take[i] <= capacity;
"""
KNAPSACK_DATA = """
set ITEMS := tent stove rope lamp;
param value := tent 10 stove 7 rope 4 lamp 5;
param weight := tent 6 stove 4 rope 2 lamp 3;
param capacity := 9;
"""
instance = ground(KNAPSACK, KNAPSACK_DATA)
outcome = solve_milp(instance)
assert isinstance(outcome, Solved)
print("objective", outcome.objective, "nodes", outcome.node_count)
print({k: v for k, v in outcome.assignment.items() if v > 0.5})

# %% Brute force agrees
values, weights = [10, 7, 4, 5], [6, 4, 2, 3]
best = max(
    sum(v * t for v, t in zip(values, pick))
    for pick in itertools.product([0, 1], repeat=4)
    if sum(w * t for w, t in zip(weights, pick)) <= 9
)
print("brute force", best)

# %% Infeasible models name a conflicting set of rows
CONFLICT = """
var x >= 0;
var y >= 0;
maximize z: x + y;
subject to Small: x + y <= 4;
subject to Large: x + y >= 6;
"""
inst = ground(CONFLICT)
failure = solve_milp(inst)
assert isinstance(failure, RuntimeFailure)
print(render_diagnostics(failure, inst))

# %% Unbounded models name a ray direction; limits are kinds of their own
inst = ground("var x >= 0;\nmaximize z: x;\n")
print(render_diagnostics(solve_milp(inst), inst))
tight = SolverParams(max_bb_nodes=1)
print(solve_milp(instance, tight))
