"""
The modeling language: parse, check, ground and render
======================================================

A model file declares sets, parameters, variables, one or more objectives
and constraints. A data file fills the sets and parameters. This script
walks one small blending model through every stage of the front end.
"""
from __future__ import annotations

from optspec.ampl import CompileError, ObjectivePolicy, instantiate, parse_data, parse_model, render_model, validate

MODEL = """
set FOODS;
set NUTRIENTS;

param cost {FOODS} >= 0;
param amount {NUTRIENTS, FOODS} >= 0;
param need {NUTRIENTS} >= 0;
param maxServings >= 0;

var serve {f in FOODS} >= 0, <= maxServings;

subject to Nutrition {n in NUTRIENTS}:
  sum {f in FOODS} amount[n,f] * serve[f] >= need[n];

minimize Total_Cost:
  sum {f in FOODS} cost[f] * serve[f];
"""

DATA = """
set FOODS := bread milk beans;
set NUTRIENTS := protein iron;

param cost := bread 2 milk 3 beans 4;
param amount:  bread milk beans :=
  protein      4     8     12
  iron         2     1     6;
param need := protein 40 iron 15;
param maxServings := 5;
"""

# %% Parsing gives a plain dataclass tree
model = parse_model(MODEL)
print([(type(d).__name__, d.name) for d in model.declarations()])

# %% Validation checks every reference, index arity and declared bound
data = parse_data(DATA)
report = validate(model, data)
print("warnings:", report.warnings)

# %% Grounding expands indexed declarations into one row per member
instance = instantiate(model, data, ObjectivePolicy())
print(len(instance.variables), "variables,", len(instance.rows), "rows")
for row in instance.rows:
    print(" ", row.name, row.coefs, row.relation, row.rhs)

# %% The renderer prints canonical text that parses back to the same tree
text = render_model(model)
assert parse_model(text) == model
print(text)

# %% Errors carry a kind, a position and a message
try:
    parse_model("var x >= 0\nmaximize z: x;")
except CompileError as err:
    print(err.kind, err.line, err.message)

try:
    validate(model, parse_data("set FOODS := bread;\nset NUTRIENTS := iron;\n"))
except CompileError as err:
    print(err.kind, err.message)
