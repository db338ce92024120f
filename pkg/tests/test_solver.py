from __future__ import annotations

import math
import random

import numpy as np
import pytest
from scipy.optimize import linprog

from oracles import close, lp_oracle, milp_oracle, random_lp
from optspec.ampl import (
    Objective,
    ObjectivePolicy,
    ProblemInstance,
    Row,
    Variable,
    instantiate,
    parse_data,
    parse_model,
)
from optspec.solver import (
    RuntimeFailure,
    Solved,
    SolverParams,
    infeasible_rows,
    render_diagnostics,
    solve_lp,
    solve_milp,
)

# Optimum of the reference production model, frozen from the exact vertex
# enumeration in oracles.lp_oracle (Revenue alone and Revenue - Hold_Cost
# both give 140; Hold_Cost is 0 at that optimum).
SHOP_OBJECTIVE = 140.0


def _shop(shop_text, policy, data_edit=None):
    data = shop_text[1] if data_edit is None else data_edit(shop_text[1])
    return instantiate(parse_model(shop_text[0]), parse_data(data), policy)


def _lp(n, rows, obj, sense="maximize", lower=0.0, upper=math.inf, integrality="continuous"):
    variables = tuple(Variable(j, f"x{j}", lower, upper, integrality, "x") for j in range(n))
    return ProblemInstance(variables, Objective(sense, obj), tuple(rows))


def _status(outcome) -> str:
    return "optimal" if isinstance(outcome, Solved) else outcome.kind


# -- fixed examples -----------------------------------------------------------


def test_single_variable_lp():
    out = solve_lp(_lp(1, [Row("cap", {0: 1.0}, "<=", 8.0)], {0: 10.0}))
    assert isinstance(out, Solved)
    assert out.objective == pytest.approx(80.0)
    assert out.assignment == {"x0": pytest.approx(8.0)}


def test_contradictory_bounds_infeasible():
    inst = _lp(1, [Row("c1", {0: 1.0}, ">=", 5.0), Row("c2", {0: 1.0}, "<=", 3.0)], {0: 1.0}, lower=-math.inf)
    out = solve_lp(inst)
    assert isinstance(out, RuntimeFailure) and out.kind == "infeasible"


@pytest.mark.parametrize(
    "policy",
    [
        ObjectivePolicy.weighted({"Revenue": 1.0}),
        ObjectivePolicy.weighted({"Revenue": 1.0, "Hold_Cost": -1.0}),
        ObjectivePolicy("lexicographic"),
    ],
    ids=["revenue", "weighted", "lexicographic"],
)
def test_shop_objective(shop_text, policy):
    inst = _shop(shop_text, policy)
    out = solve_lp(inst)
    assert isinstance(out, Solved)
    assert out.objective == pytest.approx(SHOP_OBJECTIVE, abs=1e-6)
    x = np.array([out.assignment[v.name] for v in inst.variables])
    assert inst.objective.value(x) == pytest.approx(out.objective, rel=1e-6)
    for row in inst.rows:
        act = inst.row_activity(row, x)
        if row.relation == "<=":
            assert act <= row.rhs + 1e-6
        elif row.relation == "=":
            assert act == pytest.approx(row.rhs, abs=1e-6)
    if policy.kind == "lexicographic":
        assert inst.tail_objectives[0].value(x) == pytest.approx(0.0, abs=1e-6)


def test_shop_oracle_agrees(shop_text):
    inst = _shop(shop_text, ObjectivePolicy.weighted({"Revenue": 1.0}))
    assert lp_oracle(inst, force_equalities=True) == ("optimal", SHOP_OBJECTIVE)


def test_small_milp():
    inst = _lp(2, [Row("c", {0: 2.0, 1: 3.0}, "<=", 12.0)], {0: 1.0, 1: 1.0},
               upper=10.0, integrality="integer")
    assert milp_oracle(inst) == ("optimal", 6)
    out = solve_milp(inst)
    assert isinstance(out, Solved)
    assert out.objective == 6.0
    assert out.assignment == {"x0": 6.0, "x1": 0.0}
    assert out.node_count >= 1


def test_knapsack_nothing_fits():
    weights = [7.0, 9.0, 12.0]
    inst = _lp(3, [Row("cap", dict(enumerate(weights)), "<=", 5.0)], {0: 4.0, 1: 5.0, 2: 9.0},
               upper=1.0, integrality="binary")
    out = solve_milp(inst)
    assert isinstance(out, Solved)
    assert out.objective == 0.0
    assert set(out.assignment.values()) == {0.0}


def test_milp_dispatches_continuous(shop_text):
    inst = _shop(shop_text, ObjectivePolicy.weighted({"Revenue": 1.0}))
    assert solve_milp(inst) == solve_lp(inst)


def test_solve_lp_refuses_integers():
    with pytest.raises(ValueError):
        solve_lp(_lp(1, [], {0: 1.0}, upper=1.0, integrality="integer"))


def test_unbounded_lp_and_milp():
    for integrality in ("continuous", "integer"):
        out = solve_milp(_lp(1, [], {0: 1.0}, integrality=integrality))
        assert isinstance(out, RuntimeFailure) and out.kind == "unbounded"
        assert out.vars == ("x0",)


def test_integer_infeasible_gap():
    # 2x = 3 has a continuous solution but no integer one
    inst = _lp(1, [Row("odd", {0: 2.0}, "=", 3.0)], {0: 1.0}, upper=5.0, integrality="integer")
    out = solve_milp(inst)
    assert isinstance(out, RuntimeFailure) and out.kind == "infeasible"


def test_limits(shop_text):
    inst = _shop(shop_text, ObjectivePolicy.weighted({"Revenue": 1.0}))
    out = solve_lp(inst, SolverParams(max_simplex_iterations=1))
    assert isinstance(out, RuntimeFailure) and out.kind == "iteration-limit"
    frac = _lp(2, [Row("c", {0: 2.0, 1: 2.0}, "<=", 3.0)], {0: 1.0, 1: 1.0}, upper=5.0, integrality="integer")
    out = solve_milp(frac, SolverParams(max_bb_nodes=1))
    assert isinstance(out, RuntimeFailure) and out.kind == "node-limit"


@pytest.mark.parametrize(
    "field, value",
    [("feasibility_tol", 0.0), ("pivot_tol", -1.0), ("max_simplex_iterations", 0), ("max_bb_nodes", 0)],
)
def test_params_validated(field, value):
    with pytest.raises(ValueError):
        SolverParams(**{field: value})


def test_free_and_upper_only_variables():
    # minimize x0 - x1 with x0 free, x1 <= 4, x0 >= -3 through a row
    variables = (
        Variable(0, "x0", -math.inf, math.inf),
        Variable(1, "x1", -math.inf, 4.0),
    )
    inst = ProblemInstance(variables, Objective("minimize", {0: 1.0, 1: -1.0}),
                           (Row("r", {0: 1.0}, ">=", -3.0), Row("s", {1: 1.0}, ">=", -10.0)))
    out = solve_lp(inst)
    assert out.objective == pytest.approx(-7.0)
    assert out.assignment == {"x0": pytest.approx(-3.0), "x1": pytest.approx(4.0)}


def test_objective_constant_is_reported():
    inst = ProblemInstance((Variable(0, "x", 0.0, 2.0),), Objective("maximize", {0: 3.0}, 5.0), ())
    assert solve_lp(inst).objective == pytest.approx(11.0)


def test_redundant_equalities():
    rows = [Row("a", {0: 1.0, 1: 1.0}, "=", 4.0), Row("b", {0: 2.0, 1: 2.0}, "=", 8.0)]
    out = solve_lp(_lp(2, rows, {0: 1.0, 1: 2.0}))
    assert out.objective == pytest.approx(8.0)


# -- oracle equivalence ---------------------------------------------------------


@pytest.mark.parametrize("open_upper", [False, True], ids=["boxed", "open"])
def test_lp_matches_vertex_oracle(open_upper):
    rng = random.Random(20240611 + open_upper)
    for _ in range(150):
        inst = random_lp(rng, open_upper=open_upper)
        status, value = lp_oracle(inst)
        out = solve_lp(inst)
        assert _status(out) == status, inst
        if status == "optimal":
            assert close(out.objective, float(value)), (inst, out, value)


def test_milp_matches_enumeration():
    rng = random.Random(31337)
    for _ in range(100):
        inst = random_lp(rng, integer=True)
        status, value = milp_oracle(inst)
        out = solve_milp(inst)
        assert _status(out) == status, inst
        if status == "optimal":
            assert out.objective == value


def test_lp_matches_highs():
    # second, floating-point reference for the optimality certificate
    rng = random.Random(5)
    for _ in range(100):
        inst = random_lp(rng)
        out = solve_lp(inst)
        n = len(inst.variables)
        sign = -1.0 if inst.objective.sense == "maximize" else 1.0
        c = np.zeros(n)
        for j, v in inst.objective.coefs.items():
            c[j] = sign * v
        a_ub, b_ub, a_eq, b_eq = [], [], [], []
        for row in inst.rows:
            a = np.zeros(n)
            for j, v in row.coefs.items():
                a[j] = v
            if row.relation == "<=":
                a_ub.append(a), b_ub.append(row.rhs)
            elif row.relation == ">=":
                a_ub.append(-a), b_ub.append(-row.rhs)
            else:
                a_eq.append(a), b_eq.append(row.rhs)
        ref = linprog(
            c, A_ub=np.array(a_ub) if a_ub else None, b_ub=b_ub or None,
            A_eq=np.array(a_eq) if a_eq else None, b_eq=b_eq or None,
            bounds=[(v.lower, v.upper) for v in inst.variables], method="highs",
        )
        if ref.status == 2:
            assert _status(out) == "infeasible"
        else:
            assert ref.status == 0
            assert close(out.objective, sign * ref.fun)


# -- properties -----------------------------------------------------------------


def test_deterministic_outcomes():
    rng = random.Random(77)
    for _ in range(30):
        inst = random_lp(rng, integer=rng.random() < 0.5)
        assert solve_milp(inst) == solve_milp(inst)


def test_objective_scaling_keeps_argmax():
    rng = random.Random(99)
    checked = 0
    for _ in range(60):
        inst = random_lp(rng)
        base = solve_lp(inst)
        if not isinstance(base, Solved):
            continue
        for c in (0.5, 3.0, 1000.0):
            obj = Objective(inst.objective.sense, {j: c * v for j, v in inst.objective.coefs.items()})
            scaled = solve_lp(ProblemInstance(inst.variables, obj, inst.rows))
            assert scaled.assignment == pytest.approx(base.assignment, abs=1e-9)
            assert scaled.objective == pytest.approx(c * base.objective, rel=1e-9, abs=1e-9)
        checked += 1
    assert checked > 20


# -- diagnostics ----------------------------------------------------------------


def test_diagnostics_infeasible_pair():
    inst = instantiate(
        parse_model("var x; subject to lo: x >= 5; subject to hi: x <= 3; maximize z: x;"),
        parse_data(""),
    )
    out = solve_milp(inst)
    text = render_diagnostics(out, inst)
    lines = text.splitlines()
    assert lines[0] == "ERROR infeasible"
    assert lines[1:3] == ["row lo", "row hi"]
    assert "infeasible" in lines[3]
    assert len(lines) == 4


def test_diagnostics_unbounded():
    inst = instantiate(parse_model("var x >= 0; maximize z: x;"), parse_data(""))
    text = render_diagnostics(solve_milp(inst), inst)
    assert text.splitlines()[:2] == ["ERROR unbounded", "var x"]
    assert "unbounded" in text.splitlines()[2]


def test_diagnostics_negative_budget(shop_text):
    inst = _shop(
        shop_text,
        ObjectivePolicy.weighted({"Revenue": 1.0}),
        lambda d: d.replace("param budget := 10;", "param budget := -1;"),
    )
    out = solve_milp(inst)
    assert isinstance(out, RuntimeFailure) and out.kind == "infeasible"
    assert infeasible_rows(inst) == ["Budget_Limit"]
    text = render_diagnostics(out, inst)
    assert text.splitlines()[:2] == ["ERROR infeasible", "row Budget_Limit"]


def test_diagnostics_indexed_rows_name_declaration():
    inst = instantiate(
        parse_model(
            "set S; var x {S} >= 0; subject to need {i in S}: x[i] >= 2;"
            " subject to cap: sum {i in S} x[i] <= 3; minimize z: sum {i in S} x[i];"
        ),
        parse_data("set S := A B;"),
    )
    text = render_diagnostics(solve_milp(inst), inst)
    assert text.splitlines()[1:4] == ["row need[A]", "row need[B]", "row cap"]
    assert "need, cap" in text


def test_diagnostics_limit_kind():
    out = RuntimeFailure("iteration-limit", "simplex stopped after 1 iterations")
    inst = _lp(1, [], {0: 1.0})
    lines = render_diagnostics(out, inst).splitlines()
    assert lines[0] == "ERROR iteration-limit" and len(lines) == 2
