"""Grounding a model and its data into a flat LP/MILP."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

from . import ast
from .data import DataSection
from .errors import CompileError
from .evaluate import Evaluator, LinearForm, iterate_binders, subscript_label


@dataclass(frozen=True)
class Variable:
    id: int
    name: str
    lower: float = 0.0
    upper: float = math.inf
    integrality: str = "continuous"
    origin: str = ""

    @property
    def is_integer(self) -> bool:
        return self.integrality != "continuous"


@dataclass(frozen=True)
class Row:
    name: str
    coefs: dict[int, float]
    relation: str  # <=, =, >=
    rhs: float
    origin: str = ""


@dataclass(frozen=True)
class Objective:
    sense: str  # maximize | minimize
    coefs: dict[int, float]
    constant: float = 0.0
    name: str = ""

    def value(self, x) -> float:
        return self.constant + sum(c * x[v] for v, c in self.coefs.items())


@dataclass(frozen=True)
class ObjectivePolicy:
    """How several declared objectives collapse into one.

    ``single`` rejects models with more than one objective, ``lexicographic``
    optimizes them in declaration order, and ``weighted`` sums them with the
    given weights under the sense of the first weighted objective.
    """

    kind: str = "single"
    weights: tuple[tuple[str, float], ...] = ()

    @classmethod
    def weighted(cls, weights: dict[str, float]) -> "ObjectivePolicy":
        return cls("weighted", tuple(weights.items()))

    @classmethod
    def parse(cls, text: str) -> "ObjectivePolicy":
        """Parse ``single``, ``lexicographic`` or ``weighted:A=1,B=-1``."""
        text = text.strip()
        if text in ("single", "lexicographic"):
            return cls(text)
        if text.startswith("weighted:"):
            weights = []
            for item in text[len("weighted:"):].split(","):
                name, sep, w = item.partition("=")
                if not sep or not name.strip():
                    raise ValueError(f"bad weight entry {item!r}; expected NAME=WEIGHT")
                weights.append((name.strip(), float(w)))
            if not weights:
                raise ValueError("weighted policy needs at least one weight")
            return cls("weighted", tuple(weights))
        raise ValueError(f"unknown objective policy {text!r}")

    def __str__(self) -> str:
        if self.kind == "weighted":
            return "weighted:" + ",".join(f"{n}={w:g}" for n, w in self.weights)
        return self.kind


@dataclass(frozen=True)
class ProblemInstance:
    variables: tuple[Variable, ...]
    objective: Objective
    rows: tuple[Row, ...] = ()
    # later stages of a lexicographic policy, optimized after ``objective``
    tail_objectives: tuple[Objective, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.variables)
        for var in self.variables:
            if var.lower > var.upper:
                raise ValueError(f"{var.name}: lower bound exceeds upper bound")
        for row in self.rows:
            if any(v < 0 or v >= n for v in row.coefs):
                raise ValueError(f"row {row.name} references an unknown variable")
        for obj in (self.objective, *self.tail_objectives):
            if obj.sense not in ("maximize", "minimize"):
                raise ValueError(f"bad objective sense {obj.sense!r}")
            if any(v < 0 or v >= n for v in obj.coefs):
                raise ValueError("objective references an unknown variable")

    @property
    def is_mip(self) -> bool:
        return any(v.is_integer for v in self.variables)

    @property
    def provenance(self) -> dict[str, str]:
        """Grounded var/row name -> name of the declaration it came from."""
        out = {v.name: v.origin for v in self.variables}
        out.update({r.name: r.origin for r in self.rows})
        return out

    def variable_index(self) -> dict[str, int]:
        return {v.name: v.id for v in self.variables}

    def row_activity(self, row: Row, x) -> float:
        return sum(c * x[v] for v, c in row.coefs.items())

    def with_bounds(self, lower, upper) -> "ProblemInstance":
        variables = tuple(
            Variable(v.id, v.name, lo, hi, v.integrality, v.origin)
            for v, lo, hi in zip(self.variables, lower, upper)
        )
        return ProblemInstance(variables, self.objective, self.rows, self.tail_objectives)


def _located(err: CompileError, decl) -> CompileError:
    if err.line is None and err.symbol is None:
        err.symbol = decl.name
        err.line = getattr(decl, "line", None)
    return err


def _grounded(decl, data: DataSection) -> Iterator[tuple[dict, tuple[str, ...]]]:
    try:
        yield from iterate_binders(decl.index, data, {})
    except CompileError as err:
        raise _located(err, decl)


def instantiate(
    model: ast.AmplModelAst,
    data: DataSection,
    policy: ObjectivePolicy | None = None,
) -> ProblemInstance:
    """Expand indexed declarations over the data and fold to affine rows.

    Variables and rows follow declaration order, then member order as given
    in the data, so the result is a deterministic function of the inputs.
    """
    policy = policy or ObjectivePolicy()
    var_ids: dict[tuple[str, tuple[str, ...]], int] = {}
    consts = Evaluator(model, data)
    variables: list[Variable] = []
    for decl in model.vars:
        for env, members in _grounded(decl, data):
            name = subscript_label(decl.name, members)
            try:
                lo = -math.inf if decl.lower is None else consts.constant(decl.lower, env, f"lower bound of {name}")
                hi = math.inf if decl.upper is None else consts.constant(decl.upper, env, f"upper bound of {name}")
            except CompileError as err:
                raise _located(err, decl)
            if decl.integrality == "binary":
                lo, hi = max(lo, 0.0), min(hi, 1.0)
            if lo > hi:
                raise CompileError(
                    "bound-violation", f"{name} has lower bound {lo:g} above upper bound {hi:g}",
                    symbol=name, line=decl.line,
                )
            var_ids[(decl.name, members)] = len(variables)
            variables.append(Variable(len(variables), name, lo, hi, decl.integrality, decl.name))

    ev = Evaluator(model, data, var_ids)
    rows: list[Row] = []
    for decl in model.constraints:
        for env, members in _grounded(decl, data):
            try:
                form = ev.eval(decl.lhs, env).plus(ev.eval(decl.rhs, env), -1.0).pruned()
            except CompileError as err:
                raise _located(err, decl)
            rows.append(
                Row(subscript_label(decl.name, members), form.coefs, decl.relation, -form.const, decl.name)
            )

    forms: dict[str, tuple[ast.ObjectiveDecl, LinearForm]] = {}
    for decl in model.objectives:
        try:
            forms[decl.name] = (decl, ev.eval(decl.expr, {}).pruned())
        except CompileError as err:
            raise _located(err, decl)
    objective, tail = _lower_objectives(model, forms, policy)
    return ProblemInstance(tuple(variables), objective, tuple(rows), tail)


def _as_objective(decl: ast.ObjectiveDecl, form: LinearForm) -> Objective:
    return Objective(decl.sense, form.coefs, form.const, decl.name)


def _lower_objectives(model, forms, policy: ObjectivePolicy):
    decls = list(model.objectives)
    if policy.kind == "single":
        if len(decls) > 1:
            names = ", ".join(d.name for d in decls)
            raise CompileError(
                "multiple-objectives",
                f"the model declares {len(decls)} objectives ({names}); keep exactly one",
                symbol=decls[1].name, line=decls[1].line,
            )
        decl, form = forms[decls[0].name]
        return _as_objective(decl, form), ()
    if policy.kind == "lexicographic":
        stages = [_as_objective(*forms[d.name]) for d in decls]
        return stages[0], tuple(stages[1:])
    if policy.kind == "weighted":
        weights = dict(policy.weights)
        for name in weights:
            if name not in forms:
                raise CompileError(
                    "unresolved-symbol", f"weighted policy names unknown objective {name}",
                    symbol=name,
                )
        order = [d for d in decls if d.name in weights]
        total = LinearForm()
        for d in order:
            total = total.plus(forms[d.name][1].scaled(weights[d.name]))
        total = total.pruned()
        label = "+".join(f"{weights[d.name]:g}*{d.name}" for d in order)
        return Objective(order[0].sense, total.coefs, total.const, label), ()
    raise ValueError(f"unknown objective policy {policy.kind!r}")
