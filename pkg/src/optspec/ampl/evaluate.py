"""Ground expressions into affine forms over variable ids."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from . import ast
from .data import DataSection
from .errors import CompileError


@dataclass
class LinearForm:
    coefs: dict[int, float] = field(default_factory=dict)
    const: float = 0.0

    @property
    def is_constant(self) -> bool:
        return not self.coefs

    def scaled(self, k: float) -> "LinearForm":
        if k == 0:
            return LinearForm({}, 0.0)
        return LinearForm({v: c * k for v, c in self.coefs.items()}, self.const * k)

    def plus(self, other: "LinearForm", sign: float = 1.0) -> "LinearForm":
        coefs = dict(self.coefs)
        for v, c in other.coefs.items():
            coefs[v] = coefs.get(v, 0.0) + sign * c
        return LinearForm(coefs, self.const + sign * other.const)

    def pruned(self) -> "LinearForm":
        return LinearForm({v: c for v, c in self.coefs.items() if c != 0.0}, self.const)


def subscript_label(name: str, members: tuple[str, ...]) -> str:
    if not members:
        return name
    return f"{name}[{','.join(members)}]"


def iterate_binders(
    binders: tuple[ast.Binder, ...], data: DataSection, env: Mapping[str, str]
) -> Iterator[tuple[dict[str, str], tuple[str, ...]]]:
    """Yield (extended env, member tuple) for every combination, in data order."""
    pools = []
    for b in binders:
        if b.set_name not in data.set_values:
            raise CompileError(
                "unresolved-symbol", f"set {b.set_name} has no members in the data",
                symbol=b.set_name,
            )
        pools.append(data.set_values[b.set_name])
    for combo in itertools.product(*pools):
        scope = dict(env)
        for b, member in zip(binders, combo):
            if b.dummy is not None:
                scope[b.dummy] = member
        yield scope, tuple(combo)


class Evaluator:
    """Turns expression trees into :class:`LinearForm` under a dummy binding.

    ``var_ids`` maps ``(var name, member tuple)`` to a column id; when it is
    None every variable reference is an error (constant context, e.g. bounds).
    """

    def __init__(
        self,
        model: ast.AmplModelAst,
        data: DataSection,
        var_ids: Mapping[tuple[str, tuple[str, ...]], int] | None = None,
    ) -> None:
        self.data = data
        self.var_ids = var_ids
        self.params = {p.name: p for p in model.params}
        self.vars = {v.name: v for v in model.vars}

    def constant(self, expr: ast.Expr, env: Mapping[str, str], context: str) -> float:
        form = self.eval(expr, env)
        if not form.is_constant:
            raise CompileError(
                "nonlinear-expression", f"{context} must not depend on variables", symbol=context
            )
        return form.const

    def _members(self, ref: ast.Ref, env: Mapping[str, str]) -> tuple[str, ...]:
        out = []
        for sub in ref.subscripts:
            if isinstance(sub, ast.Sym):
                out.append(sub.text)
            elif sub.name in env:
                out.append(env[sub.name])
            else:
                raise CompileError(
                    "unresolved-symbol", f"index {sub.name} is not bound here",
                    line=sub.line, column=sub.column, symbol=sub.name,
                )
        return tuple(out)

    def eval(self, expr: ast.Expr, env: Mapping[str, str]) -> LinearForm:
        if isinstance(expr, ast.Num):
            return LinearForm({}, expr.value)
        if isinstance(expr, ast.Neg):
            return self.eval(expr.operand, env).scaled(-1.0)
        if isinstance(expr, ast.BinOp):
            return self._binop(expr, env)
        if isinstance(expr, ast.Sum):
            total = LinearForm()
            for scope, _ in iterate_binders(expr.binders, self.data, env):
                total = total.plus(self.eval(expr.body, scope))
            return total
        if isinstance(expr, ast.Ref):
            return self._ref(expr, env)
        raise TypeError(f"not an expression: {expr!r}")

    def _binop(self, expr: ast.BinOp, env: Mapping[str, str]) -> LinearForm:
        left = self.eval(expr.left, env)
        right = self.eval(expr.right, env)
        if expr.op == "+":
            return left.plus(right)
        if expr.op == "-":
            return left.plus(right, -1.0)
        if expr.op == "*":
            if left.is_constant:
                return right.scaled(left.const)
            if right.is_constant:
                return left.scaled(right.const)
            raise CompileError(
                "nonlinear-expression",
                "product of two variable terms; only linear expressions are supported",
                line=_line(expr),
                column=_column(expr),
            )
        if expr.op == "/":
            if not right.is_constant:
                raise CompileError(
                    "nonlinear-expression", "division by a variable term is not linear",
                    line=_line(expr), column=_column(expr),
                )
            if right.const == 0:
                raise CompileError(
                    "bound-violation", "division by zero", line=_line(expr), column=_column(expr)
                )
            return left.scaled(1.0 / right.const)
        raise TypeError(f"unknown operator {expr.op}")

    def _ref(self, ref: ast.Ref, env: Mapping[str, str]) -> LinearForm:
        if not ref.subscripts and ref.name in env:
            raise CompileError(
                "unresolved-symbol",
                f"index {ref.name} ranges over set members and cannot be used as a number",
                line=ref.line, column=ref.column, symbol=ref.name,
            )
        members = self._members(ref, env)
        label = subscript_label(ref.name, members)
        if ref.name in self.params:
            value = self.data.param_values.get(ref.name)
            if value is None:
                raise CompileError(
                    "unresolved-symbol", f"param {ref.name} has no data", symbol=ref.name
                )
            if isinstance(value, dict):
                key = members[0] if len(members) == 1 else members
                if key not in value:
                    raise CompileError(
                        "unresolved-symbol", f"no value for {label} in the data",
                        line=ref.line, column=ref.column, symbol=label,
                    )
                return LinearForm({}, value[key])
            return LinearForm({}, value)
        if ref.name in self.vars:
            if self.var_ids is None:
                raise CompileError(
                    "nonlinear-expression",
                    f"variable {ref.name} cannot appear in a bound or parameter expression",
                    line=ref.line, column=ref.column, symbol=ref.name,
                )
            vid = self.var_ids.get((ref.name, members))
            if vid is None:
                raise CompileError(
                    "unresolved-symbol", f"{label} is not a member of the variable's index set",
                    line=ref.line, column=ref.column, symbol=label,
                )
            return LinearForm({vid: 1.0}, 0.0)
        raise CompileError(
            "unresolved-symbol", f"{ref.name} is not a parameter or variable",
            line=ref.line, column=ref.column, symbol=ref.name,
        )


def _first_ref(expr: ast.Expr) -> ast.Ref | None:
    if isinstance(expr, ast.Ref):
        return expr
    if isinstance(expr, ast.BinOp):
        return _first_ref(expr.left) or _first_ref(expr.right)
    if isinstance(expr, ast.Neg):
        return _first_ref(expr.operand)
    if isinstance(expr, ast.Sum):
        return _first_ref(expr.body)
    return None


def _line(expr: ast.Expr) -> int | None:
    ref = _first_ref(expr)
    return ref.line if ref else None


def _column(expr: ast.Expr) -> int | None:
    ref = _first_ref(expr)
    return ref.column if ref else None
