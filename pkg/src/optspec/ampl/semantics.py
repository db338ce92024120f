"""Name resolution, arity checks, and model/data consistency."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import ast
from .data import DataSection
from .errors import CompileError
from .evaluate import Evaluator, iterate_binders, subscript_label


@dataclass
class ValidationReport:
    warnings: list[str] = field(default_factory=list)


def check_model(model: ast.AmplModelAst) -> None:
    """Raise CompileError unless every name resolves with the right arity."""
    seen: dict[str, object] = {}
    for decl in model.declarations():
        if decl.name in seen:
            raise CompileError(
                "duplicate-declaration", f"{decl.name} is declared more than once",
                line=decl.line, symbol=decl.name,
            )
        seen[decl.name] = decl
    if not model.vars:
        raise CompileError("no-variable", "the model declares no variables", symbol="var")
    if not model.objectives:
        raise CompileError(
            "no-objective", "the model declares no maximize or minimize objective",
            symbol="objective",
        )
    checker = _Checker(model, seen)
    for p in model.params:
        scope = checker.scope_of(p.index, p)
        for bound in (p.lower, p.upper):
            if bound is not None:
                checker.expr(bound, scope, allow_vars=False, owner=p)
    for v in model.vars:
        scope = checker.scope_of(v.index, v)
        for bound in (v.lower, v.upper):
            if bound is not None:
                checker.expr(bound, scope, allow_vars=False, owner=v)
    for c in model.constraints:
        scope = checker.scope_of(c.index, c)
        checker.expr(c.lhs, scope, allow_vars=True, owner=c)
        checker.expr(c.rhs, scope, allow_vars=True, owner=c)
    for o in model.objectives:
        checker.expr(o.expr, {}, allow_vars=True, owner=o)


class _Checker:
    def __init__(self, model: ast.AmplModelAst, names: dict[str, object]) -> None:
        self.names = names
        self.sets = {s.name for s in model.sets}

    def scope_of(self, binders, owner, outer: dict[str, str] | None = None) -> dict[str, str]:
        scope = dict(outer or {})
        for b in binders:
            if b.set_name not in self.sets:
                raise CompileError(
                    "unresolved-symbol",
                    f"{b.set_name} in the indexing of {owner.name} is not a declared set",
                    line=owner.line, symbol=b.set_name,
                )
            if b.dummy is not None:
                if b.dummy in self.names:
                    raise CompileError(
                        "duplicate-declaration",
                        f"index name {b.dummy} in {owner.name} clashes with a declaration",
                        line=owner.line, symbol=b.dummy,
                    )
                if b.dummy in scope:
                    raise CompileError(
                        "duplicate-declaration",
                        f"index name {b.dummy} is bound twice in {owner.name}",
                        line=owner.line, symbol=b.dummy,
                    )
                scope[b.dummy] = b.set_name
        return scope

    def expr(self, e: ast.Expr, scope: dict[str, str], *, allow_vars: bool, owner) -> None:
        if isinstance(e, ast.Num):
            return
        if isinstance(e, ast.Neg):
            self.expr(e.operand, scope, allow_vars=allow_vars, owner=owner)
        elif isinstance(e, ast.BinOp):
            self.expr(e.left, scope, allow_vars=allow_vars, owner=owner)
            self.expr(e.right, scope, allow_vars=allow_vars, owner=owner)
        elif isinstance(e, ast.Sum):
            inner = self.scope_of(e.binders, owner, scope)
            self.expr(e.body, inner, allow_vars=allow_vars, owner=owner)
        elif isinstance(e, ast.Ref):
            self.ref(e, scope, allow_vars=allow_vars, owner=owner)

    def ref(self, ref: ast.Ref, scope: dict[str, str], *, allow_vars: bool, owner) -> None:
        loc = dict(line=ref.line if ref.line is not None else owner.line, column=ref.column)
        if ref.name in scope and not ref.subscripts:
            raise CompileError(
                "unresolved-symbol",
                f"index {ref.name} ranges over set members and cannot be used as a number",
                symbol=ref.name, **loc,
            )
        decl = self.names.get(ref.name)
        if decl is None:
            raise CompileError(
                "unresolved-symbol", f"{ref.name} is not declared", symbol=ref.name, **loc
            )
        if isinstance(decl, ast.VarDecl):
            if not allow_vars:
                raise CompileError(
                    "nonlinear-expression",
                    f"variable {ref.name} cannot appear in a bound of {owner.name}",
                    symbol=ref.name, **loc,
                )
        elif not isinstance(decl, ast.ParamDecl):
            kind = type(decl).__name__.replace("Decl", "").lower()
            raise CompileError(
                "unresolved-symbol",
                f"{ref.name} is a {kind} and cannot be used inside an expression",
                symbol=ref.name, **loc,
            )
        if len(ref.subscripts) != len(decl.index):
            raise CompileError(
                "arity-mismatch",
                f"{ref.name} takes {len(decl.index)} subscript(s) but {len(ref.subscripts)} given",
                symbol=ref.name, **loc,
            )
        for sub, binder in zip(ref.subscripts, decl.index):
            if isinstance(sub, ast.Ref):
                if sub.name not in scope:
                    raise CompileError(
                        "unresolved-symbol",
                        f"subscript {sub.name} of {ref.name} is not a bound index name",
                        symbol=sub.name, **loc,
                    )
                if scope[sub.name] != binder.set_name:
                    raise CompileError(
                        "arity-mismatch",
                        f"{ref.name} is indexed over {binder.set_name} but {sub.name}"
                        f" ranges over {scope[sub.name]}",
                        symbol=ref.name, **loc,
                    )


def validate(model: ast.AmplModelAst, data: DataSection) -> ValidationReport:
    """Check the model on its own and against a data section.

    Returns a report of warnings; anything fatal raises CompileError.
    """
    check_model(model)
    report = ValidationReport()
    for s in model.sets:
        if s.name not in data.set_values:
            raise CompileError(
                "unresolved-symbol", f"set {s.name} has no data", symbol=s.name, line=s.line
            )
        if not data.set_values[s.name]:
            report.warnings.append(f"set {s.name} is empty")
    for p in model.params:
        _check_param_data(p, data)
    _check_param_bounds(model, data)
    declared = {d.name for d in model.declarations()}
    for name in data.set_values:
        if name not in declared:
            report.warnings.append(f"data for set {name} has no declaration in the model")
    for name in data.param_values:
        if name not in declared:
            report.warnings.append(f"data for param {name} has no declaration in the model")
    return report


def _check_param_data(p: ast.ParamDecl, data: DataSection) -> None:
    if p.name not in data.param_values:
        raise CompileError(
            "unresolved-symbol", f"param {p.name} has no data", symbol=p.name, line=p.line
        )
    value = data.param_values[p.name]
    arity = len(p.index)
    got = data.param_arity(p.name)
    empty = isinstance(value, dict) and not value
    if got != arity and not (empty and arity > 0):
        raise CompileError(
            "arity-mismatch",
            f"param {p.name} is declared with {arity} index(es) but the data gives"
            f" {'a scalar' if got == 0 else f'{got}-dimensional values'}",
            symbol=p.name, line=p.line,
        )
    if arity == 0:
        return
    pools = [data.set_values[b.set_name] for b in p.index]
    members = [set(pool) for pool in pools]
    for key in value:
        parts = key if isinstance(key, tuple) else (key,)
        for part, allowed, b in zip(parts, members, p.index):
            if part not in allowed:
                raise CompileError(
                    "unresolved-symbol",
                    f"{subscript_label(p.name, parts)} uses {part}, which is not a member of"
                    f" set {b.set_name}",
                    symbol=p.name, line=p.line,
                )
    for combo in itertools.product(*pools):
        key = combo[0] if arity == 1 else combo
        if key not in value:
            label = subscript_label(p.name, combo)
            raise CompileError(
                "unresolved-symbol", f"no value for {label} in the data", symbol=label, line=p.line
            )


def _check_param_bounds(model: ast.AmplModelAst, data: DataSection) -> None:
    ev = Evaluator(model, data)
    for p in model.params:
        if p.lower is None and p.upper is None:
            continue
        for env, members in iterate_binders(p.index, data, {}):
            label = subscript_label(p.name, members)
            value = ev.eval(ast.Ref(p.name, tuple(ast.Sym(m) for m in members)), env).const
            if p.lower is not None:
                lo = ev.constant(p.lower, env, f"lower bound of {p.name}")
                if value < lo:
                    raise CompileError(
                        "bound-violation",
                        f"{label} = {value:g} violates its declared bound >= {lo:g}",
                        symbol=label, line=p.line,
                    )
            if p.upper is not None:
                hi = ev.constant(p.upper, env, f"upper bound of {p.name}")
                if value > hi:
                    raise CompileError(
                        "bound-violation",
                        f"{label} = {value:g} violates its declared bound <= {hi:g}",
                        symbol=label, line=p.line,
                    )
