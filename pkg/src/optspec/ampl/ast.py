"""Syntax tree for the supported AMPL subset.

All nodes are frozen dataclasses, so structural equality is plain ``==``.
Source positions are kept for error messages but excluded from comparison,
which is what makes ``parse_model(render_model(ast)) == ast`` meaningful.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Sym:
    """A quoted set member used as a literal subscript, e.g. ``x['A']``."""

    text: str


@dataclass(frozen=True)
class Ref:
    """A name, optionally subscripted: param, var, or index dummy."""

    name: str
    subscripts: tuple["Subscript", ...] = ()
    line: int | None = field(default=None, compare=False, repr=False)
    column: int | None = field(default=None, compare=False, repr=False)


Subscript = Union[Ref, Sym]


@dataclass(frozen=True)
class Binder:
    """``dummy in SET``; ``dummy`` is None for the bare ``{SET}`` form."""

    dummy: str | None
    set_name: str


@dataclass(frozen=True)
class Sum:
    binders: tuple[Binder, ...]
    body: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


Expr = Union[Num, Ref, Sum, BinOp, Neg]


@dataclass(frozen=True)
class SetDecl:
    name: str
    line: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ParamDecl:
    name: str
    index: tuple[Binder, ...] = ()
    lower: Expr | None = None
    upper: Expr | None = None
    line: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class VarDecl:
    name: str
    index: tuple[Binder, ...] = ()
    lower: Expr | None = None
    upper: Expr | None = None
    integrality: str = "continuous"  # continuous | integer | binary
    line: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ConstraintDecl:
    name: str
    index: tuple[Binder, ...]
    lhs: Expr
    relation: str  # <=, =, >=
    rhs: Expr
    line: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ObjectiveDecl:
    name: str
    sense: str  # maximize | minimize
    expr: Expr
    line: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class AmplModelAst:
    sets: tuple[SetDecl, ...] = ()
    params: tuple[ParamDecl, ...] = ()
    vars: tuple[VarDecl, ...] = ()
    constraints: tuple[ConstraintDecl, ...] = ()
    objectives: tuple[ObjectiveDecl, ...] = ()

    def declarations(self):
        yield from self.sets
        yield from self.params
        yield from self.vars
        yield from self.constraints
        yield from self.objectives

    def lookup(self, name: str):
        for decl in self.declarations():
            if decl.name == name:
                return decl
        return None
