"""Canonical text for model ASTs; ``parse_model(render_model(m)) == m``."""
from __future__ import annotations

import math
import re

from . import ast


def format_number(value: float) -> str:
    if math.isfinite(value) and value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(float(value))


def _binders(binders: tuple[ast.Binder, ...]) -> str:
    parts = [b.set_name if b.dummy is None else f"{b.dummy} in {b.set_name}" for b in binders]
    return "{" + ", ".join(parts) + "}"


def _subscript(sub: ast.Subscript) -> str:
    if isinstance(sub, ast.Sym):
        if re.fullmatch(r"\d+", sub.text):
            return sub.text
        quote = "'" if "'" not in sub.text else '"'
        return f"{quote}{sub.text}{quote}"
    return sub.name


def _open_sum_tail(e: ast.Expr) -> bool:
    # a trailing unparenthesized sum would swallow the following factor
    if isinstance(e, ast.Sum):
        return True
    if isinstance(e, ast.Neg) and not isinstance(e.operand, ast.BinOp):
        return _open_sum_tail(e.operand)
    return False


def render_expr(e: ast.Expr) -> str:
    if isinstance(e, ast.Num):
        # the parser never yields negative literals (it builds Neg nodes)
        return format_number(e.value)
    if isinstance(e, ast.Ref):
        if not e.subscripts:
            return e.name
        return f"{e.name}[{', '.join(_subscript(s) for s in e.subscripts)}]"
    if isinstance(e, ast.Neg):
        inner = e.operand
        text = render_expr(inner)
        if isinstance(inner, ast.BinOp):
            text = f"({text})"
        return f"-{text}"
    if isinstance(e, ast.Sum):
        body = render_expr(e.body)
        if isinstance(e.body, ast.BinOp) and e.body.op in "+-":
            body = f"({body})"
        return f"sum {_binders(e.binders)} {body}"
    if isinstance(e, ast.BinOp):
        left = render_expr(e.left)
        right = render_expr(e.right)
        if e.op in "+-":
            if isinstance(e.right, ast.BinOp) and e.right.op in "+-":
                right = f"({right})"
        else:
            if isinstance(e.left, ast.BinOp) and e.left.op in "+-":
                left = f"({left})"
            if _open_sum_tail(e.left):
                left = f"({left})"
            if isinstance(e.right, (ast.BinOp, ast.Sum)):
                right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression: {e!r}")


def _attrs(lower, upper, integrality: str = "continuous") -> str:
    parts = []
    if integrality != "continuous":
        parts.append(integrality)
    if lower is not None:
        parts.append(f">= {render_expr(lower)}")
    if upper is not None:
        parts.append(f"<= {render_expr(upper)}")
    return (" " + ", ".join(parts)) if parts else ""


def render_model(model: ast.AmplModelAst) -> str:
    """One declaration per line, grouped sets/params/vars/constraints/objectives."""
    lines: list[str] = []
    for s in model.sets:
        lines.append(f"set {s.name};")
    for p in model.params:
        index = f" {_binders(p.index)}" if p.index else ""
        lines.append(f"param {p.name}{index}{_attrs(p.lower, p.upper)};")
    for v in model.vars:
        index = f" {_binders(v.index)}" if v.index else ""
        lines.append(f"var {v.name}{index}{_attrs(v.lower, v.upper, v.integrality)};")
    for c in model.constraints:
        index = f" {_binders(c.index)}" if c.index else ""
        lines.append(
            f"subject to {c.name}{index}: {render_expr(c.lhs)} {c.relation} {render_expr(c.rhs)};"
        )
    for o in model.objectives:
        lines.append(f"{o.sense} {o.name}: {render_expr(o.expr)};")
    return "\n".join(lines) + "\n"
