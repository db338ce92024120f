"""Recursive-descent parser for model (``.mod``) documents."""
from __future__ import annotations

from . import ast
from .errors import CompileError
from .lexer import Token, TokenStream

_RELATIONS = {"<=": "<=", ">=": ">=", "=": "=", "==": "="}
MAX_PARAM_ARITY = 2


def parse_model(text: str) -> ast.AmplModelAst:
    """Parse a model document into an :class:`~optspec.ampl.ast.AmplModelAst`.

    Only syntax is checked here; name resolution and arity checks live in
    :func:`optspec.ampl.semantics.check_model`.
    """
    stream = TokenStream(text)
    sets, params, vars_, constraints, objectives = [], [], [], [], []
    while not stream.at_end():
        tok = stream.current
        if tok.kind != "keyword":
            raise stream.error(f"expected a declaration but found {tok.describe()}")
        if tok.text == "set":
            sets.append(_set_decl(stream))
        elif tok.text == "param":
            params.append(_param_decl(stream))
        elif tok.text == "var":
            vars_.append(_var_decl(stream))
        elif tok.text in ("subject", "s.t."):
            constraints.append(_constraint_decl(stream))
        elif tok.text in ("maximize", "minimize"):
            objectives.append(_objective_decl(stream))
        elif tok.text == "data":
            raise stream.error("a model document cannot contain a data section")
        else:
            raise stream.error(f"unexpected keyword '{tok.text}'")
    return ast.AmplModelAst(
        tuple(sets), tuple(params), tuple(vars_), tuple(constraints), tuple(objectives)
    )


def _end(stream: TokenStream, what: str) -> None:
    stream.expect(";", f" to end the {what}")


def _set_decl(stream: TokenStream) -> ast.SetDecl:
    kw = stream.advance()
    name = stream.expect_ident("a set name")
    if stream.check(":="):
        raise stream.error("set members belong in the data section, not the model")
    _end(stream, f"declaration of set {name.text}")
    return ast.SetDecl(name.text, line=kw.line)


def _indexing(stream: TokenStream) -> tuple[ast.Binder, ...]:
    stream.expect("{")
    binders = [_binder(stream)]
    while stream.accept(","):
        binders.append(_binder(stream))
    stream.expect("}", " to close the indexing expression")
    return tuple(binders)


def _binder(stream: TokenStream) -> ast.Binder:
    first = stream.expect_ident("an index name or set name")
    if stream.accept("in"):
        set_name = stream.expect_ident("a set name after 'in'")
        return ast.Binder(first.text, set_name.text)
    return ast.Binder(None, first.text)


def _bounds(stream: TokenStream, decl: str) -> tuple[ast.Expr | None, ast.Expr | None, str]:
    lower = upper = None
    integrality = "continuous"
    while not stream.check(";"):
        tok = stream.current
        if stream.accept(">="):
            if lower is not None:
                raise stream.error(f"duplicate lower bound on {decl}", tok)
            lower = parse_expr(stream)
        elif stream.accept("<="):
            if upper is not None:
                raise stream.error(f"duplicate upper bound on {decl}", tok)
            upper = parse_expr(stream)
        elif stream.check("integer") or stream.check("binary"):
            if integrality != "continuous":
                raise stream.error(f"duplicate integrality attribute on {decl}", tok)
            integrality = stream.advance().text
        else:
            raise stream.error(
                f"expected '>=', '<=', 'integer', 'binary' or ';' in declaration of {decl}"
                f" but found {tok.describe()}"
            )
        stream.accept(",")
    return lower, upper, integrality


def _param_decl(stream: TokenStream) -> ast.ParamDecl:
    kw = stream.advance()
    name = stream.expect_ident("a parameter name")
    index = _indexing(stream) if stream.check("{") else ()
    if len(index) > MAX_PARAM_ARITY:
        raise stream.error(
            f"parameter {name.text} has {len(index)} indices; at most {MAX_PARAM_ARITY} are supported",
            name,
        )
    lower, upper, integrality = _bounds(stream, f"param {name.text}")
    if integrality != "continuous":
        raise stream.error(f"'{integrality}' is only allowed on variables", name)
    _end(stream, f"declaration of param {name.text}")
    return ast.ParamDecl(name.text, index, lower, upper, line=kw.line)


def _var_decl(stream: TokenStream) -> ast.VarDecl:
    kw = stream.advance()
    name = stream.expect_ident("a variable name")
    index = _indexing(stream) if stream.check("{") else ()
    lower, upper, integrality = _bounds(stream, f"var {name.text}")
    _end(stream, f"declaration of var {name.text}")
    return ast.VarDecl(name.text, index, lower, upper, integrality, line=kw.line)


def _constraint_decl(stream: TokenStream) -> ast.ConstraintDecl:
    kw = stream.advance()
    if kw.text == "subject":
        stream.expect("to", " after 'subject'")
    name = stream.expect_ident("a constraint name")
    index = _indexing(stream) if stream.check("{") else ()
    stream.expect(":", f" after constraint name {name.text}")
    lhs = parse_expr(stream)
    rel = stream.current
    if rel.kind != "op" or rel.text not in _RELATIONS:
        raise stream.error(
            f"expected '<=', '>=' or '=' in constraint {name.text} but found {rel.describe()}"
        )
    stream.advance()
    rhs = parse_expr(stream)
    _end(stream, f"constraint {name.text}")
    return ast.ConstraintDecl(name.text, index, lhs, _RELATIONS[rel.text], rhs, line=kw.line)


def _objective_decl(stream: TokenStream) -> ast.ObjectiveDecl:
    kw = stream.advance()
    name = stream.expect_ident("an objective name")
    stream.expect(":", f" after objective name {name.text}")
    expr = parse_expr(stream)
    _end(stream, f"objective {name.text}")
    return ast.ObjectiveDecl(name.text, kw.text, expr, line=kw.line)


def parse_expr(stream: TokenStream) -> ast.Expr:
    node = _term(stream)
    while stream.check("+") or stream.check("-"):
        op = stream.advance().text
        node = ast.BinOp(op, node, _term(stream))
    return node


def _term(stream: TokenStream) -> ast.Expr:
    node = _unary(stream)
    while stream.check("*") or stream.check("/"):
        op = stream.advance().text
        node = ast.BinOp(op, node, _unary(stream))
    return node


def _unary(stream: TokenStream) -> ast.Expr:
    if stream.accept("-"):
        return ast.Neg(_unary(stream))
    if stream.accept("+"):
        return _unary(stream)
    return _primary(stream)


def _primary(stream: TokenStream) -> ast.Expr:
    tok = stream.current
    if tok.kind == "number":
        stream.advance()
        return ast.Num(tok.value)
    if stream.accept("("):
        inner = parse_expr(stream)
        stream.expect(")", " to close the parenthesis")
        return inner
    if stream.check("sum"):
        stream.advance()
        if not stream.check("{"):
            raise stream.error("expected '{' after 'sum'")
        binders = _indexing(stream)
        return ast.Sum(binders, _term(stream))
    if tok.kind == "ident":
        stream.advance()
        subs: tuple = ()
        if stream.accept("["):
            subs = _subscripts(stream)
        return ast.Ref(tok.text, subs, line=tok.line, column=tok.column)
    raise stream.error(f"expected an expression but found {tok.describe()}")


def _subscripts(stream: TokenStream) -> tuple[ast.Subscript, ...]:
    items = [_subscript(stream)]
    while stream.accept(","):
        items.append(_subscript(stream))
    stream.expect("]", " to close the subscript")
    return tuple(items)


def _subscript(stream: TokenStream) -> ast.Subscript:
    tok: Token = stream.current
    if tok.kind == "ident":
        stream.advance()
        return ast.Ref(tok.text, line=tok.line, column=tok.column)
    if tok.kind == "string":
        stream.advance()
        return ast.Sym(tok.text[1:-1])
    if tok.kind == "number":
        stream.advance()
        return ast.Sym(tok.text)
    raise stream.error(
        f"expected an index name or a quoted member in subscript but found {tok.describe()}"
    )


__all__ = ["parse_model", "parse_expr", "CompileError"]
