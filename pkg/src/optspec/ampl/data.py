"""Data (``.dat``) documents: set members and parameter values."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import CompileError
from .lexer import Token, TokenStream

# scalar | 1-D {member: value} | 2-D {(row, col): value}
ParamValue = Union[float, dict]


@dataclass
class DataSection:
    set_values: dict[str, list[str]] = field(default_factory=dict)
    param_values: dict[str, ParamValue] = field(default_factory=dict)

    def param_arity(self, name: str) -> int:
        value = self.param_values[name]
        if isinstance(value, dict):
            if value and isinstance(next(iter(value)), tuple):
                return 2
            return 1
        return 0


def parse_data(text: str) -> DataSection:
    """Parse a data document.

    Accepts the three layouts used by hand-written and generated data files::

        param budget := 10;
        param price := A 10 B 15;
        param unit :  A  B :=
            R1  1  1
            R2  1  2;
    """
    stream = TokenStream(text)
    data = DataSection()
    if stream.accept("data"):
        stream.expect(";", " after 'data'")
    while not stream.at_end():
        if stream.accept("end"):
            stream.expect(";", " after 'end'")
            if not stream.at_end():
                raise stream.error("unexpected text after 'end;'")
            break
        tok = stream.current
        if stream.check("set"):
            _set_stmt(stream, data)
        elif stream.check("param"):
            _param_stmt(stream, data)
        else:
            raise stream.error(f"expected 'set' or 'param' but found {tok.describe()}")
    return data


def _is_member(tok: Token) -> bool:
    return tok.kind in ("ident", "number", "string")


def _member_text(tok: Token) -> str:
    return tok.text[1:-1] if tok.kind == "string" else tok.text


def _set_stmt(stream: TokenStream, data: DataSection) -> None:
    stream.advance()
    name = stream.expect_ident("a set name")
    if name.text in data.set_values:
        raise stream.error(f"set {name.text} is given twice", name)
    stream.expect(":=", f" after set name {name.text}")
    members: list[str] = []
    seen: set[str] = set()
    while not stream.check(";"):
        tok = stream.current
        if not _is_member(tok):
            raise stream.error(f"expected a member of set {name.text} but found {tok.describe()}")
        stream.advance()
        member = _member_text(tok)
        if member in seen:
            raise stream.error(f"member {member} appears twice in set {name.text}", tok)
        seen.add(member)
        members.append(member)
        stream.accept(",")
    stream.advance()
    data.set_values[name.text] = members


def _value(stream: TokenStream) -> float | None:
    """Read a signed number, or return None without consuming anything."""
    tok = stream.current
    if tok.kind == "op" and tok.text in "+-" and stream.peek().kind == "number":
        stream.advance()
        num = stream.advance().value
        return -num if tok.text == "-" else num
    if tok.kind == "number":
        return stream.advance().value
    return None


def _param_stmt(stream: TokenStream, data: DataSection) -> None:
    stream.advance()
    name = stream.expect_ident("a parameter name")
    if name.text in data.param_values:
        raise stream.error(f"param {name.text} is given twice", name)
    if stream.accept(":"):
        data.param_values[name.text] = _table(stream, name.text)
        return
    stream.expect(":=", f" after param name {name.text}")
    # scalar: exactly one number before ';'
    first = stream.current
    if (first.kind == "number" and stream.peek().text == ";") or (
        first.text in ("+", "-") and stream.peek(2).text == ";"
    ):
        value = _value(stream)
        if value is None:
            raise stream.error(f"expected a number for param {name.text}")
        stream.expect(";")
        data.param_values[name.text] = value
        return
    values: dict[str, float] = {}
    while not stream.check(";"):
        key_tok = stream.current
        if not _is_member(key_tok):
            raise stream.error(
                f"expected a member name in param {name.text} but found {key_tok.describe()}"
            )
        stream.advance()
        stream.accept(",")
        value = _value(stream)
        if value is None:
            raise stream.error(
                f"expected a value for {name.text}[{_member_text(key_tok)}]"
                f" but found {stream.current.describe()}"
            )
        key = _member_text(key_tok)
        if key in values:
            raise stream.error(f"{name.text}[{key}] is given twice", key_tok)
        values[key] = value
        stream.accept(",")
    stream.advance()
    data.param_values[name.text] = values


def _table(stream: TokenStream, name: str) -> dict[tuple[str, str], float]:
    columns: list[str] = []
    while not stream.check(":="):
        tok = stream.current
        if not _is_member(tok):
            raise stream.error(
                f"expected a column label in table {name} but found {tok.describe()}"
            )
        columns.append(_member_text(stream.advance()))
    stream.advance()
    if not columns:
        raise stream.error(f"table {name} has no column labels")
    if len(set(columns)) != len(columns):
        raise stream.error(f"table {name} repeats a column label")
    values: dict[tuple[str, str], float] = {}
    rows: set[str] = set()
    while not stream.check(";"):
        row_tok = stream.current
        if not _is_member(row_tok):
            raise stream.error(f"expected a row label in table {name} but found {row_tok.describe()}")
        stream.advance()
        row = _member_text(row_tok)
        if row in rows:
            raise stream.error(f"row {row} appears twice in table {name}", row_tok)
        rows.add(row)
        for col in columns:
            value = _value(stream)
            if value is None:
                tok = stream.current
                raise CompileError(
                    "ragged-table",
                    f"row {row} of table {name} has no value for column {col}"
                    f" (found {tok.describe()}); every row needs {len(columns)} values",
                    line=tok.line,
                    column=tok.column,
                    symbol=name,
                )
            values[(row, col)] = value
    stream.advance()
    return values
