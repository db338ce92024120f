"""Tokenizer shared by the model and data parsers."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .errors import CompileError

KEYWORDS = frozenset({
    "set", "param", "var", "subject", "to", "maximize", "minimize", "sum",
    "in", "integer", "binary", "data", "end",
})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<st>s\.t\.)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>'[^'\n]*'|"[^"\n]*")
  | (?P<op>:=|<=|>=|==|[;:{}\[\](),+\-*/=<>.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, number, string, op, eof
    text: str
    line: int
    column: int

    @property
    def value(self) -> float:
        return float(self.text)

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        return f"'{self.text}'"


def tokenize(text: str) -> Iterator[Token]:
    """Yield tokens, skipping whitespace and ``#`` comments.

    Raises ``CompileError(kind="lex")`` on characters outside the grammar.
    """
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if m is None:
            raise CompileError(
                "lex", f"unexpected character {text[pos]!r}", line=line, column=column
            )
        group = m.lastgroup
        tok = m.group()
        pos = m.end()
        if group == "nl":
            line += 1
            line_start = pos
            continue
        if group in ("ws", "comment"):
            continue
        if group == "ident":
            kind = "keyword" if tok in KEYWORDS else "ident"
        elif group == "st":
            kind = "keyword"
        elif group == "string":
            kind = "string"
        elif group == "number":
            kind = "number"
        else:
            kind = "op"
        yield Token(kind, tok, line, column)
    yield Token("eof", "", line, n - line_start + 1)


class TokenStream:
    """One-token lookahead cursor with error helpers."""

    def __init__(self, text: str) -> None:
        self.tokens = list(tokenize(text))
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def at_end(self) -> bool:
        return self.current.kind == "eof"

    def advance(self) -> Token:
        tok = self.current
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def check(self, text: str) -> bool:
        tok = self.current
        return tok.kind in ("op", "keyword") and tok.text == text

    def accept(self, text: str) -> Token | None:
        if self.check(text):
            return self.advance()
        return None

    def expect(self, text: str, context: str = "") -> Token:
        if self.check(text):
            return self.advance()
        raise self.error(f"expected '{text}'{context} but found {self.current.describe()}")

    def expect_ident(self, what: str = "a name") -> Token:
        tok = self.current
        if tok.kind != "ident":
            raise self.error(f"expected {what} but found {tok.describe()}")
        return self.advance()

    def error(self, message: str, token: Token | None = None) -> CompileError:
        tok = token or self.current
        return CompileError("syntax", message, line=tok.line, column=tok.column)
