from __future__ import annotations


class CompileError(Exception):
    """A model or data document that cannot be turned into a problem instance.

    ``kind`` is one of ``lex``, ``syntax``, ``ragged-table``, ``unresolved-symbol``,
    ``arity-mismatch``, ``bound-violation``, ``duplicate-declaration``,
    ``nonlinear-expression``, ``multiple-objectives``, ``no-objective`` or
    ``no-variable``. The message is shown verbatim to the LLM during
    refinement, so it has to make sense without the surrounding code.
    """

    def __init__(
        self,
        kind: str,
        message: str,
        *,
        line: int | None = None,
        column: int | None = None,
        symbol: str | None = None,
    ) -> None:
        if not message:
            raise ValueError("CompileError needs a message")
        self.kind = kind
        self.message = message
        self.line = line
        self.column = column
        self.symbol = symbol
        super().__init__(str(self))

    @property
    def location(self) -> tuple[int, int] | None:
        if self.line is None:
            return None
        return (self.line, self.column or 0)

    def __str__(self) -> str:
        where = ""
        if self.line is not None:
            where = f" at line {self.line}, column {self.column}"
        elif self.symbol is not None:
            where = f" ({self.symbol})"
        return f"{self.kind} error{where}: {self.message}"

    def __reduce__(self):
        return (_rebuild, (self.kind, self.message, self.line, self.column, self.symbol))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "message": self.message,
            "line": self.line,
            "column": self.column,
            "symbol": self.symbol,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CompileError":
        return cls(
            d["kind"], d["message"], line=d.get("line"), column=d.get("column"),
            symbol=d.get("symbol"),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompileError):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    __hash__ = Exception.__hash__


def _rebuild(kind, message, line, column, symbol):
    return CompileError(kind, message, line=line, column=column, symbol=symbol)


def render_compile_error(err: CompileError) -> str:
    """Feedback block for a compile error, same layout as solver diagnostics."""
    lines = [f"ERROR {err.kind}"]
    if err.line is not None:
        lines.append(f"at line {err.line}, column {err.column}")
    if err.symbol is not None:
        lines.append(f"symbol {err.symbol}")
    lines.append(err.message)
    return "\n".join(lines)
