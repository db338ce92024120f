"""The structured-problem wire format produced by the structuring step.

A response looks like this (block order is fixed, REWRITTEN runs to the end)::

    OBJECTIVES:
    - maximize total sales revenue
    PARAMETERS:
    price | one-dimensional | selling price per product
    VARIABLES:
    x | one-dimensional | units produced per product
    CONSTRAINTS:
    - resource use stays within inventory plus purchases
    REWRITTEN:
    Each product sells for \\param{price} ...

Parsing is strict: anything off-schema raises ParseError instead of being
repaired, so malformed responses show up in the run record.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..ampl.lexer import KEYWORDS

BLOCKS = ("OBJECTIVES", "PARAMETERS", "VARIABLES", "CONSTRAINTS", "REWRITTEN")
DIMENSIONS = {"scalar": 0, "one-dimensional": 1, "two-dimensional": 2}

_HEADER = re.compile(r"^([A-Z]+):\s*(.*)$")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
MARKUP = re.compile(r"\\(param|var)\{([^{}]*)\}")


class ParseError(Exception):
    def __init__(self, message: str, *, line: int | None = None, kind: str = "malformed-structure") -> None:
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.line = line

    def __str__(self) -> str:
        where = f" (line {self.line})" if self.line is not None else ""
        return f"{self.kind}{where}: {self.message}"


@dataclass(frozen=True)
class SymbolMeta:
    name: str
    description: str
    dimension: str  # scalar | one-dimensional | two-dimensional
    kind: str  # parameter | variable

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("symbol name must be nonempty")
        if self.dimension not in DIMENSIONS:
            raise ValueError(f"unknown dimension {self.dimension!r}")
        if self.kind not in ("parameter", "variable"):
            raise ValueError(f"unknown symbol kind {self.kind!r}")

    @property
    def arity(self) -> int:
        return DIMENSIONS[self.dimension]


@dataclass(frozen=True)
class StructuredProblem:
    objectives: tuple[str, ...]
    constraints: tuple[str, ...]
    parameters: tuple[SymbolMeta, ...]
    variables: tuple[SymbolMeta, ...]
    rewritten_description: str

    def symbol(self, name: str) -> SymbolMeta | None:
        for meta in (*self.parameters, *self.variables):
            if meta.name == name:
                return meta
        return None

    def markup_names(self) -> list[tuple[str, str]]:
        return [(m.group(1), m.group(2)) for m in MARKUP.finditer(self.rewritten_description)]

    def to_dict(self) -> dict:
        return {
            "objectives": list(self.objectives),
            "constraints": list(self.constraints),
            "parameters": [vars(m) for m in self.parameters],
            "variables": [vars(m) for m in self.variables],
            "rewritten_description": self.rewritten_description,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StructuredProblem":
        return cls(
            tuple(d["objectives"]),
            tuple(d["constraints"]),
            tuple(SymbolMeta(**m) for m in d["parameters"]),
            tuple(SymbolMeta(**m) for m in d["variables"]),
            d["rewritten_description"],
        )


def _symbol(line: str, number: int, kind: str) -> SymbolMeta:
    parts = [p.strip() for p in line.split("|", 2)]
    if len(parts) != 3:
        raise ParseError(f"expected 'name | dimension | description' but got {line.strip()!r}", line=number)
    name, dimension, description = parts
    if not _IDENT.fullmatch(name) or name in KEYWORDS:
        raise ParseError(f"{name!r} is not a valid identifier", line=number)
    if dimension not in DIMENSIONS:
        raise ParseError(
            f"dimension of {name} must be one of {', '.join(DIMENSIONS)}, not {dimension!r}", line=number
        )
    if not description:
        raise ParseError(f"{name} has an empty description", line=number)
    return SymbolMeta(name, description, dimension, kind)


def _item(line: str) -> str:
    text = line.strip()
    return text[2:].strip() if text.startswith("- ") else text


def parse_structured(text: str) -> StructuredProblem:
    """Parse the five-block response; raises ParseError on any deviation."""
    lines = text.replace("\r\n", "\n").split("\n")
    found: dict[str, list[tuple[int, str]]] = {}
    current: str | None = None
    for number, line in enumerate(lines, start=1):
        m = _HEADER.match(line) if current != "REWRITTEN" else None
        if m and m.group(1) in BLOCKS:
            name = m.group(1)
            if name in found:
                raise ParseError(f"block {name}: appears twice", line=number)
            expected = BLOCKS[len(found)]
            if name != expected:
                raise ParseError(f"expected block {expected}: but found {name}:", line=number)
            found[name] = []
            current = name
            if m.group(2):
                found[name].append((number, m.group(2)))
            continue
        if current is None:
            if line.strip():
                raise ParseError("text before the OBJECTIVES: block", line=number)
            continue
        found[current].append((number, line))
    missing = [b for b in BLOCKS if b not in found]
    if missing:
        raise ParseError(f"missing block {missing[0]}:")

    def items(block: str) -> list[tuple[int, str]]:
        return [(n, line) for n, line in found[block] if line.strip()]

    objectives = tuple(_item(line) for _, line in items("OBJECTIVES"))
    constraints = tuple(_item(line) for _, line in items("CONSTRAINTS"))
    params = tuple(_symbol(line, n, "parameter") for n, line in items("PARAMETERS"))
    variables = tuple(_symbol(line, n, "variable") for n, line in items("VARIABLES"))
    rewritten = "\n".join(line.rstrip() for _, line in found["REWRITTEN"]).strip("\n")
    problem = StructuredProblem(objectives, constraints, params, variables, rewritten)
    check_structured(problem)
    return problem


def check_structured(problem: StructuredProblem) -> None:
    """Unique symbol names, and every markup token resolves to its kind."""
    seen: set[str] = set()
    for meta in (*problem.parameters, *problem.variables):
        if meta.name in seen:
            raise ParseError(f"symbol {meta.name} is declared twice")
        seen.add(meta.name)
    if not problem.rewritten_description.strip():
        raise ParseError("REWRITTEN: block is empty")
    for tag, name in problem.markup_names():
        meta = problem.symbol(name)
        want = "parameter" if tag == "param" else "variable"
        if meta is None:
            raise ParseError(f"\\{tag}{{{name}}} does not match any declared symbol")
        if meta.kind != want:
            raise ParseError(f"\\{tag}{{{name}}} refers to a {meta.kind}, not a {want}")


def render_structured(problem: StructuredProblem) -> str:
    """Canonical text; ``parse_structured(render_structured(p)) == p``."""
    out = ["OBJECTIVES:"]
    out += [f"- {o}" for o in problem.objectives]
    out.append("PARAMETERS:")
    out += [f"{m.name} | {m.dimension} | {m.description}" for m in problem.parameters]
    out.append("VARIABLES:")
    out += [f"{m.name} | {m.dimension} | {m.description}" for m in problem.variables]
    out.append("CONSTRAINTS:")
    out += [f"- {c}" for c in problem.constraints]
    out.append("REWRITTEN:")
    out.append(problem.rewritten_description)
    return "\n".join(out) + "\n"


def normalize_structured(text: str) -> str:
    return render_structured(parse_structured(text))
