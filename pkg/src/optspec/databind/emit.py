"""Writers for bound data: the model-language data document and JSON."""
from __future__ import annotations

import json
import re

from ..ampl.lexer import KEYWORDS
from ..ampl.render import format_number
from .bind import BoundData

_BARE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\d+(?:\.\d*)?")


def _member(text: str) -> str:
    if _BARE.fullmatch(text) and text not in KEYWORDS:
        return text
    for quote in ("'", '"'):
        if quote not in text and "\n" not in text:
            return f"{quote}{text}{quote}"
    raise ValueError(f"member {text!r} cannot be written to a data document")


def emit_ampl_data(data: BoundData) -> str:
    """Sets first, then params; 2-D params use the header-table layout."""
    lines: list[str] = []
    for name, members in data.sets.items():
        body = " ".join(_member(m) for m in members)
        lines.append(f"set {name} := {body};" if body else f"set {name} := ;")
    for name, value in data.params.items():
        if not isinstance(value, dict):
            lines.append(f"param {name} := {format_number(value)};")
        elif not value:
            lines.append(f"param {name} := ;")
        elif isinstance(next(iter(value)), tuple):
            rows = list(dict.fromkeys(r for r, _ in value))
            cols = list(dict.fromkeys(c for _, c in value))
            cells = {
                r: [format_number(value[(r, c)]) for c in cols] for r in rows
            }
            row_labels = [_member(r) for r in rows]
            width = max(len(t) for t in row_labels)
            col_width = max(len(t) for t in [*map(_member, cols), *(x for v in cells.values() for x in v)])
            lines.append(f"param {name} :")
            header = " ".join(_member(c).rjust(col_width) for c in cols)
            lines.append(f"  {' ' * width} {header} :=")
            for r, label in zip(rows, row_labels):
                lines.append(f"  {label.ljust(width)} {' '.join(x.rjust(col_width) for x in cells[r])}")
            lines[-1] += ";"
        else:
            lines.append(f"param {name} :=")
            for k, v in value.items():
                lines.append(f"  {_member(k)} {format_number(v)}")
            lines[-1] += ";"
    return "\n".join(lines) + "\n"


def _plain(v: float) -> int | float:
    return int(v) if float(v).is_integer() and abs(v) < 2**53 else v


def emit_generic_data(data: BoundData) -> str:
    """JSON keyed by symbol name: sets as lists, 2-D params as row -> col -> value."""
    doc: dict[str, object] = {}
    for name, members in data.sets.items():
        doc[name] = list(members)
    for name, value in data.params.items():
        if not isinstance(value, dict):
            doc[name] = _plain(value)
        elif value and isinstance(next(iter(value)), tuple):
            nested: dict[str, dict[str, object]] = {}
            for (r, c), v in value.items():
                nested.setdefault(r, {})[c] = _plain(v)
            doc[name] = nested
        else:
            doc[name] = {k: _plain(v) for k, v in value.items()}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def read_generic_data(text: str) -> BoundData:
    """Inverse of :func:`emit_generic_data`."""
    doc = json.loads(text)
    out = BoundData()
    for name, value in doc.items():
        if isinstance(value, list):
            out.sets[name] = [str(m) for m in value]
        elif isinstance(value, dict):
            if value and all(isinstance(v, dict) for v in value.values()):
                out.params[name] = {(r, c): float(v) for r, row in value.items() for c, v in row.items()}
            else:
                out.params[name] = {k: float(v) for k, v in value.items()}
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            out.params[name] = float(value)
        else:
            raise ValueError(f"unsupported value for {name}: {value!r}")
    return out
