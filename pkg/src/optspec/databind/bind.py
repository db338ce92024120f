"""Turning tables plus a manifest into parameter values and set members."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from ..ampl.data import DataSection, ParamValue
from ..llm.structured import SymbolMeta
from .manifest import BindingManifest, ParamSource
from .tables import TableSet, parse_decimal


class BindError(Exception):
    """``kind``: unknown-parameter, arity-mismatch, missing-member-value,
    duplicate-key, non-numeric-value, unknown-member, unknown-table or
    unknown-column."""

    def __init__(self, kind: str, message: str, *, symbol: str | None = None) -> None:
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.symbol = symbol

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass
class BoundData:
    """Solver-ready values. 1-D params map member -> value, 2-D params map
    (row, col) -> value, in member order."""

    sets: dict[str, list[str]] = field(default_factory=dict)
    params: dict[str, ParamValue] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)
    # index sets per parameter, when the manifest names or implies them
    index: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def as_data_section(self) -> DataSection:
        return DataSection(
            {k: list(v) for k, v in self.sets.items()},
            {k: dict(v) if isinstance(v, dict) else v for k, v in self.params.items()},
        )

    @classmethod
    def from_data_section(cls, data: DataSection) -> "BoundData":
        return cls(
            {k: list(v) for k, v in data.set_values.items()},
            {k: dict(v) if isinstance(v, dict) else v for k, v in data.param_values.items()},
        )

    def same_values(self, other: "BoundData") -> bool:
        """Equal sets (with order) and parameter values, ignoring provenance."""
        return self.sets == other.sets and self.params == other.params


def _table(tables: TableSet, name: str, symbol: str):
    if name not in tables:
        raise BindError("unknown-table", f"{symbol} refers to table {name}, which was not loaded", symbol=symbol)
    return tables[name]


def _column(table, column: str, symbol: str) -> int:
    if column not in table.columns:
        raise BindError(
            "unknown-column",
            f"{symbol} refers to column {column}, but {table.name} has {', '.join(table.columns)}",
            symbol=symbol,
        )
    return table.columns.index(column)


def _unique(values) -> list[str]:
    return list(dict.fromkeys(values))


def _collect(name: str, src: ParamSource, tables: TableSet) -> tuple[dict[tuple[str, ...], float], str]:
    """Raw (key tuple) -> value map plus a provenance note."""
    if src.is_inline:
        value = src.inline
        if not isinstance(value, dict):
            return {(): value}, "inline value"
        raw: dict[tuple[str, ...], float] = {}
        for k, v in value.items():
            if isinstance(v, dict):
                for k2, v2 in v.items():
                    raw[(k, k2)] = v2
            else:
                raw[(k,)] = v
        return raw, "inline table"
    table = _table(tables, src.table, name)
    key_idx = [_column(table, k, name) for k in src.keys]
    val_idx = _column(table, src.value, name)
    raw = {}
    for number, row in enumerate(table.rows, start=2):
        key = tuple(row[i] for i in key_idx)
        cell = row[val_idx]
        value = parse_decimal(cell)
        if value is None:
            raise BindError(
                "non-numeric-value",
                f"{table.name} row {number} column {src.value} holds {cell!r}, which is not a number"
                f" (needed for {name})",
                symbol=name,
            )
        if key in raw:
            label = ",".join(key) if key else "(scalar)"
            raise BindError("duplicate-key", f"{name}[{label}] is given twice in {table.name}", symbol=name)
        raw[key] = value
    if not key_idx and len(raw) != 1:
        raise BindError(
            "duplicate-key", f"scalar {name} needs exactly one row in {table.name}, found {len(raw)}",
            symbol=name,
        )
    keys = f" keyed by {', '.join(src.keys)}" if src.keys else ""
    return raw, f"{table.path} column {src.value}{keys}"


def _raw_arity(src: ParamSource, raw: dict) -> int:
    if not src.is_inline:
        return len(src.keys)
    if not isinstance(src.inline, dict):
        return 0
    if src.index is not None and not raw:
        return len(src.index)
    return len(next(iter(raw))) if raw else 1


def _infer_index(name: str, src: ParamSource, manifest: BindingManifest) -> tuple[str, ...] | None:
    """Match key columns to sets sourced from the same column name."""
    if src.is_inline:
        return None
    found = []
    for key in src.keys:
        match = [s for s, ss in manifest.sets.items() if ss.column == key]
        if len(match) != 1:
            return None
        found.append(match[0])
    return tuple(found)


def _check_arity(name: str, arity: int, declared: dict[str, SymbolMeta] | None) -> None:
    if declared is not None and declared[name].arity != arity:
        raise BindError(
            "arity-mismatch",
            f"{name} is {declared[name].dimension} but the manifest binds it with {arity} key(s)",
            symbol=name,
        )


def bind(
    manifest: BindingManifest,
    meta: Sequence[SymbolMeta] | None,
    tables: TableSet,
) -> BoundData:
    """Resolve every set and parameter named in the manifest.

    With ``meta`` given, each manifest parameter must be a declared
    parameter of the same dimension. Gaps are errors unless the manifest
    supplies a ``default``; symbolic cells never coerce to numbers.
    """
    declared = None
    if meta is not None:
        declared = {m.name: m for m in meta if m.kind == "parameter"}

    out = BoundData()
    for name, src in manifest.sets.items():
        if src.members is not None:
            members = list(src.members)
            out.provenance[name] = "inline members"
        else:
            table = _table(tables, src.table, name)
            col = _column(table, src.column, name)
            members = _unique(row[col] for row in table.rows)
            out.provenance[name] = f"{table.path} column {src.column}"
        if len(set(members)) != len(members):
            raise BindError("duplicate-key", f"set {name} lists a member twice", symbol=name)
        out.sets[name] = members

    for name, src in manifest.params.items():
        if declared is not None and name not in declared:
            raise BindError(
                "unknown-parameter", f"manifest binds {name}, which is not a declared parameter", symbol=name
            )
        if not src.is_inline:
            _check_arity(name, len(src.keys), declared)
        raw, note = _collect(name, src, tables)
        arity = _raw_arity(src, raw)
        _check_arity(name, arity, declared)
        index = src.index if src.index is not None else _infer_index(name, src, manifest)
        if index is not None and len(index) != arity:
            raise BindError(
                "arity-mismatch", f"{name} has {arity} key(s) but its index lists {len(index)} set(s)", symbol=name
            )
        out.params[name] = _assemble(name, raw, arity, index, src.default, out.sets)
        if index:
            out.index[name] = tuple(index)
        out.provenance[name] = note
    return out


def _assemble(name, raw, arity, index, default, sets) -> ParamValue:
    if arity == 0:
        return raw[()]
    if index is not None:
        for s in index:
            if s not in sets:
                raise BindError("unknown-member", f"{name} is indexed over {s}, which has no binding", symbol=name)
        pools = [sets[s] for s in index]
        allowed = [set(p) for p in pools]
        for key in raw:
            for part, ok, s in zip(key, allowed, index):
                if part not in ok:
                    raise BindError(
                        "unknown-member", f"{name}[{','.join(key)}] uses {part}, which is not in set {s}",
                        symbol=name,
                    )
    else:
        # order by first appearance in the source
        pools = [_unique(k[i] for k in raw) for i in range(arity)]
    values = {}
    for combo in itertools.product(*pools):
        if combo in raw:
            value = raw[combo]
        elif default is not None:
            value = default
        else:
            raise BindError(
                "missing-member-value", f"no value for {name}[{','.join(combo)}] and no default",
                symbol=name,
            )
        values[combo[0] if arity == 1 else combo] = value
    return values
