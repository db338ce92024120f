"""CSV ingestion for the data-binding step."""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

# plain decimal notation, no exponents, no locale separators
DECIMAL = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)")


def parse_decimal(text: str) -> float | None:
    text = text.strip()
    return float(text) if DECIMAL.fullmatch(text) else None


class IngestError(Exception):
    """``kind`` is ``missing-file``, ``ragged-row`` or ``empty-table``."""

    def __init__(self, kind: str, message: str, *, path: str | None = None, row: int | None = None) -> None:
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.path = path
        self.row = row

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class Table:
    name: str
    path: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def column(self, name: str) -> list[str]:
        return [row[self.columns.index(name)] for row in self.rows]

    def is_numeric(self, name: str) -> bool:
        return all(parse_decimal(cell) is not None for cell in self.column(name))

    def records(self) -> list[dict[str, str]]:
        return [dict(zip(self.columns, row)) for row in self.rows]


@dataclass(frozen=True)
class TableSet:
    tables: dict[str, Table]

    def __getitem__(self, name: str) -> Table:
        return self.tables[_table_key(name)]

    def __contains__(self, name: str) -> bool:
        return _table_key(name) in self.tables

    def __len__(self) -> int:
        return len(self.tables)


def _table_key(name: str) -> str:
    # tables are addressed by file stem: "tables/products.csv" -> "products"
    return Path(name).stem


def read_table(path: str | Path) -> Table:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except FileNotFoundError:
        raise IngestError("missing-file", f"table file {path} does not exist", path=str(path)) from None
    rows = [r for r in csv.reader(text.splitlines()) if any(cell.strip() for cell in r)]
    if not rows:
        raise IngestError("empty-table", f"{path} has no header row", path=str(path))
    header = tuple(cell.strip() for cell in rows[0])
    if len(set(header)) != len(header) or not all(header):
        raise IngestError("ragged-row", f"{path} has an empty or repeated column name", path=str(path), row=1)
    body = []
    for number, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise IngestError(
                "ragged-row",
                f"{path} row {number} has {len(row)} cells but the header has {len(header)}",
                path=str(path), row=number,
            )
        body.append(tuple(cell.strip() for cell in row))
    if not body:
        raise IngestError("empty-table", f"{path} has a header but no data rows", path=str(path))
    return Table(_table_key(path.name), str(path), header, tuple(body))


def load_tables(paths: Iterable[str | Path]) -> TableSet:
    """Read CSV files (UTF-8, comma-delimited, header first) keyed by file stem."""
    tables: dict[str, Table] = {}
    for p in paths:
        table = read_table(p)
        if table.name in tables:
            raise ValueError(f"two tables share the name {table.name}")
        tables[table.name] = table
    return TableSet(tables)
