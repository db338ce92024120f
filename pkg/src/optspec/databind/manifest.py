"""Binding manifests: which table columns feed which sets and parameters.

A manifest is a TOML file next to the tables it names::

    [sets.PRODUCTS]
    table = "tables/products.csv"   # members = distinct values, first-seen order
    column = "product"

    [sets.RESOURCES]
    members = ["R1", "R2", "R3"]    # or list them inline

    [params.price]
    table = "tables/products.csv"
    keys = ["product"]              # 0, 1 or 2 key columns
    value = "price"
    index = ["PRODUCTS"]            # sets the keys range over (optional)
    default = 0                     # fills missing member combinations (optional)

    [params.budget]
    inline = 10                     # scalar, {A = 1}, or {R1 = {A = 1}}

Table paths are resolved relative to the manifest file.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

_SET_KEYS = {"table", "column", "members"}
_PARAM_KEYS = {"table", "keys", "value", "index", "default", "inline", "description"}


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class SetSource:
    table: str | None = None
    column: str | None = None
    members: tuple[str, ...] | None = None


@dataclass(frozen=True)
class ParamSource:
    table: str | None = None
    keys: tuple[str, ...] = ()
    value: str | None = None
    index: tuple[str, ...] | None = None
    default: float | None = None
    inline: object = None

    @property
    def is_inline(self) -> bool:
        return self.inline is not None


@dataclass(frozen=True)
class BindingManifest:
    sets: dict[str, SetSource] = field(default_factory=dict)
    params: dict[str, ParamSource] = field(default_factory=dict)
    base_dir: str = "."

    def table_paths(self) -> list[Path]:
        """Every referenced table, resolved, in first-mention order."""
        seen: list[Path] = []
        sources = [*self.sets.values(), *self.params.values()]
        for src in sources:
            if src.table is not None:
                path = Path(self.base_dir) / src.table
                if path not in seen:
                    seen.append(path)
        return seen


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ManifestError(f"{where} must be a number, not {value!r}")
    return float(value)


def _inline(value, where: str):
    if isinstance(value, dict):
        out = {}
        for k, v in value.items():
            out[str(k)] = _inline(v, f"{where}.{k}") if isinstance(v, dict) else _number(v, f"{where}.{k}")
            if isinstance(out[str(k)], dict) and any(isinstance(x, dict) for x in out[str(k)].values()):
                raise ManifestError(f"{where} nests deeper than two levels")
        return out
    return _number(value, where)


def parse_manifest(text: str, base_dir: str | Path = ".") -> BindingManifest:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ManifestError(f"manifest is not valid TOML: {exc}") from exc
    unknown = set(doc) - {"sets", "params"}
    if unknown:
        raise ManifestError(f"unknown manifest sections: {', '.join(sorted(unknown))}")
    sets = {}
    for name, entry in doc.get("sets", {}).items():
        extra = set(entry) - _SET_KEYS
        if extra:
            raise ManifestError(f"sets.{name}: unknown keys {', '.join(sorted(extra))}")
        if "members" in entry:
            if "table" in entry or "column" in entry:
                raise ManifestError(f"sets.{name}: give either members or table+column")
            sets[name] = SetSource(members=tuple(str(m) for m in entry["members"]))
        elif "table" in entry and "column" in entry:
            sets[name] = SetSource(table=entry["table"], column=entry["column"])
        else:
            raise ManifestError(f"sets.{name}: needs members, or table and column")
    params = {}
    for name, entry in doc.get("params", {}).items():
        extra = set(entry) - _PARAM_KEYS
        if extra:
            raise ManifestError(f"params.{name}: unknown keys {', '.join(sorted(extra))}")
        index = tuple(entry["index"]) if "index" in entry else None
        default = _number(entry["default"], f"params.{name}.default") if "default" in entry else None
        if "inline" in entry:
            if "table" in entry or "value" in entry or "keys" in entry:
                raise ManifestError(f"params.{name}: inline values cannot be combined with a table")
            params[name] = ParamSource(index=index, default=default,
                                       inline=_inline(entry["inline"], f"params.{name}.inline"))
        elif "table" in entry and "value" in entry:
            keys = tuple(entry.get("keys", ()))
            if len(keys) > 2:
                raise ManifestError(f"params.{name}: at most two key columns are supported")
            params[name] = ParamSource(entry["table"], keys, entry["value"], index, default)
        else:
            raise ManifestError(f"params.{name}: needs inline, or table and value")
    return BindingManifest(sets, params, str(base_dir))


def load_manifest(path: str | Path) -> BindingManifest:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    return parse_manifest(text, path.parent)
