"""Tabular data in, solver-ready data documents out."""
from .bind import BindError, BoundData, bind
from .emit import emit_ampl_data, emit_generic_data, read_generic_data
from .manifest import BindingManifest, ManifestError, ParamSource, SetSource, load_manifest, parse_manifest
from .tables import IngestError, Table, TableSet, load_tables, read_table

__all__ = [
    "BindError",
    "BindingManifest",
    "BoundData",
    "IngestError",
    "ManifestError",
    "ParamSource",
    "SetSource",
    "Table",
    "TableSet",
    "bind",
    "emit_ampl_data",
    "emit_generic_data",
    "load_manifest",
    "load_tables",
    "parse_manifest",
    "read_generic_data",
    "read_table",
]
