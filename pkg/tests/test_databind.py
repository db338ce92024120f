from __future__ import annotations

import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES
from optspec.ampl import parse_data
from optspec.databind import (
    BindError,
    BoundData,
    IngestError,
    ManifestError,
    bind,
    emit_ampl_data,
    emit_generic_data,
    load_manifest,
    load_tables,
    parse_manifest,
    read_generic_data,
)
from optspec.llm.structured import SymbolMeta

BUNDLE = FIXTURES / "bundles" / "production"
SHOP_DAT = FIXTURES / "shop" / "production.dat"


def _meta(**dims):
    return [SymbolMeta(n, f"{n} value", d, "parameter") for n, d in dims.items()]


SHOP_META = _meta(
    price="one-dimensional", unit="two-dimensional", inventory="one-dimensional",
    hold="one-dimensional", buyCost="one-dimensional", budget="scalar",
) + [SymbolMeta("x", "production", "one-dimensional", "variable")]


def _shop_bound() -> BoundData:
    manifest = load_manifest(BUNDLE / "binding.manifest")
    return bind(manifest, SHOP_META, load_tables(manifest.table_paths()))


def _write(tmp_path: Path, name: str, text: str) -> Path:
    path = tmp_path / name
    path.write_text(text)
    return path


# -- tables ------------------------------------------------------------------------


def test_load_resource_table():
    tables = load_tables([BUNDLE / "tables" / "resources.csv"])
    assert len(tables) == 1
    t = tables["resources"]
    assert len(t.rows) == 3
    assert t.columns == ("resource", "inventory", "hold", "buyCost")
    assert t.is_numeric("hold") and not t.is_numeric("resource")
    assert t.column("resource") == ["R1", "R2", "R3"]


def test_ragged_row(tmp_path):
    path = _write(tmp_path, "t.csv", "a,b\n1,2\n3\n")
    with pytest.raises(IngestError) as info:
        load_tables([path])
    assert (info.value.kind, info.value.row) == ("ragged-row", 3)


def test_header_only(tmp_path):
    with pytest.raises(IngestError) as info:
        load_tables([_write(tmp_path, "t.csv", "a,b\n")])
    assert info.value.kind == "empty-table"


def test_missing_file(tmp_path):
    with pytest.raises(IngestError) as info:
        load_tables([tmp_path / "nope.csv"])
    assert info.value.kind == "missing-file"


# -- binding -------------------------------------------------------------------------


def test_shop_tables_bind_to_shop_data():
    bound = _shop_bound()
    assert bound.as_data_section() == parse_data(SHOP_DAT.read_text())
    assert bound.sets["RESOURCES"] == ["R1", "R2", "R3"]
    assert bound.provenance["unit"].endswith("unit.csv column unit keyed by resource, product")


def test_shop_emitted_data_parses_back():
    bound = _shop_bound()
    text = emit_ampl_data(bound)
    assert "param unit :" in text
    assert parse_data(text) == parse_data(SHOP_DAT.read_text())


def test_shop_generic_document():
    doc = json.loads(emit_generic_data(_shop_bound()))
    assert doc["PRODUCTS"] == ["A", "B"]
    assert doc["unit"]["R2"] == {"A": 1, "B": 2}
    assert doc["budget"] == 10 and isinstance(doc["budget"], int)


def test_two_key_param_with_one_key(tmp_path):
    manifest = parse_manifest(
        '[params.unit]\ntable = "unit.csv"\nkeys = ["resource"]\nvalue = "unit"\n', BUNDLE / "tables"
    )
    with pytest.raises(BindError) as info:
        bind(manifest, SHOP_META, load_tables(manifest.table_paths()))
    assert info.value.kind == "arity-mismatch"


def test_duplicate_triple(tmp_path):
    path = _write(tmp_path, "unit.csv", "resource,product,unit\nR1,A,1\nR1,A,2\n")
    manifest = parse_manifest('[params.unit]\ntable = "unit.csv"\nkeys = ["resource", "product"]\nvalue = "unit"\n', tmp_path)
    with pytest.raises(BindError) as info:
        bind(manifest, None, load_tables([path]))
    assert info.value.kind == "duplicate-key"


def test_unknown_parameter():
    manifest = parse_manifest("[params.mystery]\ninline = 3\n")
    with pytest.raises(BindError) as info:
        bind(manifest, SHOP_META, load_tables([]))
    assert info.value.kind == "unknown-parameter"


def test_variables_are_not_bindable():
    manifest = parse_manifest("[params.x]\ninline = {A = 1}\n")
    with pytest.raises(BindError) as info:
        bind(manifest, SHOP_META, load_tables([]))
    assert info.value.kind == "unknown-parameter"


def test_symbolic_cell_never_becomes_zero(tmp_path):
    path = _write(tmp_path, "p.csv", "k,v\nA,1\nB,n/a\n")
    manifest = parse_manifest('[params.p]\ntable = "p.csv"\nkeys = ["k"]\nvalue = "v"\n', tmp_path)
    with pytest.raises(BindError) as info:
        bind(manifest, None, load_tables([path]))
    assert info.value.kind == "non-numeric-value"


def test_exponent_is_not_decimal(tmp_path):
    path = _write(tmp_path, "p.csv", "v\n1e3\n")
    manifest = parse_manifest('[params.p]\ntable = "p.csv"\nvalue = "v"\n', tmp_path)
    with pytest.raises(BindError):
        bind(manifest, None, load_tables([path]))


def test_unknown_member(tmp_path):
    path = _write(tmp_path, "p.csv", "k,v\nA,1\nZ,2\n")
    manifest = parse_manifest(
        '[sets.S]\nmembers = ["A"]\n[params.p]\ntable = "p.csv"\nkeys = ["k"]\nvalue = "v"\nindex = ["S"]\n',
        tmp_path,
    )
    with pytest.raises(BindError) as info:
        bind(manifest, None, load_tables([path]))
    assert info.value.kind == "unknown-member"


def test_inline_tables_and_defaults():
    manifest = parse_manifest(
        '[sets.R]\nmembers = ["r1", "r2"]\n[sets.P]\nmembers = ["a", "b"]\n'
        '[params.u]\ninline = {r1 = {a = 1, b = 2}, r2 = {b = 4}}\nindex = ["R", "P"]\ndefault = 0\n'
        '[params.c]\ninline = {a = 1.5}\nindex = ["P"]\ndefault = -1\n'
    )
    bound = bind(manifest, None, load_tables([]))
    assert bound.params["u"] == {("r1", "a"): 1, ("r1", "b"): 2, ("r2", "a"): 0, ("r2", "b"): 4}
    assert bound.params["c"] == {"a": 1.5, "b": -1}


def test_index_inferred_from_set_columns():
    manifest = load_manifest(BUNDLE / "binding.manifest")
    text = (BUNDLE / "binding.manifest").read_text().replace('index = ["RESOURCES", "PRODUCTS"]\n', "")
    stripped = parse_manifest(text, manifest.base_dir)
    assert bind(stripped, None, load_tables(stripped.table_paths())).same_values(_shop_bound())


@pytest.mark.parametrize(
    "text",
    [
        "[sets.S]\n",
        '[sets.S]\nmembers = ["a"]\ntable = "t"\n',
        "[params.p]\n",
        '[params.p]\ninline = 1\ntable = "t.csv"\n',
        "[params.p]\ninline = 'x'\n",
        '[params.p]\ntable = "t.csv"\nvalue = "v"\nkeys = ["a", "b", "c"]\n',
        "[other]\n",
        '[params.p]\ninline = 1\ncolour = "red"\n',
        "not = [toml",
    ],
)
def test_manifest_errors(text):
    with pytest.raises(ManifestError):
        parse_manifest(text)


def test_punctured_tables_bind_iff_total(tmp_path):
    rng = random.Random(11)
    rows, cols = ["r1", "r2", "r3"], ["c1", "c2"]
    for trial in range(40):
        cells = [(r, c) for r in rows for c in cols if rng.random() > 0.2]
        body = "".join(f"{r},{c},{rng.randint(0, 9)}\n" for r, c in cells)
        path = _write(tmp_path, "u.csv", "row,col,val\n" + body)
        with_default = rng.random() < 0.5
        manifest = parse_manifest(
            '[sets.R]\nmembers = ["r1", "r2", "r3"]\n[sets.C]\nmembers = ["c1", "c2"]\n'
            '[params.u]\ntable = "u.csv"\nkeys = ["row", "col"]\nvalue = "val"\nindex = ["R", "C"]\n'
            + ("default = 0\n" if with_default else ""),
            tmp_path,
        )
        total = len(cells) == 6
        if not cells:
            continue  # header-only table: an ingest error, not a binding question
        tables = load_tables([path])
        if total or with_default:
            bound = bind(manifest, None, tables)
            assert len(bound.params["u"]) == 6
        else:
            with pytest.raises(BindError) as info:
                bind(manifest, None, tables)
            assert info.value.kind == "missing-member-value"


# -- emitters ---------------------------------------------------------------------------


def test_scalar_only_document():
    assert emit_ampl_data(BoundData(params={"b": 10.0})) == "param b := 10;\n"


def test_empty_set_document():
    text = emit_ampl_data(BoundData(sets={"S": []}))
    assert text == "set S := ;\n"
    assert parse_data(text).set_values == {"S": []}


def test_awkward_members_are_quoted():
    data = BoundData(sets={"S": ["two words", "set", "-1", "7"]}, params={"p": {"set": 1.0, "two words": -2.5}})
    text = emit_ampl_data(data)
    assert "'two words'" in text and "'set'" in text
    back = parse_data(text)
    assert back.set_values == data.sets and back.param_values == data.params


_MEMBER = st.sampled_from(["A", "B", "R1", "node_7", "12", "two words", "x-y", "param"])
_VALUE = st.one_of(st.integers(-10**6, 10**6).map(float), st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False))


@st.composite
def _bound_data(draw):
    names = iter(f"s{i}" for i in range(100))
    sets = {}
    for _ in range(draw(st.integers(0, 3))):
        sets[next(names)] = draw(st.lists(_MEMBER, unique=True, max_size=4))
    params = {}
    for _ in range(draw(st.integers(0, 4))):
        kind = draw(st.integers(0, 2))
        if kind == 0:
            params[next(names)] = draw(_VALUE)
        elif kind == 1:
            keys = draw(st.lists(_MEMBER, unique=True, max_size=4))
            params[next(names)] = {k: draw(_VALUE) for k in keys}
        else:
            rows = draw(st.lists(_MEMBER, unique=True, min_size=1, max_size=3))
            cols = draw(st.lists(_MEMBER, unique=True, min_size=1, max_size=3))
            params[next(names)] = {(r, c): draw(_VALUE) for r in rows for c in cols}
    return BoundData(sets, params)


@settings(max_examples=200, deadline=None)
@given(_bound_data())
def test_ampl_emit_parse_identity(data):
    back = parse_data(emit_ampl_data(data))
    assert back.set_values == data.sets
    assert back.param_values == data.params
    for name, value in data.params.items():
        if isinstance(value, dict):
            assert list(back.param_values[name]) == list(value)  # member order kept


@settings(max_examples=200, deadline=None)
@given(_bound_data())
def test_generic_round_trip(data):
    text = emit_generic_data(data)
    assert text == emit_generic_data(read_generic_data(text))
    back = read_generic_data(text)
    # an empty 2-D table reads back as an empty 1-D map; both are {}
    assert back.same_values(data)
