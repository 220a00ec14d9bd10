import numpy as np
import pytest

from gxcalc.catalog import CATALOG_NAMES, build_entry, catalog_dir, catalog_load
from gxcalc.catfile import (
    CatParseError,
    emit_category_file,
    parse_category_file,
    split_tokens,
    token_to_value,
    value_to_token,
)


@pytest.mark.parametrize(
    "value",
    [
        1.0,
        -1.0,
        0.5,
        1 / np.sqrt(2),
        np.sqrt(2) / 4,
        np.exp(-1j * np.pi / 8),
        np.exp(3j * np.pi / 8) / np.sqrt(3),
        -1j,
        np.exp(2j * np.pi / 3),
        0.0,
    ],
)
def test_token_roundtrip_exact_lattice(value):
    tok = value_to_token(value)
    back = token_to_value(tok)
    assert abs(back - value) < 1e-15
    assert value_to_token(back) == tok  # canonical form is stable


def test_token_decimal_fallback():
    v = 0.123456789 + 0.987654321j
    tok = value_to_token(v)
    assert "i" in tok
    assert abs(token_to_value(tok) - v) < 1e-12


def test_split_tokens_with_exp():
    toks = split_tokens("exp(ipi 2/3)*1/sqrt(3) 1/2 sqrt(2)*1/4")
    assert toks == ["exp(ipi 2/3)*1/sqrt(3)", "1/2", "sqrt(2)*1/4"]


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_roundtrip_catalog_entry(name):
    cat = build_entry(name)
    text = emit_category_file(cat)
    back = parse_category_file(text)
    assert back.name == cat.name
    assert back.ring.labels == cat.ring.labels
    assert back.ring.N == cat.ring.N
    assert back.ring.grading == cat.ring.grading
    assert back.ring.dual == cat.ring.dual
    assert back.ring.action == cat.ring.action
    assert back.positive_braid == cat.positive_braid
    assert back.partial == cat.partial
    assert set(back.F) == set(cat.F)
    for key in cat.F:
        assert abs(back.F[key] - cat.F[key]) < 1e-15
    for key in cat.R:
        assert abs(back.R[key] - cat.R[key]) < 1e-15
    for key in cat.twists:
        assert abs(back.twists[key] - cat.twists[key]) < 1e-15
    if cat.smatrix is not None:
        assert np.max(np.abs(back.smatrix - cat.smatrix)) < 1e-15
    # emission is canonical: parse-emit is a fixed point
    assert emit_category_file(back) == text


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_shipped_files_match_builders(name):
    shipped = (catalog_dir() / f"{name}.cat").read_text()
    assert shipped == emit_category_file(build_entry(name))


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_catalog_load_equals_builder(name):
    loaded = catalog_load(name)
    built = build_entry(name)
    assert loaded.ring.N == built.ring.N
    for key in built.F:
        assert abs(loaded.F[key] - built.F[key]) < 1e-15


def test_parse_error_reports_line():
    bad = "[category]\nname = x\n[objects\n"
    with pytest.raises(CatParseError) as err:
        parse_category_file(bad)
    assert err.value.line == 3
    with pytest.raises(CatParseError) as err:
        parse_category_file("[fusion]\na b c d\n")
    assert err.value.line == 2
