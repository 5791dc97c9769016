import pytest
from hypothesis import given
from hypothesis import strategies as st

from appforge.errors import EmptyName, IllegalCharacter
from appforge.registry import normalize_package_name


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("SpaCy", "spacy"),
        ("geo_pandas", "geo-pandas"),
        ("a..b", "a-b"),
        ("pandas", "pandas"),
        ("A_b.C--d", "a-b-c-d"),
        ("  numpy  ", "numpy"),
        ("x", "x"),
    ],
)
def test_normalization_examples(raw, expected):
    assert normalize_package_name(raw) == expected


def test_empty_name_rejected():
    with pytest.raises(EmptyName):
        normalize_package_name("")
    with pytest.raises(EmptyName):
        normalize_package_name("   ")


def test_separator_only_name_rejected():
    with pytest.raises(EmptyName):
        normalize_package_name("-._")


@pytest.mark.parametrize("raw", ["foo bar", "num py!", "café", "a/b", "a@2"])
def test_illegal_characters_rejected(raw):
    with pytest.raises(IllegalCharacter):
        normalize_package_name(raw)


_name_chars = st.sampled_from("abcdefXYZ0189._-")


@given(st.text(_name_chars, min_size=1, max_size=30))
def test_normalize_is_idempotent(raw):
    try:
        once = normalize_package_name(raw)
    except EmptyName:
        return
    assert normalize_package_name(once) == once


@given(st.text(_name_chars, min_size=1, max_size=30))
def test_normalized_shape(raw):
    try:
        name = normalize_package_name(raw)
    except EmptyName:
        return
    assert name == name.lower()
    assert not name.startswith("-") and not name.endswith("-")
    assert all(c.isdigit() or "a" <= c <= "z" or c == "-" for c in name)
    assert "--" not in name
