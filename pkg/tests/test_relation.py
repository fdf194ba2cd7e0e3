from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bayesclean.relation import (
    CSVParseError,
    Relation,
    RelationError,
    Schema,
    build_domain_index,
    load_csv,
    write_csv,
)
from bayesclean.synthetic import example_relation


def write(tmp_path, text, name="r.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_schema_validation():
    with pytest.raises(RelationError):
        Schema(())
    with pytest.raises(RelationError):
        Schema(("a", "a"))
    with pytest.raises(RelationError):
        Schema(("a", ""))


def test_relation_validates_arity_and_cells():
    with pytest.raises(RelationError):
        Relation.from_rows(["a", "b"], [("x",)])
    with pytest.raises(RelationError):
        Relation.from_rows(["a"], [(3,)])


def test_load_simple(tmp_path):
    r = load_csv(write(tmp_path, "model,make\nAccord,Honda\n"))
    assert (r.n, r.m) == (1, 2)
    assert r[0] == ("Accord", "Honda")


def test_null_token(tmp_path):
    r = load_csv(write(tmp_path, "model,make\nAccord,\n"))
    assert r[0] == ("Accord", None)
    r = load_csv(write(tmp_path, "model,make\nAccord,NA\n"), null_token="NA")
    assert r[0] == ("Accord", None)


def test_values_verbatim(tmp_path):
    r = load_csv(write(tmp_path, "a\n  Honda \nHONDA\n"))
    assert r.column(0) == ["  Honda ", "HONDA"]


def test_ragged_row_reports_line(tmp_path):
    with pytest.raises(CSVParseError) as exc:
        load_csv(write(tmp_path, "a,b\n1,2\n3\n"))
    assert exc.value.row_number == 3


def test_empty_and_duplicate_header(tmp_path):
    with pytest.raises(CSVParseError):
        load_csv(write(tmp_path, ""))
    with pytest.raises(CSVParseError):
        load_csv(write(tmp_path, "a,a\n1,2\n"))
    with pytest.raises(RelationError):
        load_csv(tmp_path / "missing.csv")


def test_write_null_and_quoting(tmp_path):
    r = Relation.from_rows(["model", "note"], [("Accord", None), ("Civic", "a,b")])
    p = tmp_path / "o.csv"
    write_csv(r, p)
    assert p.read_bytes() == b'model,note\r\nAccord,\r\nCivic,"a,b"\r\n'
    assert load_csv(p) == r


def test_write_refuses_value_equal_to_null_token(tmp_path):
    r = Relation.from_rows(["a"], [("NA",)])
    with pytest.raises(RelationError):
        write_csv(r, tmp_path / "o.csv", null_token="NA")


cells = st.one_of(
    st.none(),
    st.text(alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00"), min_size=1, max_size=6),
)


def test_nul_is_rejected(tmp_path):
    with pytest.raises(RelationError):
        write_csv(Relation.from_rows(["a"], [("x\x00y",)]), tmp_path / "o.csv")


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda m: st.lists(st.tuples(*[cells] * m), max_size=8).map(lambda rows: (m, rows))))
def test_csv_round_trip(tmp_path_factory, m_rows):
    m, rows = m_rows
    r = Relation.from_rows([f"c{j}" for j in range(m)], rows)
    p = tmp_path_factory.mktemp("rt") / "r.csv"
    write_csv(r, p)
    assert load_csv(p) == r


def test_example_counts():
    r = example_relation()
    idx = build_domain_index(r)
    assert r.n == idx.n == 470
    assert idx.count(0, "Accord") == 250
    assert idx.count(1, "Honda") == 365
    assert idx.pair_count(0, "Accord", 4, "V6") == 100
    assert idx.pair_count(4, "V6", 0, "Accord") == 100


def test_single_tuple_pairs():
    idx = build_domain_index(Relation.from_rows(["a", "b", "c"], [("x", "y", "z")]))
    for a, u in enumerate("xyz"):
        for b, v in enumerate("xyz"):
            if a != b:
                assert idx.pair_count(a, u, b, v) == 1


def test_empty_relation_not_indexable():
    with pytest.raises(RelationError):
        build_domain_index(Relation.from_rows(["a"], []))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("ab"), st.sampled_from(["x", "y", None]), st.sampled_from("pq")), min_size=1, max_size=30))
def test_index_counts_match_scan(rows):
    r = Relation.from_rows(["a", "b", "c"], rows)
    idx = build_domain_index(r)
    for j in range(3):
        col = Counter(r.column(j))
        assert sum(idx.attribute_counts(j).values()) == r.n
        assert idx.attribute_counts(j) == dict(col)
        assert idx.domain_size(j) == len(col)
    for a in range(3):
        for b in range(3):
            if a == b:
                continue
            for u in set(r.column(a)):
                for v in set(r.column(b)):
                    want = sum(1 for t in rows if t[a] == u and t[b] == v)
                    assert idx.pair_count(a, u, b, v) == want <= min(idx.count(a, u), idx.count(b, v))
    assert build_domain_index(r) == idx
