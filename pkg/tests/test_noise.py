import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bayesclean.noise import (
    DELETION,
    REPLACEMENT,
    SPELLING,
    Corruption,
    GroundTruth,
    NoiseSpec,
    inject,
    misspell,
    replay,
)
from bayesclean.relation import Relation
from bayesclean.synthetic import generate_cars
from oracles import lev


def test_spec_validation():
    for bad in ({"tau": -0.1}, {"tau": 1.5}, {"mix": (0.5, 0.5, 0.5)}, {"mix": (1, 0)}, {"spelling_range": (0, 4)}, {"spelling_range": (2, 5)}):
        with pytest.raises(ValueError):
            NoiseSpec(**bad)


def test_tau_zero_is_identity():
    r = generate_cars(200, seed=1)
    dirty, gt = inject(r, NoiseSpec(0.0))
    assert dirty == r and len(gt) == 0


def test_tau_one_deletion_only():
    r = generate_cars(50, seed=1)
    dirty, gt = inject(r, NoiseSpec(1.0, (0, 0, 1)))
    assert all(v is None for row in dirty.rows for v in row)
    assert len(gt) == r.n * r.m


def test_corrupted_count_is_binomial():
    r = generate_cars(10000, seed=0)
    _, gt = inject(r, NoiseSpec(0.01, seed=0))
    cells = r.n * r.m
    assert abs(len(gt) - cells * 0.01) <= 3 * math.sqrt(cells * 0.01 * 0.99)


def test_reproducible_and_seed_sensitive():
    r = generate_cars(500, seed=2)
    a = inject(r, NoiseSpec(0.05, seed=9))
    b = inject(r, NoiseSpec(0.05, seed=9))
    c = inject(r, NoiseSpec(0.05, seed=10))
    assert a[0] == b[0] and a[1] == b[1]
    assert a[0] != c[0]


def test_honesty_and_error_contracts():
    r = generate_cars(2000, seed=3)
    dirty, gt = inject(r, NoiseSpec(0.05, seed=3))
    cells = gt.cells()
    assert len(cells) == len(gt)
    domains = [set(r.column(j)) for j in range(r.m)]
    for e in gt:
        assert e.clean != e.dirty
        assert r[e.row][e.attr] == e.clean and dirty[e.row][e.attr] == e.dirty
        if e.error_type == SPELLING:
            assert 1 <= lev(e.clean, e.dirty) <= 4
            assert e.dirty not in domains[e.attr]
        elif e.error_type == REPLACEMENT:
            assert e.dirty in domains[e.attr]
        else:
            assert e.error_type == DELETION and e.dirty is None
    for i, (x, y) in enumerate(zip(r.rows, dirty.rows)):
        for j in range(r.m):
            assert (x[j] != y[j]) == ((i, j) in cells)


def test_replacement_falls_back_on_single_value_domain(caplog):
    r = Relation.from_rows(["a"], [("only",)] * 40)
    with caplog.at_level("INFO"):
        dirty, gt = inject(r, NoiseSpec(1.0, (0, 1, 0), seed=1))
    assert len(gt) == 40
    assert all(e.error_type == SPELLING for e in gt)
    assert "fell back" in caplog.text


@settings(max_examples=60, deadline=None)
@given(st.text("abcxyz", max_size=8), st.integers(1, 4), st.integers(0, 10**6))
def test_misspell_distance(value, d, seed):
    import random

    out = misspell(random.Random(seed), value, d, list("abcxyz"), {value})
    assert lev(value, out) == d and out


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.tuples(st.sampled_from(["a", "bb", None]), st.sampled_from(["x", "yz"])), min_size=1, max_size=30),
    st.floats(0, 1),
    st.integers(0, 1000),
)
def test_inject_replay_round_trip(rows, tau, seed):
    r = Relation.from_rows(["p", "q"], rows)
    dirty, gt = inject(r, NoiseSpec(tau, seed=seed))
    assert replay(gt, dirty) == r
    for e in gt:
        if e.error_type == SPELLING:
            assert 1 <= lev(e.clean, e.dirty) <= 4


def test_replay_edge_cases():
    r = Relation.from_rows(["a", "b"], [("x", "y"), ("u", "v")])
    assert replay(GroundTruth(), r) == r
    one = GroundTruth([Corruption(1, 0, "clean", "u", REPLACEMENT)])
    back = replay(one, r)
    assert back.rows == (("x", "y"), ("clean", "v"))
    with pytest.raises(ValueError):
        replay(GroundTruth([Corruption(5, 0, "a", "b", SPELLING)]), r)
    with pytest.raises(ValueError):
        replay(GroundTruth([Corruption(0, 0, "a", "zzz", SPELLING)]), r)


def test_ground_truth_json(tmp_path):
    r = generate_cars(300, seed=4)
    _, gt = inject(r, NoiseSpec(0.05, seed=4))
    p = tmp_path / "gt.json"
    gt.save(p)
    assert GroundTruth.load(p) == gt
    doc = json.loads(p.read_text())
    doc["entries"][0]["dirty"] = doc["entries"][0]["clean"]
    with pytest.raises(ValueError):
        GroundTruth.from_json(doc)
