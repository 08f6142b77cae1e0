import itertools
import math

import pytest

from aggclone.basis import chi, join_fn, majority_joinmeet, majority_meetjoin, meet_fn, oplus
from aggclone.clone import closure, contains
from aggclone.errors import DimensionMismatch
from aggclone.fntable import is_aggregation
from aggclone.hypercube import (
    Vertex,
    distance_sum,
    f_v,
    hamming,
    median_by_rounding,
    median_is_optimal,
    median_rule,
    median_table,
    oplus_from_fv,
    vertices,
)
from aggclone.lattice import boolean
from aggclone.terms import evaluate, parse_term

V = Vertex.parse


def median_by_ceiling(x, y, z):
    """The displayed formula taken literally: ceil of the coordinate mean."""
    return Vertex.from_coords(tuple(math.ceil((a + b + c) / 3) for a, b, c in zip(x.coords(), y.coords(), z.coords())))


def test_vertex_text():
    assert str(V("110")) == "110"
    assert V("110").coords() == (1, 1, 0)
    assert V("110").bits == 3
    with pytest.raises(ValueError):
        V("12")
    with pytest.raises(DimensionMismatch):
        Vertex(8, 3)


def test_median_examples():
    assert median_rule(V("110"), V("100"), V("010")) == V("110")
    for x, z in itertools.product(vertices(3), repeat=2):
        assert median_rule(x, x, z) == x
    with pytest.raises(DimensionMismatch):
        median_rule(V("11"), V("10"), V("100"))


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_median_equals_majority_terms(r):
    lat = boolean(r)
    t3a = parse_term(r"(x1 /\ x2) \/ (x2 /\ x3) \/ (x1 /\ x3)", lat)
    mj, jm = majority_meetjoin(lat), majority_joinmeet(lat)
    for x, y, z in itertools.product(vertices(r), repeat=3):
        w = median_rule(x, y, z).bits
        assert w == evaluate(t3a, lat, (x.bits, y.bits, z.bits))
        assert w == mj(x.bits, y.bits, z.bits) == jm(x.bits, y.bits, z.bits)
        assert median_by_rounding(x, y, z).bits == w
    assert median_table(r) == mj
    assert is_aggregation(median_table(r))


def test_literal_ceiling_disagrees_with_majority():
    x, y, z = V("100"), V("000"), V("000")
    assert median_rule(x, y, z) == V("000")
    assert median_by_ceiling(x, y, z) == V("100")
    # it only coincides where no coordinate has exactly one 1
    for x, y, z in itertools.product(vertices(2), repeat=3):
        single = any(a + b + c == 1 for a, b, c in zip(x.coords(), y.coords(), z.coords()))
        assert (median_by_ceiling(x, y, z) == median_rule(x, y, z)) != single


def test_distances():
    assert hamming(V("110"), V("100")) == 1
    x, y, z = V("00"), V("01"), V("10")
    assert median_rule(x, y, z) == V("00")
    assert distance_sum(V("00"), x, y, z) == 2
    sums = sorted(distance_sum(w, x, y, z) for w in vertices(2))
    assert sums[0] == 2 and sums[1] > 2


@pytest.mark.parametrize("r", [1, 2, 3])
def test_median_optimal(r):
    for x, y, z in itertools.product(vertices(r), repeat=3):
        assert median_is_optimal(x, y, z)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_fv(r):
    lat = boolean(r)
    assert f_v(Vertex(0, r)) == meet_fn(lat)
    assert f_v(Vertex((1 << r) - 1, r)) == join_fn(lat)
    for v in vertices(r):
        table = f_v(v)
        assert is_aggregation(table)
        for x in range(lat.size):
            assert table(x, x) == x
        for x, y in itertools.product(vertices(r), repeat=2):
            assert table(x.bits, y.bits) == median_rule(v, x, y).bits
    with pytest.raises(DimensionMismatch):
        f_v(V("10"), boolean(3))


@pytest.mark.parametrize("r", [1, 2, 3])
def test_oplus_from_fv(r):
    for v in vertices(r):
        _, ok = oplus_from_fv(v)
        assert ok
    _, ok = oplus_from_fv(V("10"))
    assert ok


def test_median_monotone_in_each_argument():
    for r in (1, 2, 3):
        lat = boolean(r)
        table = median_table(r)
        for xs in itertools.product(range(lat.size), repeat=3):
            for pos in range(3):
                for up in range(lat.size):
                    if lat.leq[xs[pos], up]:
                        ys = list(xs)
                        ys[pos] = up
                        assert lat.leq[table(*xs), table(*ys)]


def test_fv_basis_closure_contains_every_oplus():
    lat = boolean(2)
    vs = vertices(2)
    basis = [meet_fn(lat), join_fn(lat)] + [chi(lat, v.bits) for v in vs] + [f_v(v) for v in vs]
    targets = [oplus(lat, v.bits) for v in vs]
    s = closure(basis, k_max=2, targets=targets)
    assert all(contains(s, t) for t in targets)
    # the witness term also works through the table algebra directly
    for v in vs:
        g = f_v(v).compose([chi(lat, 0).compose([join_fn(lat)]), chi(lat, 3).compose([meet_fn(lat)])])
        assert g == oplus(lat, v.bits)
