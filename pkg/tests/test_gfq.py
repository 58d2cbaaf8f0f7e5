from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qekr import gfq, lattice
from qekr.errors import InvalidEntry, NotAPrimePower, UnsupportedOrder

from oracles import all_subspaces, dim_of, span_points, subspace_points


def test_gf2_is_xor():
    f = gfq.field_make(2)
    assert f.add == ((0, 1), (1, 0))
    assert f.mul == ((0, 0), (0, 1))


@pytest.mark.parametrize("q", [4, 8, 9])
def test_extension_field_axioms(q):
    f = gfq.field_make(q)
    els = range(q)
    for a, b, c in product(els, repeat=3):
        assert f.add[a][f.add[b][c]] == f.add[f.add[a][b]][c]
        assert f.mul[a][f.mul[b][c]] == f.mul[f.mul[a][b]][c]
        assert f.mul[a][f.add[b][c]] == f.add[f.mul[a][b]][f.mul[a][c]]
    for a in els:
        assert f.add[a][0] == a and f.mul[a][1] == a
        assert f.add[a][f.neg[a]] == 0
        if a:
            assert f.mul[a][f.inv[a]] == 1
    # no zero divisors
    assert all(f.mul[a][b] for a in range(1, q) for b in range(1, q))


def test_gf4_modulus():
    f = gfq.field_make(4)
    assert (f.p, f.e, f.modulus) == (2, 2, (1, 1, 1))
    # x * x = x + 1 with x encoded as 2
    assert f.mul[2][2] == 3


def test_bad_orders():
    with pytest.raises(NotAPrimePower):
        gfq.field_make(6)
    with pytest.raises(NotAPrimePower):
        gfq.field_make(1)
    with pytest.raises(UnsupportedOrder):
        gfq.field_make(11)


def test_rref_examples():
    f2 = gfq.field_make(2)
    ident = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    canon, rank, piv = gfq.rref(ident, f2)
    assert [tuple(r) for r in canon] == list(ident) and rank == 3 and list(piv) == [0, 1, 2]
    assert gfq.rref(((0, 0, 0), (0, 0, 0)), f2)[1] == 0
    rows = ((1, 1, 0), (0, 1, 1), (1, 0, 1))
    assert gfq.rref(rows, f2)[1] == 2
    # brute-force span has 3 non-zero vectors
    assert len(span_points(rows, 3, 2)) == 4


def test_rref_rejects_bad_entries():
    with pytest.raises(InvalidEntry):
        gfq.rref(((0, 2),), gfq.field_make(2))
    with pytest.raises(InvalidEntry):
        gfq.rref(((0, 1), (1,)), gfq.field_make(3))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 4), st.data())
def test_span_matches_bruteforce(p, n, data):
    vecs = data.draw(st.lists(st.tuples(*[st.integers(0, p - 1)] * n), max_size=4))
    S = gfq.Subspace.span(vecs, n, p)
    pts = span_points(vecs, n, p)
    assert S.dim == dim_of(pts, p)
    assert subspace_points(S) == pts
    # canonical form: any spanning set of the same space gives the same object
    assert gfq.Subspace.span(sorted(pts), n, p) == S
    assert all(v in S for v in pts)


@pytest.mark.parametrize("n,k,q", [(3, 1, 2), (4, 2, 2), (3, 2, 3), (4, 1, 3), (5, 2, 2)])
def test_iter_rref_counts_every_subspace_once(n, k, q):
    subs = [gfq.Subspace(q, n, rows, piv) for piv, rows in gfq.iter_rref(n, k, q)]
    assert len(set(subs)) == len(subs)
    assert {subspace_points(S) for S in subs} == all_subspaces(n, k, q)


def test_dim_meet_and_join_examples():
    e12 = gfq.coordinate([0, 1], 4, 2)
    e34 = gfq.coordinate([2, 3], 4, 2)
    assert gfq.dim_meet(e12, e34) == 0
    assert gfq.dim_meet(e12, e12) == 2
    planes = lattice.enumerate_slice(3, 2, 2).elements
    assert all(gfq.dim_meet(a, b) == 1 for a in planes for b in planes if a != b)
    a = gfq.coordinate([0], 3, 2)
    assert gfq.join(a, a) == a
    assert gfq.join(a, gfq.coordinate([1], 3, 2)) == gfq.coordinate([0, 1], 3, 2)


def test_modular_law_on_all_planes_of_f2_4():
    planes = lattice.enumerate_slice(4, 2, 2).elements
    assert len(planes) == 35
    for a in planes:
        pa = subspace_points(a)
        for b in planes:
            j, m = gfq.join(a, b), gfq.meet(a, b)
            assert j.dim + m.dim == a.dim + b.dim
            assert subspace_points(m) == pa & subspace_points(b)
            assert gfq.dim_meet(a, b) == m.dim


@pytest.mark.parametrize("q,n", [(3, 3), (4, 3), (5, 2)])
def test_modular_law_odd_fields(q, n):
    lines = lattice.enumerate_slice(n, 1, q).elements
    planes = lattice.enumerate_slice(n, 2, q).elements
    for a in lines:
        for b in planes:
            assert gfq.join(a, b).dim + gfq.dim_meet(a, b) == 3
            assert gfq.contains(b, a) == (gfq.dim_meet(a, b) == 1)


def test_contains():
    V = gfq.full(4, 2)
    l = gfq.coordinate([0], 4, 2)
    assert gfq.contains(l, l)
    assert not gfq.contains(l, V)
    assert gfq.contains(V, l)
    planes = lattice.enumerate_slice(4, 2, 2).elements
    assert sum(gfq.contains(P, l) for P in planes) == 7


def test_point_masks_give_dimensions():
    sl = lattice.enumerate_slice(4, 2, 3)
    m = sl.masks
    d = gfq.dims_from_sizes(gfq.mask_size(m[:20, None, :] & m[None, :20, :]).ravel(), 3)
    ref = [gfq.dim_meet(a, b) for a in sl.elements[:20] for b in sl.elements[:20]]
    assert np.array_equal(d, ref)


def test_meet_all_and_join_all():
    subs = [gfq.coordinate(ix, 5, 2) for ix in ([0, 1, 2], [0, 1, 3], [0, 2, 4])]
    assert gfq.meet_all(subs) == gfq.coordinate([0], 5, 2)
    assert gfq.join_all(subs) == gfq.full(5, 2)
