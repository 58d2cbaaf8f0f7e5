from itertools import combinations_with_replacement, product

import numpy as np
import pytest

from qekr import families as fm
from qekr import gfq, lattice, verify
from qekr.errors import AmbientMismatch, BudgetExceeded, EmptyFamily, NotMaximal
from qekr.families import Family

from oracles import dim_of, subspace_points


def naive_cross(fams, t):
    q = fams[0].q
    pts = [[subspace_points(F) for F in f] for f in fams]
    for tup in product(*pts):
        m = frozenset.intersection(*tup)
        if dim_of(m, q) < t:
            return False
    return True


def naive_rwise(f, r, t):
    pts = [subspace_points(F) for F in f]
    return all(dim_of(frozenset.intersection(*c), f.q) >= t for c in combinations_with_replacement(pts, r))


def pair_AB(n, q, k1, k2, t):
    X, M = fm.anchor_chain(n, q, t, k2 + 1)
    return fm.construct(fm.A(k1, X, M)), fm.construct(fm.B(k2, X, M))


def pair_CD(n, q, k1, k2, t):
    T = fm.anchor_chain(n, q, t + 1)[0]
    return fm.construct(fm.C(k1, T)), fm.construct(fm.D(k2, t, T))


def rwise_AM(n, k, t, r, q):
    X, M = fm.anchor_chain(n, q, t + r - 2, k + 1)
    return fm.construct(fm.A(k, X, M)) | fm.construct(fm.M_full(k, M))


def rwise_D(n, k, t, r, q):
    Z = fm.anchor_chain(n, q, t + r)[0]
    return fm.construct(fm.D(k, t + r - 1, Z))


@pytest.mark.parametrize("n,q,k1,k2,t", [(6, 2, 2, 2, 1), (6, 2, 3, 2, 1), (5, 3, 2, 2, 1), (7, 2, 3, 3, 2)])
def test_cross_pairs_agree_with_naive(n, q, k1, k2, t):
    for a, b in (pair_AB(n, q, k1, k2, t), pair_CD(n, q, k1, k2, t)):
        res = verify.is_cross_intersecting([a, b], t)
        assert res.holds and naive_cross([a, b], t)
        assert not verify.is_trivial([a, b], t)


def test_trivial_pencils():
    T = fm.anchor_chain(6, 2, 1)[0]
    a, b = fm.construct(fm.C(2, T)), fm.construct(fm.C(3, T))
    assert verify.is_cross_intersecting([a, b], 1)
    assert verify.is_trivial(a, 1) and verify.is_trivial([a, b], 1)


def test_disjoint_pencils_give_witness():
    T1 = gfq.coordinate([0], 5, 2)
    T2 = gfq.coordinate([1], 5, 2)
    a, b = fm.construct(fm.C(2, T1)), fm.construct(fm.C(2, T2))
    res = verify.is_cross_intersecting([a, b], 1)
    assert not res and res.witness.dim == 0
    F, G = res.witness.members
    assert gfq.dim_meet(F, G) == 0 and F in (a | b) and G in (a | b)
    assert not naive_cross([a, b], 1)
    assert res.witness.as_dict()["dim"] == "0"


def test_random_families_agree_with_naive():
    rng = np.random.default_rng(1)
    sl = lattice.enumerate_slice(5, 2, 2)
    for _ in range(60):
        f = Family([sl[i] for i in rng.choice(len(sl), size=int(rng.integers(1, 8)), replace=False)])
        g = Family([sl[i] for i in rng.choice(len(sl), size=int(rng.integers(1, 8)), replace=False)])
        assert bool(verify.is_cross_intersecting([f, g], 1)) == naive_cross([f, g], 1)
        for r in (2, 3):
            assert bool(verify.is_rwise_intersecting(f, r, 1)) == naive_rwise(f, r, 1)
        assert bool(verify.is_cross_intersecting([f, g, f], 1)) == naive_cross([f, g, f], 1)


@pytest.mark.parametrize("n", [6, 7])
def test_rwise_constructions(n):
    for f in (rwise_AM(n, 4, 1, 3, 2), rwise_D(n, 4, 1, 3, 2)):
        assert verify.is_rwise_intersecting(f, 3, 1)
        assert not verify.is_trivial(f, 1)
    if n == 6:
        assert naive_rwise(rwise_AM(6, 4, 1, 3, 2), 3, 1)


def test_rwise_fails_when_a_pair_is_too_far_apart():
    # non-trivial r-wise t-intersecting forces pairwise dim >= t + r - 2 = 2
    f = rwise_D(7, 4, 1, 3, 2)
    sl = lattice.enumerate_slice(7, 4, 2)
    G = next(G for G in sl if G not in f and min(gfq.dim_meet(G, F) for F in f) < 2)
    g = f | Family([G])
    res = verify.is_rwise_intersecting(g, 3, 1)
    assert not res and res.witness.dim < 1
    assert verify.is_rwise_intersecting(g, 2, 1)


def test_empty_and_errors():
    e = Family([], 4, 2, 2)
    f = fm.construct(fm.C(2, gfq.coordinate([0], 4, 2)))
    assert verify.is_cross_intersecting([e, f], 1)
    assert verify.is_rwise_intersecting(e, 3, 1)
    with pytest.raises(EmptyFamily):
        verify.is_trivial(e, 1)
    with pytest.raises(AmbientMismatch):
        verify.is_cross_intersecting([f, fm.construct(fm.C(2, gfq.coordinate([0], 5, 2)))], 1)
    with pytest.raises(ValueError):
        verify.is_rwise_intersecting(f, 1, 1)


def test_budget_and_sampling():
    a, b = pair_CD(7, 2, 3, 3, 1)
    with pytest.raises(BudgetExceeded):
        verify.is_cross_intersecting([a, b], 1, budget=10)
    res = verify.is_cross_intersecting([a, b], 1, budget=10, sample=200, seed=3)
    assert res.holds and res.sampled
    again = verify.is_cross_intersecting([a, b], 1, budget=10, sample=200, seed=3)
    assert again == res


def test_tau_ground_truth():
    n, q, t = 6, 2, 1
    X, M = fm.anchor_chain(n, q, t, 3)
    A = fm.construct(fm.A(2, X, M))
    B = fm.construct(fm.B(2, X, M))
    C = fm.construct(fm.C(2, X))
    for f, want in ((A, t), (B, t + 1), (C, t)):
        cov = verify.tau(f, t)
        scan = verify.tau(f, t, method="scan")
        assert cov.tau == scan.tau == want
        assert set(cov.covers) == set(scan.covers)
    assert X in verify.tau(C, t).covers and X in verify.tau(A, t).covers


def test_tau_matches_naive_on_random_families():
    rng = np.random.default_rng(5)
    sl = lattice.enumerate_slice(4, 2, 3)
    for _ in range(15):
        f = Family([sl[i] for i in rng.choice(len(sl), size=int(rng.integers(1, 6)), replace=False)])
        res = verify.tau(f, 1)
        # smallest s with an s-space meeting every member
        for s in range(1, 5):
            hits = [T for T in lattice.enumerate_slice(4, s, 3) if all(gfq.dim_meet(T, F) >= 1 for F in f)]
            if hits:
                break
        assert res.tau == s and set(res.covers) == set(hits)
    with pytest.raises(EmptyFamily):
        verify.tau(Family([], 4, 2, 3), 1)


def test_partner_closure():
    T = fm.anchor_chain(6, 2, 1)[0]
    assert verify.partner_closure(fm.construct(fm.C(2, T)), 3, 1) == fm.construct(fm.C(3, T))
    F = lattice.enumerate_slice(5, 2, 2)[4]
    got = verify.partner_closure(Family([F]), 3, 2)
    assert got == Family([G for G in lattice.enumerate_slice(5, 3, 2) if gfq.dim_meet(F, G) >= 2])


def test_closure_idempotent_and_fixed_points():
    a, b = pair_AB(6, 2, 2, 2, 1)
    cl = verify.close_families([a, b], 1)
    assert cl.converged and cl.rounds == 1 and cl.families == (a, b)
    # P(P(P(F))) = P(F) on a random seed
    sl = lattice.enumerate_slice(5, 2, 2)
    f = Family(sl.elements[::9])
    p1 = verify.partner_closure(f, 2, 1)
    p3 = verify.partner_closure(verify.partner_closure(p1, 2, 1), 2, 1)
    assert p1 == p3
    cl = verify.close_families([f, Family([], 5, 2, 2)], 1)
    assert cl.converged and verify.is_cross_intersecting(list(cl.families), 1)


def test_three_family_closure_reports_convergence():
    sl = lattice.enumerate_slice(5, 2, 2)
    fams = [Family([sl[0]]), Family([sl[1]]), Family([sl[2]])]
    cl = verify.close_families(fams, 1, max_rounds=10)
    assert isinstance(cl.converged, bool)
    if cl.converged:
        assert verify.is_cross_intersecting(list(cl.families), 1)


def test_mincover_cross_check():
    a, b = pair_AB(6, 2, 2, 2, 1)
    assert verify.mincover_cross_check(a, b, 1)
    T = fm.anchor_chain(6, 2, 1)[0]
    c = fm.construct(fm.C(2, T))
    assert verify.mincover_cross_check(c, c, 1)
    with pytest.raises(NotMaximal):
        verify.mincover_cross_check(Family(a.members[:1]), b, 1)


def test_cover_bound_helpers():
    b = verify.cover_bounds(3, 3, 9, 1, 1, 2, 2)
    assert set(b) == {"base", "i"}
    assert "ii" in verify.cover_bounds(3, 3, 9, 1, 1, 3, 2)
    X, M = fm.anchor_chain(7, 2, 1, 4)
    A = fm.construct(fm.A(3, X, M))
    # family members meeting G = M in >= t; S a 2-space with dim(S & G) = 0 < t
    S = gfq.coordinate([4, 5], 7, 2)
    assert len(verify.members_containing(A, S)) <= verify.fs_bound(4, 0, 2, 1, 7, 3, 2)
