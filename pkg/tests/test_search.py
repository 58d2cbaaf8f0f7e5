import numpy as np
import pytest

from qekr import families as fm
from qekr import gfq, lattice, qcount
from qekr import search as se
from qekr import verify as vf
from qekr.families import Family


def test_config_validation():
    with pytest.raises(ValueError):
        se.SearchConfig(q=2, n=6, t=1, ks=(2, 2), strategies=("nope",))
    with pytest.raises(ValueError):
        se.SearchConfig(q=2, n=6, t=1, ks=(2, 2), random_seeds=-1)
    with pytest.raises(ValueError):
        se.search_cross_pairs(se.SearchConfig(q=2, n=6, t=1, ks=(2,)))
    with pytest.raises(ValueError):
        se.search_rwise(se.SearchConfig(q=2, n=6, t=1, ks=(4,), r=2))


def test_identify_pair():
    X, T, M = fm.anchor_chain(6, 2, 1, 2, 3)
    A, B = fm.construct(fm.A(2, X, M)), fm.construct(fm.B(2, X, M))
    assert se.identify_pair(A, B, 1) == "A/B"
    assert se.identify_pair(B, A, 1) == "B/A"
    C, D = fm.construct(fm.C(3, T)), fm.construct(fm.D(3, 1, T))
    assert se.identify_pair(C, D, 1) == "C/D"
    assert se.identify_pair(D, C, 1) == "D/C"
    P = fm.construct(fm.C(2, X))
    assert se.identify_pair(P, P, 1) == "C/C"
    assert se.identify_pair(A, P, 1) is None


def test_family_meet():
    X, M = fm.anchor_chain(6, 2, 2, 4)
    assert se.family_meet(fm.construct(fm.C(3, X))) == X
    assert se.family_meet(fm.construct(fm.M_full(2, M))) == gfq.zero(6, 2)


def test_small_cross_search_is_trivial_optimum():
    cfg = se.SearchConfig(q=2, n=5, t=1, ks=(2, 2), random_seeds=6, perturbations=4)
    res = se.search_cross_pairs(cfg)
    assert res.product == qcount.gauss_binom(4, 1, 2) ** 2
    assert res.trivial and res.matched == "C/C" and not res.violations
    F, G = res.best
    assert vf.is_cross_intersecting([F, G], 1)
    # every record comes from a closed, verified pair
    assert all(int(r["product"]) <= res.product for r in res.records)


def test_search_is_deterministic():
    cfg = se.SearchConfig(q=2, n=5, t=1, ks=(2, 2), random_seeds=4, perturbations=2, seed=7)
    a, b = se.search_cross_pairs(cfg), se.search_cross_pairs(cfg)
    assert a.as_dict() == b.as_dict()
    c = se.search_cross_pairs(se.SearchConfig(**{**cfg.__dict__, "workers": 3}))
    assert c.as_dict() == a.as_dict()


def test_trivial_seeds_classified():
    cfg = se.SearchConfig(q=2, n=5, t=1, ks=(2, 2), strategies=("all-t-covers",), random_seeds=0)
    res = se.search_cross_pairs(cfg)
    covers = [r for r in res.records if r["seed"].startswith("cover:C(dim=1)")]
    assert covers and all(r["trivial"] for r in covers)


def test_pair_bounds():
    b = se.pair_bounds(se.SearchConfig(q=2, n=8, t=1, ks=(3, 3)))
    assert b["nontrivial"] == qcount.g1(3, 3, 8, 1, 2) * qcount.g2(3, 8, 1, 2)
    b = se.pair_bounds(se.SearchConfig(q=2, n=8, t=1, ks=(2, 2)))
    assert "nontrivial" not in b  # (2, 2, 1) is excluded


def test_rwise_state_matches_verify():
    sl = lattice.enumerate_slice(5, 3, 2)
    rng = np.random.default_rng(0)
    for _ in range(5):
        st = se.RwiseState(sl, 3, 1)
        se.extend_maximal(st, rng.permutation(len(sl)))
        f = st.family()
        assert vf.is_rwise_intersecting(f, 3, 1)
        assert se.is_maximal_rwise(f, 3, 1)
        # brute force: nothing outside can be added
        for i in rng.choice(len(sl), 20, replace=False):
            G = sl[i]
            if G not in f:
                assert not vf.is_rwise_intersecting(f | Family([G]), 3, 1)


def test_rwise_constructions_identified_and_maximal():
    cons = se.rwise_constructions(6, 4, 1, 3, 2)
    assert set(cons) == {"A+M", "D"}
    assert se.identify_rwise(cons["A+M"], 1, 3) == "A+M"
    assert se.identify_rwise(cons["D"], 1, 3) == "D"
    for f in cons.values():
        assert se.is_maximal_rwise(f, 3, 1)


def test_search_rwise_small():
    cfg = se.SearchConfig(q=2, n=6, t=1, ks=(4,), r=3, random_seeds=4, perturbations=2)
    res = se.search_rwise(cfg)
    assert not res.violations
    assert res.product == len(se.rwise_constructions(6, 4, 1, 3, 2)["D"])
    assert res.matched == "D"
    nontriv = [r for r in res.records if not r["trivial"]]
    assert {r["matched"] for r in nontriv} <= {"D", "A+M"}


def test_rwise_nonexistence_small():
    out = se.rwise_nonexistence(5, 3, 1, 4, 2)
    assert out["longest_chain"] == 3 and not out["exists_possible"]
    out = se.rwise_nonexistence(5, 3, 1, 3, 2)
    assert out["exists_possible"]


def test_stability_probe():
    cfg = se.SearchConfig(q=2, n=6, t=1, ks=(4,), r=3, random_seeds=2, perturbations=1)
    rep = se.stability_probe(cfg)
    assert rep["families"]
    assert all(row["pairwise_ok"] for row in rep["families"])
    assert all(row["contained"] for row in rep["families"] if row["above_h2"])
