import pytest

from qekr import families as fm
from qekr import gfq, lattice, qcount
from qekr.errors import AnchorViolation, BudgetExceeded, EmptyFamily, NoFormula
from qekr.families import Family

from oracles import subspace_points


def chain(n, q, *dims):
    return fm.anchor_chain(n, q, *dims)


def skew(n, q, *dims):
    """Nested non-coordinate anchors built from e_i + e_{n-1}."""
    vecs = []
    for i in range(n):
        v = [0] * n
        v[i] = v[n - 1] = 1
        vecs.append(v)
    out, basis = [], []
    for i in range(max(dims)):
        basis.append(vecs[i])
        if i + 1 in dims:
            out.append(gfq.Subspace.span(basis, n, q))
    return out


def brute(spec):
    n, q = spec.ambient
    sl = lattice.enumerate_slice(n, spec.k, q)
    return Family([F for F in sl if fm.accepts(spec, F)], n, spec.k, q)


SPECS = []
for q, n in [(2, 6), (3, 4)]:
    X, M = chain(n, q, 1, 3)
    SPECS += [fm.A(2, X, M), fm.A(3, X, M), fm.B(2, X, M), fm.C(2, X), fm.D(2, 1, M), fm.M_full(2, M)]
X, M, C3 = skew(6, 2, 1, 3, 4)
SPECS += [fm.E1(3, X, M), fm.E2(3, X, M, C3), fm.E3(3, X, M, C3), fm.H2(3, X, M, C3)]
X, M = skew(6, 2, 1, 3)
SPECS += [fm.E2(3, X, M, gfq.full(6, 2)), fm.H2(3, X, M, gfq.full(6, 2)), fm.A(3, X, M)]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.describe())
def test_predicate_agrees_with_enumeration(spec):
    assert fm.construct(spec) == brute(spec)


def test_spec_examples_sizes():
    n, q = 6, 2
    X, T, M = chain(n, q, 1, 2, 3)
    # [4, 1]_2 spaces over a fixed plane
    assert len(fm.construct(fm.C(3, T))) == 15 == qcount.size_C(3, 2, 6, 2)
    assert len(fm.construct(fm.D(3, 1, T))) == 435
    assert len(fm.construct(fm.A(2, X, M))) == 3 == qcount.g1(2, 2, 6, 1, 2)
    r = fm.size_check(fm.B(2, X, M))
    assert (r.enumerated, r.formula, r.match) == (35, 35, True)


def test_c_d_product_is_g3():
    X, T = chain(6, 2, 1, 2)
    r = fm.size_check((fm.C(3, T), fm.D(2, 1, T)))
    assert r.formula_name == "g3" and r.match and r.formula == qcount.g3(3, 2, 6, 1, 2)


def test_point_set_oracle_for_D():
    # D(2, 1, T) in F_3^4 straight from point sets
    T = chain(4, 3, 2)[0]
    pt = subspace_points(T)
    got = fm.construct(fm.D(2, 1, T))
    ref = [F for F in lattice.enumerate_slice(4, 2, 3) if len(subspace_points(F) & pt) >= 3]
    assert list(got) == ref


def test_h2_with_c_of_dim_k_plus_one_is_a_union():
    X, M, C = chain(6, 2, 1, 3, 4)
    h = fm.construct(fm.H2(3, X, M, C))
    assert h == fm.construct(fm.A(3, X, C)) | fm.construct(fm.M_full(3, C))
    assert len(h) == qcount.h1(1, 3, 6, 2)


def test_h2_at_d_equals_k_minus_two_is_D():
    X, M = chain(6, 2, 1, 3)
    h = fm.construct(fm.H2(3, X, M, gfq.full(6, 2)))
    assert len(h) == qcount.h2(1, 3, 6, 2)
    assert h == fm.construct(fm.D(3, 2, M))


@pytest.mark.parametrize(
    "q,n,k,d,c",
    [(2, 6, 3, 1, 4), (2, 6, 3, 1, 6), (2, 7, 3, 1, 4), (2, 7, 3, 1, 7), (3, 6, 3, 1, 4), (3, 6, 3, 1, 6)],
)
def test_h2_sizes(q, n, k, d, c):
    X, M, C = chain(n, q, d, k, c)
    r = fm.size_check(fm.H2(k, X, M, C))
    assert r.match, r


def test_validation():
    X, T, M, N = chain(6, 2, 1, 2, 3, 4)
    with pytest.raises(AnchorViolation):
        fm.construct(fm.B(3, X, M))  # dim M must be l + 1
    with pytest.raises(AnchorViolation):
        fm.construct(fm.A(3, M, X))  # X not inside M
    with pytest.raises(AnchorViolation):
        fm.construct(fm.D(3, 3, T))
    with pytest.raises(AnchorViolation):
        fm.construct(fm.H2(3, T, M, chain(6, 2, 5)[0]))  # dim C = 5 is neither in [k+1, 2k-d] nor n
    with pytest.raises(AnchorViolation):
        fm.construct(fm.H2(4, X, N, gfq.full(6, 2)))  # n < 2k
    with pytest.raises(AnchorViolation):
        fm.construct(fm.ConstructionSpec("Z", 2, {"M": M}))
    with pytest.raises(AnchorViolation):
        fm.construct(fm.A(2, X, chain(5, 2, 3)[0]))  # different ambient spaces


def test_no_formula():
    X, T, M = chain(6, 2, 1, 2, 3)
    with pytest.raises(NoFormula):
        fm.size_check(fm.D(3, 1, M))  # dim T = s + 2
    with pytest.raises(NoFormula):
        fm.size_check((fm.C(3, T), fm.D(2, 2, T)))


def test_budget():
    X, M = chain(8, 2, 1, 3)
    with pytest.raises(BudgetExceeded):
        fm.construct(fm.D(4, 1, M), budget=100)


def test_hull():
    X, M = chain(6, 2, 1, 3)
    F = fm.construct(fm.C(3, M))
    one = Family([F[0]])
    assert fm.hull(one) == F[0]
    assert fm.hull(fm.construct(fm.M_full(2, M))) == M
    assert fm.hull(fm.construct(fm.D(3, 1, X))) == gfq.full(6, 2)
    with pytest.raises(EmptyFamily):
        fm.hull(Family([], 6, 2, 2))


def test_family_container():
    sl = lattice.enumerate_slice(4, 2, 2)
    a = Family(sl.elements[:5])
    b = Family(reversed(sl.elements[3:8]))
    assert len(a | b) == 8
    assert a <= a | b and not (a | b) <= a
    assert Family(list(a) + list(a)) == a
    assert sl.elements[0] in a and sl.elements[7] not in a
    with pytest.raises(ValueError):
        Family([sl.elements[0], gfq.full(4, 2)])
    with pytest.raises(ValueError):
        Family([])


def test_save_load(tmp_path):
    X, M = chain(6, 2, 1, 3)
    spec = fm.D(3, 2, M)
    f = fm.construct(spec)
    p = fm.save_family(f, tmp_path / "d.qlat", spec)
    g, back = fm.load_family(p)
    assert g == f
    assert back.name == "D" and back.params == {"s": 2} and back.anchors["T"] == M
    assert fm.construct(back) == f
