"""Cross t-intersecting pairs: checks, covering numbers, closure, search.

Run: python3 demos/02_cross_pairs.py   (about 30 s, most of it the n=8 search)
"""
from qekr import families as fm
from qekr import qcount
from qekr import search as se
from qekr import verify as vf

q, n, t = 2, 6, 1
X, M = fm.anchor_chain(n, q, t, 3)
A = fm.construct(fm.A(2, X, M))
B = fm.construct(fm.B(2, X, M))

print("|A|, |B| =", len(A), len(B))
print("cross 1-intersecting:", bool(vf.is_cross_intersecting([A, B], t)))
print("trivial:", vf.is_trivial([A, B], t))
print("tau_1(A) =", vf.tau(A, t).tau, " tau_1(B) =", vf.tau(B, t).tau)

closed = vf.close_families([A, B], t)
print("closure fixed point:", closed.families == (A, B), "after", closed.rounds, "round(s)")

# two pencils on different points fail, with a witness
P1 = fm.construct(fm.C(2, fm.anchor_chain(n, q, 1)[0]))
P2 = fm.construct(fm.C(2, vf.gfq.coordinate([3], n, q)))
res = vf.is_cross_intersecting([P1, P2], t)
print("disjoint pencils:", bool(res), "witness dim", res.witness.dim)

# trivial optimum at n = 6
res = se.search_cross_pairs(se.SearchConfig(q=2, n=6, t=1, ks=(2, 2)))
print("best product", res.product, "trivial", res.trivial, res.matched, "violations", res.violations)

# non-trivial optimum at n = 8 (outside n >= k1+k2+t+3, so flagged exploratory)
res = se.search_cross_pairs(se.SearchConfig(q=2, n=8, t=1, ks=(3, 3)), nontrivial=True)
bound = qcount.g1(3, 3, 8, 1, 2) * qcount.g2(3, 8, 1, 2)
print("best non-trivial", res.product, "bound", bound, res.matched, "exploratory", res.exploratory)
