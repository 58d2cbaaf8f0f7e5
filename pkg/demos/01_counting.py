"""Gaussian binomials, the named constructions and their sizes.

Run: python3 demos/01_counting.py
"""
from qekr import families as fm
from qekr import gfq, lattice, qcount

q, n, t = 2, 6, 1

# number of 2-spaces of F_2^4, two ways
print("[4,2]_2 =", qcount.gauss_binom(4, 2, 2), "=", len(lattice.enumerate_slice(4, 2, 2)))

# a subspace is kept as its RREF basis; rows print as digit strings
S = gfq.Subspace.span([(1, 1, 0), (0, 1, 1), (1, 0, 1)], 3, 2)
print(S, "rank", S.dim)

# nested coordinate anchors X < T < M
X, T, M = fm.anchor_chain(n, q, 1, 2, 3)

for spec in (fm.A(2, X, M), fm.B(2, X, M), fm.C(3, T), fm.D(3, 1, T)):
    r = fm.size_check(spec)
    print(f"{r.spec:28s} enumerated {r.enumerated:5d}  {r.formula_name} {r.formula:5d}  match={r.match}")

r = fm.size_check((fm.C(3, T), fm.D(2, 1, T)))
print(f"|C|*|D| = {r.enumerated} vs g3 = {r.formula}")

# H2 with C of dim k+1 and with C = V
X, M, C = fm.anchor_chain(8, 2, 1, 3, 4)
for Cs in (C, gfq.full(8, 2)):
    r = fm.size_check(fm.H2(3, X, M, Cs))
    print(f"{r.spec:28s} {r.enumerated} = {r.formula_name} {r.formula}")

# h1 and h2 coincide at k = 3, d = 1 for every n
print("h1(1,3,n) - h2(1,3,n):", [qcount.h1(1, 3, m, 2) - qcount.h2(1, 3, m, 2) for m in range(6, 11)])
