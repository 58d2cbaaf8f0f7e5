"""r-wise t-intersecting families of k-spaces.

Run: python3 demos/03_rwise.py
"""
from qekr import search as se
from qekr import verify as vf

q, n, k, t, r = 2, 6, 4, 1, 3

for name, f in se.rwise_constructions(n, k, t, r, q).items():
    ok = vf.is_rwise_intersecting(f, r, t)
    print(f"{name:4s} size {len(f):3d}  {r}-wise: {bool(ok)}  trivial: {vf.is_trivial(f, t)}"
          f"  maximal: {se.is_maximal_rwise(f, r, t)}")

res = se.search_rwise(se.SearchConfig(q=q, n=n, t=t, ks=(k,), r=r))
print("largest non-trivial found:", res.product, res.matched, res.bound)

# r past k - t + 1: no non-trivial family at all
for kk, tt, rr in ((3, 1, 4), (4, 1, 5), (4, 2, 4)):
    print((kk, tt, rr), se.rwise_nonexistence(n, kk, tt, rr, q))

# t + r = k + 1: every maximal non-trivial family is [M, k]
res = se.search_rwise(se.SearchConfig(q=q, n=n, t=1, ks=(3,), r=3))
print("t+r=k+1:", {x["matched"] for x in res.records if not x["trivial"]})
