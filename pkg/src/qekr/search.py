"""Seeded extremal search for cross t-intersecting pairs and r-wise families.

Nothing here is exhaustive over families (that space is doubly exponential);
every report carries ``coverage = "seeded"``. What the search does guarantee:
each reported family is re-verified from scratch, every closed pair is a
genuine fixed point of partner closure, and identical configs give identical
results.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import families as fm
from . import gfq, lattice, qcount
from . import verify as vf
from .errors import DomainViolation
from .families import Family

STRATEGIES = ("all-t-covers", "random-members", "construction-perturbation")


@dataclass(frozen=True)
class SearchConfig:
    q: int
    n: int
    t: int
    ks: tuple
    r: int = 2
    strategies: tuple = STRATEGIES
    random_seeds: int = 16
    perturbations: int = 8
    seed: int = 0
    budget: int = None
    workers: int = 1

    def __post_init__(self):
        if self.random_seeds < 0 or self.perturbations < 0:
            raise ValueError("seed counts must be non-negative")
        if self.budget is not None and self.budget <= 0:
            raise ValueError("budget must be positive")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise ValueError(f"unknown strategy {s!r}")


@dataclass
class SearchResult:
    best: tuple
    product: int
    trivial: bool
    matched: str
    records: list = field(default_factory=list)
    bound: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    exploratory: bool = False
    coverage: str = "seeded"

    def as_dict(self):
        return {
            "product": str(self.product),
            "sizes": [str(len(f)) for f in self.best],
            "trivial": self.trivial,
            "matched": self.matched,
            "bound": {k: str(v) for k, v in self.bound.items()},
            "violations": self.violations,
            "exploratory": self.exploratory,
            "coverage": self.coverage,
            "records": self.records,
        }


def _mask_subspace(mask, n, q):
    bits = np.unpackbits(mask.view(np.uint8), bitorder="little")[: q**n]
    return gfq.Subspace.span([int(c) for c in np.flatnonzero(bits)], n, q)


def family_meet(f):
    """Global meet of a non-empty family as a Subspace."""
    m = np.bitwise_and.reduce(f.masks, axis=0)
    return _mask_subspace(m, f.n, f.q)


def _prod(fams):
    out = 1
    for f in fams:
        out *= len(f)
    return out


# ---------------------------------------------------------------------------
# cross pairs


def identify_pair(F, G, t):
    """Name the construction a cross pair equals, or None.

    Anchors are read off the pair itself: the meet of one side and the hull of
    the other side's members that avoid it.
    """
    if not len(F) or not len(G):
        return None
    n, q = F.n, F.q
    k1, k2 = F.k, G.k
    meet = gfq.meet(family_meet(F), family_meet(G))
    if meet.dim == t:
        if F == fm.construct(fm.C(k1, meet)) and G == fm.construct(fm.C(k2, meet)):
            return "C/C"
    for name, a, b in (("A/B", F, G), ("B/A", G, F)):
        if name == "B/A" and k1 != k2:
            continue
        X = family_meet(a)
        if X.dim != t:
            continue
        rest = [g for g in b if not gfq.contains(g, X)]
        if not rest:
            continue
        M = gfq.join_all(rest)
        if M.dim != b.k + 1 or not gfq.contains(M, X):
            continue
        if a == fm.construct(fm.A(a.k, X, M)) and b == fm.construct(fm.B(b.k, X, M)):
            return name
    for name, a, b in (("C/D", F, G), ("D/C", G, F)):
        if name == "D/C" and k1 != k2:
            continue
        T = family_meet(a)
        if T.dim != t + 1:
            continue
        if a == fm.construct(fm.C(a.k, T)) and b == fm.construct(fm.D(b.k, t, T)):
            return name
    return None


def _pair_seeds(cfg, rng):
    """(label, side, family) seeds; side says which coordinate the seed fills."""
    n, q, t = cfg.n, cfg.q, cfg.t
    k1, k2 = cfg.ks
    V = gfq.full(n, q)
    sides = (0,) if k1 == k2 else (0, 1)
    seeds = []
    if "all-t-covers" in cfg.strategies:
        for side in sides:
            k = cfg.ks[side]
            for s in range(t, min(t + 2, k) + 1):
                T = gfq.coordinate(range(s), n, q)
                seeds.append((f"cover:C(dim={s})", side, fm.construct(fm.C(k, T), cfg.budget)))
            # two t-spaces meeting in dimension j
            for j in range(t):
                if 2 * t - j > n:
                    continue
                T1 = gfq.coordinate(range(t), n, q)
                T2 = gfq.coordinate(range(t - j, 2 * t - j), n, q)
                fam = fm.construct(fm.C(k, T1), cfg.budget) | fm.construct(fm.C(k, T2), cfg.budget)
                seeds.append((f"cover:pair(meet={j})", side, fam))
            # t-space inside a larger m-space
            for m in range(t + 1, min(t + 3, n - 1) + 1):
                X, M = fm.anchor_chain(n, q, t, m)
                if k >= t:
                    fam = fm.construct(fm.A(k, X, M), cfg.budget)
                    if len(fam):
                        seeds.append((f"cover:XM(dim M={m})", side, fam))
    if "random-members" in cfg.strategies:
        for side in sides:
            sl = lattice.enumerate_slice(n, cfg.ks[side], q, budget=cfg.budget)
            for i in range(cfg.random_seeds):
                m = int(rng.integers(1, 4))
                idx = sorted(set(int(x) for x in rng.integers(len(sl), size=m)))
                seeds.append((f"random:{i}", side, Family([sl[j] for j in idx])))
    if "construction-perturbation" in cfg.strategies and k2 >= t + 1:
        X, M = fm.anchor_chain(n, q, t, k2 + 1)
        (T,) = fm.anchor_chain(n, q, t + 1)
        bases = [("A", 0, fm.construct(fm.A(k1, X, M), cfg.budget))]
        bases.append(("B", 1, fm.construct(fm.B(k2, X, M), cfg.budget)))
        bases.append(("C", 0, fm.construct(fm.C(k1, T), cfg.budget)))
        bases.append(("D", 1, fm.construct(fm.D(k2, t, T), cfg.budget)))
        for name, side, base in bases:
            seeds.append((f"construct:{name}", side, base))
            sl = lattice.enumerate_slice(n, base.k, q, budget=cfg.budget)
            for i in range(cfg.perturbations):
                if i % 2 == 0 and len(base) > 1:
                    drop = base[int(rng.integers(len(base)))]
                    fam = Family([m for m in base if m != drop], n, base.k, q)
                    seeds.append((f"perturb:{name}-1:{i}", side, fam))
                else:
                    extra = sl[int(rng.integers(len(sl)))]
                    seeds.append((f"perturb:{name}+1:{i}", side, Family(base.members + (extra,))))
    return seeds


def close_pair(seed, side, ks, t, budget=None):
    """Close a one-sided seed to a maximal pair (F over ks[0], G over ks[1])."""
    other = 1 - side
    partner = vf.partner_closure(seed, ks[other], t, budget)
    fams = [None, None]
    fams[side], fams[other] = seed, partner
    closed = vf.close_families(fams, t, budget=budget)
    return closed.families


def _pair_record(label, pair, t):
    F, G = pair
    if not len(F) or not len(G):
        return None
    check = vf.is_cross_intersecting([F, G], t)
    if not check:
        raise AssertionError(f"closure produced a non-intersecting pair from {label}")
    trivial = vf.is_trivial([F, G], t)
    return {
        "seed": label,
        "sizes": (len(F), len(G)),
        "product": len(F) * len(G),
        "trivial": trivial,
        "matched": identify_pair(F, G, t),
        "pair": pair,
    }


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def pair_bounds(cfg):
    n, t, q = cfg.n, cfg.t, cfg.q
    k1, k2 = sorted(cfg.ks, reverse=True)
    out = {}
    if n >= k1 + k2 + t + 1 and k2 >= t:
        out["trivial"] = qcount.cross_bound_trivial((k1, k2), n, t, q)
    if k2 >= t + 1 and (k1, k2, t) not in {(2, 2, 1), (3, 2, 1), (4, 2, 1)}:
        out["nontrivial"] = qcount.cross_bound_nontrivial(k1, k2, n, t, q)
    return out


def search_cross_pairs(cfg, nontrivial=False):
    """Closure search over seeded pairs.

    With ``nontrivial`` the optimum is taken over non-trivial pairs only.
    """
    if len(cfg.ks) != 2:
        raise ValueError("cross-pair search needs exactly two dimensions")
    rng = np.random.default_rng(cfg.seed)
    seeds = _pair_seeds(cfg, rng)

    def run(item):
        label, side, fam = item
        return _pair_record(label, close_pair(fam, side, cfg.ks, cfg.t, cfg.budget), cfg.t)

    recs = [r for r in _map(run, seeds, cfg.workers) if r is not None]
    bound = pair_bounds(cfg)
    n, t = cfg.n, cfg.t
    k1, k2 = sorted(cfg.ks, reverse=True)
    exploratory = n < k1 + k2 + t + 3 and nontrivial
    violations = []
    for r in recs:
        if "trivial" in bound and r["product"] > bound["trivial"]:
            violations.append({"seed": r["seed"], "bound": "trivial", "product": str(r["product"])})
        if not r["trivial"] and "nontrivial" in bound and r["product"] > bound["nontrivial"]:
            violations.append({"seed": r["seed"], "bound": "nontrivial", "product": str(r["product"])})
    pool = [r for r in recs if not (nontrivial and r["trivial"])]
    if not pool:
        return SearchResult((), 0, False, None, _public(recs), bound, violations, exploratory)
    best = max(pool, key=lambda r: (r["product"], _neg_key(r["pair"])))
    return SearchResult(
        best["pair"],
        best["product"],
        best["trivial"],
        best["matched"],
        _public(recs),
        bound,
        violations,
        exploratory,
    )


def _neg_key(fams):
    # lexicographically smallest serialisation wins ties under max()
    return tuple(tuple(-r for rows in f.key() for r in rows) for f in fams)


def _public(recs):
    out = []
    for r in recs:
        out.append(
            {
                "seed": r["seed"],
                "sizes": [str(s) for s in r["sizes"]],
                "product": str(r["product"]),
                "trivial": r["trivial"],
                "matched": r["matched"],
            }
        )
    return out


# ---------------------------------------------------------------------------
# r-wise families


class RwiseState:
    """Incremental r-wise t-intersecting family over a lattice slice.

    ``levels[j]`` holds the distinct meets of at most j+1 members; a slice
    element is addable iff it meets every level-(r-2) meet in dimension >= t.
    """

    def __init__(self, sl, r, t):
        self.sl = sl
        self.r = r
        self.t = t
        self.q = sl.q
        self.members = []
        W = sl.masks.shape[1]
        self.levels = [np.zeros((0, W), dtype=np.uint64) for _ in range(r - 1)]
        self.ok = np.ones(len(sl), dtype=bool)
        self.inside = np.zeros(len(sl), dtype=bool)

    def add(self, i):
        if not self.ok[i] or self.inside[i]:
            raise ValueError("element is not addable")
        F = self.sl.masks[i]
        old = [lv.copy() for lv in self.levels]
        for j in range(self.r - 2, -1, -1):
            parts = [old[j], F[None, :]]
            if j:
                parts.append(old[j - 1] & F)
            self.levels[j] = np.unique(np.concatenate(parts), axis=0)
        top_old = {m.tobytes() for m in old[-1]}
        fresh = [m for m in self.levels[-1] if m.tobytes() not in top_old]
        idx = np.flatnonzero(self.ok)
        for m in fresh:
            if not idx.size:
                break
            d = gfq.dims_from_sizes(gfq.mask_size(self.sl.masks[idx] & m), self.q)
            idx = idx[d >= self.t]
        self.ok[:] = False
        self.ok[idx] = True
        self.inside[i] = True
        self.members.append(i)

    def addable(self):
        return np.flatnonzero(self.ok & ~self.inside)

    def meet_dim(self):
        if not self.members:
            return self.sl.n
        m = np.bitwise_and.reduce(self.sl.masks[self.members], axis=0)
        return int(gfq.dims_from_sizes(gfq.mask_size(m[None, :]), self.q)[0])

    def family(self):
        return Family([self.sl[i] for i in self.members], self.sl.n, self.sl.k, self.sl.q)


def extend_maximal(state, order):
    """Greedily add elements in ``order`` until nothing more fits."""
    for i in order:
        if state.ok[i] and not state.inside[i]:
            state.add(int(i))
    # a single pass suffices: ok only shrinks, so skipped elements stay blocked
    return state


def is_maximal_rwise(f, r, t, budget=None):
    """One-step extension check against the whole slice."""
    sl = lattice.enumerate_slice(f.n, f.k, f.q, budget=budget)
    st = RwiseState(sl, r, t)
    for F in f:
        st.add(sl.index[F])
    return st.addable().size == 0


def rwise_constructions(n, k, t, r, q, budget=None):
    """The two extremal non-trivial shapes, where their anchors fit."""
    out = {}
    d = t + r - 2
    if 0 <= d <= k - 1 and k + 1 <= n:
        X, M = fm.anchor_chain(n, q, d, k + 1)
        out["A+M"] = fm.construct(fm.A(k, X, M), budget) | fm.construct(fm.M_full(k, M), budget)
    if t + r <= n and t + r - 1 <= k:
        (Z,) = fm.anchor_chain(n, q, t + r)
        out["D"] = fm.construct(fm.D(k, t + r - 1, Z), budget)
    return out


def identify_rwise(f, t, r):
    """Match a family against [M,k], A(k,t+r-1,X,M) | [M,k] or D(k,t+r-1,Z)."""
    if not len(f):
        return None
    n, q, k = f.n, f.q, f.k
    H = fm.hull(f)
    if H.dim == k + 1 and f == fm.construct(fm.M_full(k, H)):
        return "M_full"
    s = t + r - 1
    if s > k:
        return None
    for Z in vf.tau(f, s).covers:
        if Z.dim == t + r and f == fm.construct(fm.D(k, s, Z)):
            return "D"
    for M in _covers_of_dim(f, s, k + 1):
        rest = [F for F in f if not gfq.contains(M, F)]
        if not rest:
            continue
        X = gfq.meet(gfq.meet_all(rest), M)
        if X.dim != t + r - 2:
            continue
        cand = fm.construct(fm.A(k, X, M)) | fm.construct(fm.M_full(k, M))
        if f == cand:
            return "A+M"
    return None


def _covers_of_dim(f, s, dim):
    cand = vf._candidates(f, dim, s, lattice.DEFAULT_BUDGET)
    if not cand:
        return []
    cm = gfq.point_masks(cand, f.n, f.q)
    return [cand[i] for i in vf.meeting_all(cm, f.masks, s, f.q)]


def rwise_bounds(n, k, t, r, q):
    """Applicable bound and whether the parameters satisfy its hypotheses."""
    d = t + r - 2
    hyp = r >= 3 and d <= k - 2 and 2 * k + t + r + 2 <= n
    if d <= k / 2 - 1:
        return {"case": "i", "value": qcount.rwise_bound_i(k, n, t, r, q), "hypothesis": hyp}
    if d <= k - 2:
        return {"case": "ii", "value": qcount.rwise_bound_ii(k, n, t, r, q), "hypothesis": hyp}
    return {"case": None, "value": None, "hypothesis": False}


def _rwise_seeds(cfg, sl, rng):
    n, q, t, r = cfg.n, cfg.q, cfg.t, cfg.r
    k = cfg.ks[0]
    seeds = []
    if "all-t-covers" in cfg.strategies:
        for s in range(t + r - 1, min(t + r + 1, n) + 1):
            a = -(-(t + (r - 1) * s) // r)  # r members meeting T in >= a share >= t
            if a <= min(k, s):
                (T,) = fm.anchor_chain(n, q, s)
                seeds.append((f"cover:D(dim={s},a={a})", list(fm.construct(fm.D(k, a, T), cfg.budget))))
    if "construction-perturbation" in cfg.strategies:
        for name, fam in rwise_constructions(n, k, t, r, q, cfg.budget).items():
            seeds.append((f"construct:{name}", list(fam)))
            for i in range(cfg.perturbations):
                keep = [m for m in fam if rng.random() > 0.25]
                seeds.append((f"perturb:{name}:{i}", keep))
    if "random-members" in cfg.strategies:
        for i in range(cfg.random_seeds):
            seeds.append((f"random:{i}", None))
    return seeds


def _grow(cfg, sl, label, members, rng_seed):
    """Build a maximal family from a seed; None if it cannot become non-trivial."""
    rng = np.random.default_rng(rng_seed)
    st = RwiseState(sl, cfg.r, cfg.t)
    if members is None:
        # random chain whose meet keeps dropping until it falls below t
        st.add(int(rng.integers(len(sl))))
        while st.meet_dim() >= cfg.t:
            cand = st.addable()
            if not cand.size:
                return None
            cur = np.bitwise_and.reduce(sl.masks[st.members], axis=0)
            d = gfq.dims_from_sizes(gfq.mask_size(sl.masks[cand] & cur), sl.q)
            cur_dim = st.meet_dim()
            drop = cand[d < cur_dim]
            if not drop.size:
                return None
            st.add(int(drop[rng.integers(drop.size)]))
    else:
        for F in members:
            i = sl.index[F]
            if st.ok[i] and not st.inside[i]:
                st.add(i)
    extend_maximal(st, rng.permutation(len(sl)))
    return st.family()


def search_rwise(cfg):
    """Greedy maximal extension from seeds; keeps non-trivial families only."""
    if cfg.r < 3:
        raise ValueError("r-wise search needs r >= 3")
    n, q, t, r = cfg.n, cfg.q, cfg.t, cfg.r
    k = cfg.ks[0]
    sl = lattice.enumerate_slice(n, k, q, budget=cfg.budget)
    rng = np.random.default_rng(cfg.seed)
    seeds = _rwise_seeds(cfg, sl, rng)
    sub = rng.integers(2**32, size=len(seeds))

    def run(item):
        (label, members), s = item
        f = _grow(cfg, sl, label, members, int(s))
        if f is None or not len(f):
            return None
        if not vf.is_rwise_intersecting(f, r, t):
            raise AssertionError(f"search produced a family that is not {r}-wise from {label}")
        trivial = vf.is_trivial(f, t)
        return {
            "seed": label,
            "size": len(f),
            "trivial": trivial,
            "matched": None if trivial else identify_rwise(f, t, r),
            "family": f,
        }

    recs = [x for x in _map(run, list(zip(seeds, sub)), cfg.workers) if x is not None]
    bound = rwise_bounds(n, k, t, r, q)
    cons = {name: len(f) for name, f in rwise_constructions(n, k, t, r, q, cfg.budget).items()}
    violations = []
    nontriv = [x for x in recs if not x["trivial"]]
    for x in nontriv:
        if bound["hypothesis"] and x["size"] > bound["value"]:
            violations.append({"seed": x["seed"], "bound": bound["case"], "size": str(x["size"])})
        elif not bound["hypothesis"] and cons and x["size"] > max(cons.values()):
            violations.append({"seed": x["seed"], "bound": "construction", "size": str(x["size"])})
    public = [
        {"seed": x["seed"], "size": str(x["size"]), "trivial": x["trivial"], "matched": x["matched"]}
        for x in recs
    ]
    shown = {"construction:" + k_: v for k_, v in cons.items()}
    if bound["value"] is not None:
        shown["case-" + bound["case"]] = bound["value"]
    if not nontriv:
        return SearchResult((), 0, False, None, public, shown, violations, not bound["hypothesis"])
    best = max(nontriv, key=lambda x: (x["size"], _neg_key([x["family"]])))
    return SearchResult(
        (best["family"],),
        best["size"],
        False,
        best["matched"],
        public,
        shown,
        violations,
        not bound["hypothesis"],
    )


def rwise_nonexistence(n, k, t, r, q, budget=None):
    """Exhaustive test for non-trivial r-wise t-intersecting k-families.

    Any non-trivial family holds a chain F0, F1, ... whose running meet drops
    strictly at every step; its first r members would have to keep the meet at
    dimension >= t. The walk below follows every such chain, deduplicated by
    the running meet (continuations depend on nothing else), from a fixed F0
    (GL(n, q) is transitive on k-spaces). It returns the longest chain length
    that keeps the meet >= t; a family can exist only if that is >= r.
    """
    sl = lattice.enumerate_slice(n, k, q, budget=budget)
    front = sl.masks[:1]
    longest = 1
    states = 1
    while True:
        cur = gfq.dims_from_sizes(gfq.mask_size(front), q)
        nxt = []
        for m, dm in zip(front, cur):
            inter = sl.masks & m
            d = gfq.dims_from_sizes(gfq.mask_size(inter), q)
            sel = inter[(d < dm) & (d >= t)]
            if len(sel):
                nxt.append(np.unique(sel, axis=0))
        if not nxt:
            break
        front = np.unique(np.concatenate(nxt), axis=0)
        states += len(front)
        longest += 1
    return {"longest_chain": longest, "states": states, "exists_possible": longest >= r}


def stability_probe(cfg):
    """Check the pairwise (t+r-2)-intersecting property and, above the h2
    threshold, containment in some A(k,t+r-1,X,M') | [M',k]."""
    res = search_rwise(cfg)
    n, q, t, r = cfg.n, cfg.q, cfg.t, cfg.r
    k = cfg.ks[0]
    sl = lattice.enumerate_slice(n, k, q, budget=cfg.budget)
    rng = np.random.default_rng(cfg.seed)
    seeds = _rwise_seeds(cfg, sl, rng)
    sub = rng.integers(2**32, size=len(seeds))
    d = t + r - 2
    try:
        thresh = qcount.h2(d, k, n, q)
    except DomainViolation:
        thresh = None
    rows = []
    for (label, members), s in zip(seeds, sub):
        f = _grow(cfg, sl, label, members, int(s))
        if f is None or not len(f) or vf.is_trivial(f, t):
            continue
        pair_ok = bool(vf.is_rwise_intersecting(f, 2, d))
        above = thresh is not None and len(f) > thresh
        contained = None
        if above:
            contained = _inside_A_plus_M(f, t, r)
        rows.append(
            {
                "seed": label,
                "size": str(len(f)),
                "pairwise_ok": pair_ok,
                "above_h2": above,
                "contained": contained,
            }
        )
    return {
        "h2_threshold": None if thresh is None else str(thresh),
        "families": rows,
        "best_size": str(res.product),
        "coverage": "seeded",
    }


def _inside_A_plus_M(f, t, r):
    k = f.k
    for M in _covers_of_dim(f, t + r - 1, k + 1):
        rest = [F for F in f if not gfq.contains(M, F)]
        if not rest:
            return True
        if gfq.meet(gfq.meet_all(rest), M).dim >= t + r - 2:
            return True
    return False
