"""Intersection properties, triviality, t-covering numbers and maximal closure.

Everything here works on point masks: a subspace of F_q^n is stored as the
bitset of its q^n vectors, so an intersection is a bitwise AND and its
dimension is log_q of the popcount.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import gfq, lattice, qcount
from .errors import AmbientMismatch, BudgetExceeded, EmptyFamily, NotMaximal
from .families import Family

CHECK_BUDGET = 50_000_000


class Witness(NamedTuple):
    members: tuple
    dim: int

    def as_dict(self):
        return {"members": [list(map(str, m.rows)) for m in self.members], "dim": str(self.dim)}


class CheckResult(NamedTuple):
    holds: bool
    witness: object = None
    sampled: bool = False

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class CoverResult:
    tau: int
    covers: tuple
    t: int


def _ambient(fams):
    n, q = fams[0].n, fams[0].q
    for f in fams:
        if (f.n, f.q) != (n, q):
            raise AmbientMismatch("families live in different ambient spaces")
    return n, q


def _dims(masks, q):
    return gfq.dims_from_sizes(gfq.mask_size(masks), q)


def _witness(fams, idx):
    members = tuple(fams[i][j] for i, j in enumerate(idx))
    distinct = tuple(sorted(set(members)))
    return Witness(distinct, gfq.meet_all(distinct).dim)


def _frontier_check(fams, t, budget):
    """Exact transversal check.

    Walks the families in order keeping only the distinct partial meets (with
    one representative index tuple each), so repeated meets are tested once.
    Returns a violating index tuple or None.
    """
    q = fams[0].q
    front = fams[0].masks
    reps = [(i,) for i in range(len(fams[0]))]
    d0 = _dims(front, q)
    bad = np.flatnonzero(d0 < t)
    if bad.size:
        return reps[bad[0]]
    front, first = np.unique(front, axis=0, return_index=True)
    reps = [reps[i] for i in first]
    work = 0
    last = len(fams) - 1
    for level in range(1, len(fams)):
        ms = fams[level].masks
        new_masks, new_reps = [], []
        for j in range(len(front)):
            work += len(ms)
            if work > budget:
                raise BudgetExceeded("transversal check", work, budget)
            inter = front[j] & ms
            d = _dims(inter, q)
            bad = np.flatnonzero(d < t)
            if bad.size:
                return reps[j] + (int(bad[0]),)
            if level < last:
                u, first = np.unique(inter, axis=0, return_index=True)
                new_masks.append(u)
                new_reps.extend(reps[j] + (int(i),) for i in first)
        if level < last:
            allm = np.concatenate(new_masks)
            front, first = np.unique(allm, axis=0, return_index=True)
            reps = [new_reps[i] for i in first]
    return None


def _sampled_check(fams, t, samples, seed):
    rng = np.random.default_rng(seed)
    q = fams[0].q
    for _ in range(samples):
        idx = tuple(int(rng.integers(len(f))) for f in fams)
        m = fams[0].masks[idx[0]]
        for i in range(1, len(fams)):
            m = m & fams[i].masks[idx[i]]
        if _dims(m[None, :], q)[0] < t:
            return idx
    return None


def is_cross_intersecting(fams, t, budget=None, sample=None, seed=0):
    """Do all transversal tuples of ``fams`` meet in dimension >= t?

    With ``sample`` set, a budget overrun falls back to that many seeded random
    tuples and the result is flagged ``sampled`` (not a proof).
    """
    fams = list(fams)
    if len(fams) < 2:
        raise ValueError("need at least two families")
    _ambient(fams)
    if any(len(f) == 0 for f in fams):
        return CheckResult(True)
    budget = CHECK_BUDGET if budget is None else budget
    try:
        idx = _frontier_check(fams, t, budget)
        sampled = False
    except BudgetExceeded:
        if sample is None:
            raise
        idx = _sampled_check(fams, t, sample, seed)
        sampled = True
    if idx is None:
        return CheckResult(True, None, sampled)
    return CheckResult(False, _witness(fams, idx), sampled)


def is_rwise_intersecting(f, r, t, budget=None, sample=None, seed=0):
    """r-wise check with repetition allowed.

    Feeding the same family r times into the transversal walk covers every
    multiset; the partial-meet dedup collapses repeats to distinct supports.
    """
    if r < 2:
        raise ValueError("r must be at least 2")
    return is_cross_intersecting([f] * r, t, budget, sample, seed)


def global_meet_dim(fams):
    if isinstance(fams, Family):
        fams = [fams]
    if not fams or any(len(f) == 0 for f in fams):
        raise EmptyFamily("triviality needs non-empty families")
    _ambient(fams)
    m = np.bitwise_and.reduce(np.concatenate([f.masks for f in fams]), axis=0)
    return int(_dims(m[None, :], fams[0].q)[0])


def is_trivial(fams, t):
    """True when every member of every family contains a common t-space."""
    return global_meet_dim(fams) >= t


# ---------------------------------------------------------------------------
# covers


def meeting_all(cand_masks, member_masks, t, q):
    """Indices of candidates meeting every member in dimension >= t."""
    idx = np.arange(len(cand_masks))
    for m in member_masks:
        if not idx.size:
            break
        d = _dims(cand_masks[idx] & m, q)
        idx = idx[d >= t]
    return idx


def is_cover(T, f, t):
    m = gfq.point_masks([T], f.n, f.q)
    return bool(meeting_all(m, f.masks, t, f.q).size)


def _candidates(f, s, t, budget):
    """s-spaces containing some t-subspace of the first member.

    Any t-cover T meets that member F0 in a t-space, so T contains a
    t-subspace of F0; nothing else needs to be tried.
    """
    F0 = f[0]
    V = gfq.full(f.n, f.q)
    count = qcount.gauss_binom(F0.dim, t, f.q) * qcount.gauss_binom(f.n - t, s - t, f.q)
    if count > budget:
        raise BudgetExceeded(f"cover candidates of dim {s}", count, budget)
    out = set()
    for H in lattice.enumerate_between(gfq.zero(f.n, f.q), F0, t):
        out.update(lattice.enumerate_between(H, V, s))
    return sorted(out)


def tau(f, t, method="cover", budget=None):
    """Exact t-covering number with every minimum cover.

    ``method="scan"`` tests the whole s-slice instead; both must agree.
    """
    if len(f) == 0:
        raise EmptyFamily("tau of an empty family")
    budget = lattice.DEFAULT_BUDGET if budget is None else budget
    for s in range(t, f.n + 1):
        if method == "cover":
            cand = _candidates(f, s, t, budget)
        elif method == "scan":
            cand = lattice.enumerate_slice(f.n, s, f.q, budget=budget).elements
        else:
            raise ValueError(f"unknown tau method {method!r}")
        if not cand:
            continue
        cm = gfq.point_masks(cand, f.n, f.q)
        hit = meeting_all(cm, f.masks, t, f.q)
        if hit.size:
            return CoverResult(s, tuple(cand[i] for i in hit), t)
    # only reachable when members have dimension < t
    return CoverResult(f.n + 1, (), t)


# ---------------------------------------------------------------------------
# closure


def partner_closure(f, partner_dim, t, budget=None):
    """All partner_dim-spaces meeting every member of f in dimension >= t."""
    sl = lattice.enumerate_slice(f.n, partner_dim, f.q, budget=budget)
    idx = meeting_all(sl.masks, f.masks, t, f.q)
    out = Family([sl.elements[i] for i in idx], f.n, partner_dim, f.q)
    return out


def _distinct_meets(fams):
    """Distinct meet masks over transversals of ``fams`` (deduplicated per level)."""
    front = np.unique(fams[0].masks, axis=0)
    for f in fams[1:]:
        parts = [np.unique(row & f.masks, axis=0) for row in front]
        front = np.unique(np.concatenate(parts), axis=0)
    return front


class Closure(NamedTuple):
    families: tuple
    rounds: int
    converged: bool


def close_families(fams, t, max_rounds=50, budget=None):
    """Coordinate-wise partner closure iterated to a fixed point.

    For two families this converges after at most two rounds since P(P(P(F)))
    = P(F). For three or more it may cycle; that is reported, not hidden.
    """
    fams = list(fams)
    n, q = _ambient(fams)
    for rnd in range(1, max_rounds + 1):
        changed = False
        for i in range(len(fams)):
            others = fams[:i] + fams[i + 1 :]
            if any(len(o) == 0 for o in others):
                sl = lattice.enumerate_slice(n, fams[i].k, q, budget=budget)
                new = Family(sl.elements, n, fams[i].k, q)
            elif len(others) == 1:
                new = partner_closure(others[0], fams[i].k, t, budget)
            else:
                sl = lattice.enumerate_slice(n, fams[i].k, q, budget=budget)
                idx = meeting_all(sl.masks, _distinct_meets(others), t, q)
                new = Family([sl.elements[j] for j in idx], n, fams[i].k, q)
            if new != fams[i]:
                fams[i] = new
                changed = True
        if not changed:
            return Closure(tuple(fams), rnd, True)
    return Closure(tuple(fams), max_rounds, False)


def mincover_cross_check(f1, f2, t, budget=None):
    """Minimum t-covers of a maximal cross pair are themselves cross t-intersecting."""
    closed = close_families([f1, f2], t, budget=budget)
    if closed.families != (f1, f2):
        raise NotMaximal("partner closure enlarges the pair")
    c1 = tau(f1, t, budget=budget).covers
    c2 = tau(f2, t, budget=budget).covers
    if not c1 or not c2:
        return CheckResult(True)
    a = Family(c1)
    b = Family(c2)
    return is_cross_intersecting([a, b], t, budget)


# ---------------------------------------------------------------------------
# size bounds derived from covers


def cover_bounds(k, l, n, t, m_k, m_l, q):
    """Upper bounds on |F| for a maximal cross pair F (k-spaces), G (l-spaces)
    with tau_t(F) = m_k and tau_t(G) = m_l. Returns a dict of named bounds."""
    gb = qcount.gauss_binom
    base = gb(m_k, t, q) * gb(n - t, k - t, q)
    out = {"base": base}
    if m_l == t + 1:
        out["i"] = gb(m_k, t, q) * qcount.qint(l - t + 1, q) * gb(n - t - 1, k - t - 1, q)
    elif m_l >= t + 2:
        out["ii"] = (
            gb(m_k, t, q)
            * qcount.qint(l, q) ** (m_l - t - 2)
            * qcount.qint(l - t + 1, q) ** 2
            * gb(n - m_l, k - m_l, q)
        )
    return out


def fs_bound(l, r, s, t, n, k, q):
    """Bound on the members containing an s-space S with dim(S & G) = r < t."""
    gb = qcount.gauss_binom
    return gb(l - r, t - r, q) * gb(n - s - t + r, k - s - t + r, q)


def members_containing(f, S):
    return Family([F for F in f if gfq.contains(F, S)], f.n, f.k, f.q)
