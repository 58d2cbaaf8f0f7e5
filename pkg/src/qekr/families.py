"""Named families of subspaces: membership predicates, enumeration, sizes.

Constructions (V is the ambient space, d = dim X):

    A(k, X, M)     k-spaces F with X <= F and dim(F & M) >= d + 1
    B(l, X, M)     l-spaces containing X, together with all l-subspaces of M
    C(k, T)        k-spaces containing T
    D(l, s, T)     l-spaces F with dim(F & T) >= s
    E1(k, X, M)    same shape as A with dim M = k
    E2(k, X, M, C) k-spaces with F & M = X and dim(F & C) = dim C - k + d
    E3(k, X, M, C) k-subspaces of C with dim(F & X) = d - 1, dim(F & M) = k - 1
    H2(k, X, M, C) E1 | E2 | E3
    M_full(k, M)   all k-subspaces of M
"""
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gfq, lattice, qcount
from .errors import AnchorViolation, BudgetExceeded, EmptyFamily, NoFormula
from .gfq import Subspace


class Family:
    """A finite set of equal-dimension subspaces, kept sorted."""

    def __init__(self, members, n=None, k=None, q=None):
        members = tuple(sorted(set(members)))
        if members:
            n, q = members[0].n, members[0].q
            k = members[0].dim if k is None else k
            for m in members:
                if (m.n, m.q, m.dim) != (n, q, k):
                    raise ValueError("family members must share ambient space and dimension")
        elif None in (n, k, q):
            raise ValueError("an empty family needs explicit n, k, q")
        self.n, self.k, self.q = n, k, q
        self.members = members
        self._masks = None
        self._set = None

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def __contains__(self, s):
        if self._set is None:
            self._set = frozenset(self.members)
        return s in self._set

    def __eq__(self, other):
        if not isinstance(other, Family):
            return NotImplemented
        return (self.n, self.k, self.q, self.members) == (other.n, other.k, other.q, other.members)

    def __hash__(self):
        return hash((self.n, self.k, self.q, self.members))

    def __or__(self, other):
        return Family(self.members + other.members, self.n, self.k, self.q)

    def __le__(self, other):
        return all(m in other for m in self.members)

    def __repr__(self):
        return f"Family(q={self.q}, n={self.n}, k={self.k}, size={len(self)})"

    @property
    def masks(self):
        if self._masks is None:
            self._masks = gfq.point_masks(self.members, self.n, self.q)
            self._masks.setflags(write=False)
        return self._masks

    def key(self):
        """Serialisation used for deterministic tie-breaking."""
        return tuple(m.rows for m in self.members)

    @classmethod
    def from_slice(cls, sl, selector):
        fam = cls([sl.elements[i] for i in np.flatnonzero(selector)], sl.n, sl.k, sl.q)
        return fam


@dataclass
class ConstructionSpec:
    name: str
    k: int
    anchors: dict
    params: dict = field(default_factory=dict)

    @property
    def ambient(self):
        a = next(iter(self.anchors.values()))
        return a.n, a.q

    def describe(self):
        dims = ",".join(f"{k}:{v.dim}" for k, v in self.anchors.items())
        extra = "".join(f",{k}={v}" for k, v in self.params.items())
        return f"{self.name}(k={self.k}{extra};{dims})"


NAMES = ("A", "B", "C", "D", "E1", "E2", "E3", "H2", "M_full")


def A(k, X, M):
    return ConstructionSpec("A", k, {"X": X, "M": M})


def B(l, X, M):
    return ConstructionSpec("B", l, {"X": X, "M": M})


def C(k, T):
    return ConstructionSpec("C", k, {"T": T})


def D(l, s, T):
    return ConstructionSpec("D", l, {"T": T}, {"s": s})


def E1(k, X, M):
    return ConstructionSpec("E1", k, {"X": X, "M": M})


def E2(k, X, M, C):
    return ConstructionSpec("E2", k, {"X": X, "M": M, "C": C})


def E3(k, X, M, C):
    return ConstructionSpec("E3", k, {"X": X, "M": M, "C": C})


def H2(k, X, M, C):
    return ConstructionSpec("H2", k, {"X": X, "M": M, "C": C})


def M_full(k, M):
    return ConstructionSpec("M_full", k, {"M": M})


def anchor_chain(n, q, *dims):
    """Nested coordinate subspaces span(e_1..e_d) for each d in dims."""
    return [gfq.coordinate(range(d), n, q) for d in dims]


# ---------------------------------------------------------------------------
# validation and predicates


def _need(cond, msg):
    if not cond:
        raise AnchorViolation(msg)


def validate(spec):
    if spec.name not in NAMES:
        raise AnchorViolation(f"unknown construction {spec.name!r}")
    anchors = spec.anchors
    n, q = spec.ambient
    for a in anchors.values():
        _need((a.n, a.q) == (n, q), "anchors live in different ambient spaces")
    k = spec.k
    _need(0 <= k <= n, f"member dimension {k} outside [0, {n}]")
    name = spec.name
    if name in ("A", "B"):
        X, M = anchors["X"], anchors["M"]
        _need(gfq.contains(M, X), "X must lie in M")
        _need(k >= X.dim, "members must be able to contain X")
        if name == "B":
            _need(M.dim == k + 1, f"B needs dim M = l + 1 = {k + 1}, got {M.dim}")
    elif name == "D":
        s = spec.params["s"]
        _need(0 <= s <= anchors["T"].dim, "D needs 0 <= s <= dim T")
    elif name in ("E1", "E2", "E3", "H2"):
        X, M = anchors["X"], anchors["M"]
        _need(gfq.contains(M, X), "X must lie in M")
        _need(M.dim == k, f"dim M must equal k = {k}")
        if name != "E1":
            Cs = anchors["C"]
            _need(gfq.contains(Cs, M), "M must lie in C")
            # outside this range the E-parts overlap and the size formulas break
            _need(n >= 2 * k and X.dim >= 1, "H2-type families need n >= 2k and dim X >= 1")
            c = Cs.dim
            _need(
                k + 1 <= c <= 2 * k - X.dim or c == n,
                f"dim C must lie in [k+1, 2k-d] or equal n, got {c}",
            )
    elif name == "M_full":
        _need(k <= anchors["M"].dim, "k exceeds dim M")


def _constraints(spec):
    """(source, [(anchor, relation, value), ...]) for vectorised filtering."""
    n, q = spec.ambient
    a = spec.anchors
    V = gfq.full(n, q)
    O = gfq.zero(n, q)
    k = spec.k
    name = spec.name
    if name in ("A", "E1"):
        d = a["X"].dim
        return [(a["X"], V)], [(a["M"], ">=", d + 1)]
    if name == "B":
        return [(a["X"], V), (O, a["M"])], []
    if name == "C":
        return [(a["T"], V)], []
    if name == "D":
        return [None], [(a["T"], ">=", spec.params["s"])]
    if name == "E2":
        d, c = a["X"].dim, a["C"].dim
        return [(a["X"], V)], [(a["M"], "==", d), (a["C"], "==", c - k + d)]
    if name == "E3":
        d = a["X"].dim
        return [(O, a["C"])], [(a["X"], "==", d - 1), (a["M"], "==", k - 1)]
    if name == "M_full":
        return [(O, a["M"])], []
    raise AnchorViolation(f"no direct enumeration for {name}")


def _relation(dims, rel, v):
    return dims >= v if rel == ">=" else dims == v


def accepts(spec, F):
    """Membership predicate, evaluated straight from the definition."""
    if F.dim != spec.k:
        return False
    a = spec.anchors
    dm = gfq.dim_meet
    name = spec.name
    if name in ("A", "E1"):
        return gfq.contains(F, a["X"]) and dm(F, a["M"]) >= a["X"].dim + 1
    if name == "B":
        return gfq.contains(F, a["X"]) or gfq.contains(a["M"], F)
    if name == "C":
        return gfq.contains(F, a["T"])
    if name == "D":
        return dm(F, a["T"]) >= spec.params["s"]
    if name == "E2":
        d, c = a["X"].dim, a["C"].dim
        return gfq.meet(F, a["M"]) == a["X"] and dm(F, a["C"]) == c - spec.k + d
    if name == "E3":
        return (
            gfq.contains(a["C"], F)
            and dm(F, a["X"]) == a["X"].dim - 1
            and dm(F, a["M"]) == spec.k - 1
        )
    if name == "H2":
        return any(accepts(_part(spec, p), F) for p in ("E1", "E2", "E3"))
    if name == "M_full":
        return gfq.contains(a["M"], F)
    raise AnchorViolation(spec.name)


def _part(spec, name):
    keys = ("X", "M") if name == "E1" else ("X", "M", "C")
    return ConstructionSpec(name, spec.k, {key: spec.anchors[key] for key in keys})


def _source_size(src, k, n, q):
    if src is None:
        return qcount.gauss_binom(n, k, q)
    lo, hi = src
    if not lo.dim <= k <= hi.dim:
        return 0
    return lattice.count_between(lo, hi, k)


def construct(spec, budget=None):
    """Enumerate a construction as a :class:`Family`."""
    validate(spec)
    n, q = spec.ambient
    k = spec.k
    if spec.name == "H2":
        out = Family([], n, k, q)
        for p in ("E1", "E2", "E3"):
            out = out | construct(_part(spec, p), budget)
        return out
    sources, cons = _constraints(spec)
    budget = lattice.DEFAULT_BUDGET if budget is None else budget
    total = sum(_source_size(s, k, n, q) for s in sources)
    if total > budget:
        raise BudgetExceeded(f"construct {spec.describe()}", total, budget)
    if sources == [None]:
        sl = lattice.enumerate_slice(n, k, q, budget=budget)
        cand, masks = sl.elements, sl.masks
    else:
        cand = []
        for lo, hi in sources:
            if lo.dim <= k <= hi.dim:
                cand.extend(lattice.enumerate_between(lo, hi, k))
        masks = gfq.point_masks(cand, n, q) if cons else None
    keep = np.ones(len(cand), dtype=bool)
    for anchor, rel, v in cons:
        am = gfq.point_masks([anchor], n, q)[0]
        dims = gfq.dims_from_sizes(gfq.mask_size(masks & am), q)
        keep &= _relation(dims, rel, v)
    return Family([c for c, ok in zip(cand, keep) if ok], n, k, q)


# ---------------------------------------------------------------------------
# sizes


@dataclass
class SizeReport:
    spec: str
    formula_name: str
    enumerated: int
    formula: int

    @property
    def match(self):
        return self.enumerated == self.formula


def size_formula(spec):
    """(formula name, value) for a construction with a closed-form size."""
    validate(spec)
    n, q = spec.ambient
    a = spec.anchors
    k = spec.k
    name = spec.name
    if name in ("A", "E1"):
        t, l = a["X"].dim, a["M"].dim - 1
        return "g1", qcount.g1(k, l, n, t, q)
    if name == "B":
        return "g2", qcount.g2(k, n, a["X"].dim, q)
    if name == "C":
        return "[n-dim T, k-dim T]", qcount.size_C(k, a["T"].dim, n, q)
    if name == "D":
        s = spec.params["s"]
        if a["T"].dim == s + 1:
            return "|D| (dim T = s+1)", qcount.size_D_plus_one(k, s, n, q)
    if name == "H2":
        d, c = a["X"].dim, a["C"].dim
        if c == k + 1:
            return "h1", qcount.h1(d, k, n, q)
        if c == n:
            return "h2", qcount.h2(d, k, n, q)
    if name == "M_full":
        return "[dim M, k]", qcount.gauss_binom(a["M"].dim, k, q)
    raise NoFormula(f"no closed-form size for {spec.describe()}")


def size_check(spec, budget=None):
    """Compare an enumerated size against its formula.

    A pair ``(C(k, T), D(l, t, T))`` with dim T = t + 1 is checked against g3
    through the product of the two sizes.
    """
    if isinstance(spec, tuple):
        cs, ds = spec
        if cs.name != "C" or ds.name != "D" or cs.anchors["T"] != ds.anchors["T"]:
            raise NoFormula("product check needs (C(k, T), D(l, t, T)) on one T")
        t = ds.params["s"]
        n, q = cs.ambient
        if cs.anchors["T"].dim != t + 1:
            raise NoFormula("g3 needs dim T = t + 1")
        enumerated = len(construct(cs, budget)) * len(construct(ds, budget))
        val = qcount.g3(cs.k, ds.k, n, t, q)
        return SizeReport(f"{cs.describe()}*{ds.describe()}", "g3", enumerated, val)
    fname, val = size_formula(spec)
    return SizeReport(spec.describe(), fname, len(construct(spec, budget)), val)


def hull(f):
    """Smallest subspace containing every member."""
    if len(f) == 0:
        raise EmptyFamily("hull of an empty family")
    return gfq.join_all(f.members)


# ---------------------------------------------------------------------------
# persistence: lattice cache body plus a key=value sidecar


def save_family(f, path, spec=None):
    path = Path(path)
    path.write_bytes(lattice.encode_elements(f.members, f.n, f.k, f.q))
    lines = [f"n={f.n}", f"k={f.k}", f"q={f.q}", f"size={len(f)}"]
    if spec is not None:
        lines.append(f"name={spec.name}")
        for key, val in spec.params.items():
            lines.append(f"param.{key}={val}")
        for key, sub in spec.anchors.items():
            lines.append(f"anchor.{key}=" + ",".join(map(str, sub.rows)))
    Path(str(path) + ".spec").write_text("\n".join(lines) + "\n")
    return path


def load_family(path):
    """Returns (family, spec or None)."""
    path = Path(path)
    n, k, q, elems = lattice.decode_elements(path.read_bytes())
    fam = Family(elems, n, k, q)
    side = Path(str(path) + ".spec")
    spec = None
    if side.exists():
        rec = dict(line.split("=", 1) for line in side.read_text().splitlines() if line)
        if "name" in rec:
            anchors = {}
            params = {}
            for key, val in rec.items():
                if key.startswith("anchor."):
                    codes = [int(c) for c in val.split(",") if c]
                    anchors[key[7:]] = Subspace.span(codes, n, q)
                elif key.startswith("param."):
                    params[key[6:]] = int(val)
            spec = ConstructionSpec(rec["name"], k, anchors, params)
    return fam, spec
