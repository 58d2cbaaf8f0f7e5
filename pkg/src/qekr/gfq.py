"""Finite fields F_q (q <= 9) and subspaces of F_q^n in canonical form.

Elements of F_q are the integers 0..q-1.  For q = p^e with e > 1 the integer
is read as a polynomial over F_p, base-p digit i being the coefficient of x^i,
reduced modulo a fixed irreducible polynomial.

A vector of F_q^n is packed into one integer ("code"), coordinate 0 being the
most significant base-q digit.  For q = 2 a code is therefore a bitmask and
vector addition is xor.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import AmbientMismatch, InvalidEntry, NotAPrimePower, UnsupportedOrder

SUPPORTED_ORDERS = (2, 3, 4, 5, 7, 8, 9)

# low-to-high coefficients: x^2+x+1, x^3+x+1, x^2+1
MODULI = {4: (1, 1, 1), 8: (1, 1, 0, 1), 9: (1, 0, 1)}


def _prime_power(q):
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    return (p, e) if r == 1 else None


def _poly_mulmod(a, b, p, modulus):
    """Multiply two elements given as digit lists, reduce by monic modulus."""
    e = len(modulus) - 1
    prod = [0] * (2 * e - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, e - 1, -1):
        c = prod[d]
        if c:
            for j in range(e + 1):
                prod[d - e + j] = (prod[d - e + j] - c * modulus[j]) % p
    return prod[:e]


def _digits(x, p, e):
    return [(x // p**i) % p for i in range(e)]


def _undigits(ds, p):
    return sum(d * p**i for i, d in enumerate(ds))


@dataclass(frozen=True)
class FieldDesc:
    q: int
    p: int
    e: int
    modulus: tuple
    add: tuple = field(repr=False, compare=False)
    mul: tuple = field(repr=False, compare=False)
    neg: tuple = field(repr=False, compare=False)
    inv: tuple = field(repr=False, compare=False)

    @property
    def add_table(self):
        return _np_tables(self.q)[0]

    @property
    def mul_table(self):
        return _np_tables(self.q)[1]

    def sub(self, a, b):
        return self.add[a][self.neg[b]]


@lru_cache(maxsize=None)
def field_make(q):
    """Return the field of order q.

    >>> field_make(4).mul[2][2]
    3
    """
    if not isinstance(q, (int, np.integer)):
        raise NotAPrimePower(f"q={q!r} is not an integer")
    q = int(q)
    pe = _prime_power(q)
    if pe is None:
        raise NotAPrimePower(f"q={q} is not a prime power")
    if q not in SUPPORTED_ORDERS:
        raise UnsupportedOrder(f"q={q} is not one of {SUPPORTED_ORDERS}")
    p, e = pe
    if e == 1:
        modulus = ()
        add = tuple(tuple((a + b) % p for b in range(q)) for a in range(q))
        mul = tuple(tuple((a * b) % p for b in range(q)) for a in range(q))
    else:
        modulus = MODULI[q]
        # deg <= 3: irreducible iff no root in F_p
        for x in range(p):
            assert sum(c * x**i for i, c in enumerate(modulus)) % p != 0
        digs = [_digits(a, p, e) for a in range(q)]
        add = tuple(
            tuple(_undigits([(x + y) % p for x, y in zip(digs[a], digs[b])], p) for b in range(q))
            for a in range(q)
        )
        mul = tuple(
            tuple(_undigits(_poly_mulmod(digs[a], digs[b], p, modulus), p) for b in range(q))
            for a in range(q)
        )
    neg = tuple(next(b for b in range(q) if add[a][b] == 0) for a in range(q))
    inv = (0,) + tuple(next(b for b in range(q) if mul[a][b] == 1) for a in range(1, q))
    return FieldDesc(q, p, e, modulus, add, mul, neg, inv)


@lru_cache(maxsize=None)
def _np_tables(q):
    f = field_make(q)
    return np.array(f.add, dtype=np.int64), np.array(f.mul, dtype=np.int64)


# ---------------------------------------------------------------------------
# vectors


def pack(digits, q):
    code = 0
    for x in digits:
        code = code * q + x
    return code


def unpack(code, n, q):
    out = [0] * n
    for j in range(n - 1, -1, -1):
        code, out[j] = divmod(code, q)
    return out


def vec_lincomb(coeffs, codes, n, q):
    """sum(c_i * v_i) for packed vectors v_i."""
    if q == 2:
        acc = 0
        for c, v in zip(coeffs, codes):
            if c:
                acc ^= v
        return acc
    f = field_make(q)
    acc = [0] * n
    for c, v in zip(coeffs, codes):
        if c:
            for j, x in enumerate(unpack(v, n, q)):
                if x:
                    acc[j] = f.add[acc[j]][f.mul[c][x]]
    return pack(acc, q)


# ---------------------------------------------------------------------------
# row reduction


def _rref_gf2(codes, n):
    rows = [c for c in codes if c]
    pivots = []
    r = 0
    for col in range(n):
        bit = 1 << (n - 1 - col)
        sel = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= pr
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def _rref_lists(rows, n, f):
    rows = [list(r) for r in rows]
    add, mul, neg, inv = f.add, f.mul, f.neg, f.inv
    pivots = []
    r = 0
    for col in range(n):
        sel = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        s = inv[rows[r][col]]
        if s != 1:
            rows[r] = [mul[s][x] for x in rows[r]]
        pr = rows[r]
        for i in range(len(rows)):
            c = rows[i][col]
            if i != r and c:
                m = neg[c]
                rows[i] = [add[x][mul[m][y]] for x, y in zip(rows[i], pr)]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rref(m, f):
    """Reduced row echelon form of a matrix over f.

    ``m`` is a sequence of rows (each a sequence of field elements).  Returns
    ``(canonical_rows, rank, pivots)``; the zero rows are dropped.
    """
    rows = [list(map(int, r)) for r in m]
    if not rows:
        return [], 0, []
    n = len(rows[0])
    for r in rows:
        if len(r) != n:
            raise InvalidEntry("ragged matrix")
        for x in r:
            if not 0 <= x < f.q:
                raise InvalidEntry(f"entry {x} not in F_{f.q}")
    if f.q == 2:
        codes, piv = _rref_gf2([pack(r, 2) for r in rows], n)
        canon = [unpack(c, n, 2) for c in codes]
    else:
        canon, piv = _rref_lists(rows, n, f)
    return canon, len(canon), piv


def rref_codes(codes, n, q):
    """Row reduce packed vectors; returns (rows, pivots) with rows packed."""
    if q == 2:
        return _rref_gf2(codes, n)
    rows, piv = _rref_lists([unpack(c, n, q) for c in codes if c], n, field_make(q))
    return [pack(r, q) for r in rows], piv


def rank_codes(codes, n, q):
    return len(rref_codes(codes, n, q)[0])


# ---------------------------------------------------------------------------
# subspaces


class Subspace:
    """A subspace of F_q^n stored by its canonical (RREF) basis.

    ``rows`` are packed basis vectors in pivot order.  Equality, hashing and
    ordering all go through the canonical basis.
    """

    __slots__ = ("q", "n", "rows", "pivots")

    def __init__(self, q, n, rows, pivots):
        self.q = q
        self.n = n
        self.rows = tuple(rows)
        self.pivots = tuple(pivots)

    @classmethod
    def span(cls, vectors, n, q):
        """Span of vectors given as packed codes or digit sequences."""
        field_make(q)
        codes = []
        for v in vectors:
            if isinstance(v, (int, np.integer)):
                if not 0 <= v < q**n:
                    raise InvalidEntry(f"vector code {v} out of range for F_{q}^{n}")
                codes.append(int(v))
            else:
                v = list(v)
                if len(v) != n or any(not 0 <= x < q for x in v):
                    raise InvalidEntry(f"bad vector {v} for F_{q}^{n}")
                codes.append(pack(v, q))
        rows, piv = rref_codes(codes, n, q)
        return cls(q, n, rows, piv)

    @property
    def dim(self):
        return len(self.rows)

    @property
    def key(self):
        return (self.pivots, self.rows)

    def basis(self):
        return [unpack(r, self.n, self.q) for r in self.rows]

    def points(self):
        """All vectors of the subspace as packed codes."""
        pts = [0]
        if self.q == 2:
            for r in self.rows:
                pts += [x ^ r for x in pts]
            return pts
        for r in self.rows:
            multiples = [vec_lincomb([c], [r], self.n, self.q) for c in range(1, self.q)]
            pts = pts + [vec_lincomb([1, 1], [x, m], self.n, self.q) for m in multiples for x in pts]
        return pts

    def __contains__(self, vec):
        code = vec if isinstance(vec, (int, np.integer)) else pack(vec, self.q)
        return rank_codes(list(self.rows) + [int(code)], self.n, self.q) == self.dim

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.q == other.q and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.q, self.n, self.rows))

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        body = ",".join("".join(map(str, r)) for r in self.basis())
        return f"Subspace(q={self.q}, n={self.n}, dim={self.dim}, [{body}])"


def zero(n, q):
    return Subspace(q, n, (), ())


def full(n, q):
    return coordinate(range(n), n, q)


def coordinate(indices, n, q):
    """Span of the standard basis vectors e_i, i in indices (0-based)."""
    idx = sorted(set(indices))
    return Subspace(q, n, [q ** (n - 1 - i) for i in idx], idx)


def _same_ambient(a, b):
    if a.n != b.n or a.q != b.q:
        raise AmbientMismatch(f"F_{a.q}^{a.n} vs F_{b.q}^{b.n}")


def join(a, b):
    _same_ambient(a, b)
    rows, piv = rref_codes(list(a.rows) + list(b.rows), a.n, a.q)
    return Subspace(a.q, a.n, rows, piv)


def dim_meet(a, b):
    _same_ambient(a, b)
    return a.dim + b.dim - rank_codes(list(a.rows) + list(b.rows), a.n, a.q)


def contains(a, b):
    """True iff b is a subspace of a."""
    return dim_meet(a, b) == b.dim


def meet(a, b):
    """Intersection of two subspaces (Zassenhaus)."""
    _same_ambient(a, b)
    n, q = a.n, a.q
    shift = q**n
    stacked = [r * shift + r for r in a.rows] + [r * shift for r in b.rows]
    rows, _ = rref_codes(stacked, 2 * n, q)
    inter = [r for r in rows if r < shift]
    return Subspace.span(inter, n, q)


def meet_all(subs):
    subs = list(subs)
    acc = subs[0]
    for s in subs[1:]:
        acc = meet(acc, s)
    return acc


def join_all(subs):
    subs = list(subs)
    rows, piv = rref_codes([r for s in subs for r in s.rows], subs[0].n, subs[0].q)
    return Subspace(subs[0].q, subs[0].n, rows, piv)


def complement_basis(a, c):
    """Packed vectors w_1..w_m with c = a (+) span(w); requires a inside c."""
    basis = list(a.rows)
    out = []
    for r in c.rows:
        if rank_codes(basis + [r], c.n, c.q) > len(basis):
            basis.append(r)
            out.append(r)
    return out


# ---------------------------------------------------------------------------
# point-set bitmasks: bit v is set iff vector code v lies in the subspace


def mask_words(n, q):
    return (q**n + 63) // 64


def point_codes(rows, n, q):
    """Point codes for many subspaces of a common dimension k.

    ``rows`` is an (N, k) integer array of packed basis rows; the result is
    an (N, q^k) array.
    """
    rows = np.asarray(rows, dtype=np.int64)
    N, k = rows.shape
    if q == 2:
        pts = np.zeros((N, 1), dtype=np.int64)
        for i in range(k):
            pts = np.concatenate([pts, pts ^ rows[:, i : i + 1]], axis=1)
        return pts
    add, mul = _np_tables(q)
    weights = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    digits = (rows[:, :, None] // weights) % q  # (N, k, n)
    pts = np.zeros((N, 1, n), dtype=np.int64)
    for i in range(k):
        row = digits[:, i, :]
        pts = np.concatenate([add[pts, mul[c][row][:, None, :]] for c in range(q)], axis=1)
    return pts @ weights


def point_masks(subs, n, q, chunk=20000):
    """(len(subs), W) uint64 array of point-set bitmasks."""
    W = mask_words(n, q)
    out = np.zeros((len(subs), W), dtype=np.uint64)
    by_dim = {}
    for i, s in enumerate(subs):
        by_dim.setdefault(s.dim, []).append(i)
    for k, idx in by_dim.items():
        idx = np.array(idx)
        for lo in range(0, len(idx), chunk):
            part = idx[lo : lo + chunk]
            if k == 0:
                codes = np.zeros((len(part), 1), dtype=np.int64)
            else:
                codes = point_codes([subs[i].rows for i in part], n, q)
            P = codes.shape[1]
            block = np.zeros((len(part), W), dtype=np.uint64)
            sel = np.repeat(np.arange(len(part)), P)
            bits = np.left_shift(np.uint64(1), (codes & 63).astype(np.uint64)).ravel()
            np.bitwise_or.at(block, (sel, (codes >> 6).ravel()), bits)
            out[part] = block
    return out


def mask_size(masks):
    """Number of points in each mask (last axis summed)."""
    return np.bitwise_count(masks).sum(axis=-1, dtype=np.int64)


@lru_cache(maxsize=None)
def _log_table(q, n):
    return {q**d: d for d in range(n + 1)}


def dims_from_sizes(sizes, q):
    """Convert point counts q^d back to dimensions d."""
    sizes = np.asarray(sizes, dtype=np.int64)
    out = np.zeros(sizes.shape, dtype=np.int64)
    p = 1
    d = 0
    while True:
        p *= q
        d += 1
        ge = sizes >= p
        if not ge.any():
            break
        out[ge] = d
    return out


def iter_rref(n, k, q):
    """Yield canonical packed bases of all k-subspaces of F_q^n.

    Order: pivot sets lexicographically, then free entries in row-major order
    (row 0 most significant), which sorts the bases by ``Subspace.key``.
    """
    from itertools import combinations

    for piv in combinations(range(n), k):
        pivset = set(piv)
        base = [q ** (n - 1 - p) for p in piv]
        slots = []  # (row, weight) for each free entry, row-major
        for i, p in enumerate(piv):
            for j in range(p + 1, n):
                if j not in pivset:
                    slots.append((i, q ** (n - 1 - j)))
        if not slots:
            yield piv, tuple(base)
            continue
        for vals in product(range(q), repeat=len(slots)):
            rows = list(base)
            for (i, w), v in zip(slots, vals):
                if v:
                    rows[i] += v * w
            yield piv, tuple(rows)
