"""Enumeration of the subspace lattice of F_q^n, plus an on-disk slice cache."""
import hashlib
import os
import struct
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import gfq
from .errors import (
    BudgetExceeded,
    ChecksumMismatch,
    IoFailure,
    NotNested,
    VersionMismatch,
)
from .gfq import Subspace
from .qcount import count_containing, gauss_binom

DEFAULT_BUDGET = 5_000_000
CACHE_ENV = "QEKR_CACHE_DIR"

MAGIC = b"QLAT"
VERSION = 1
_HEADER = struct.Struct("<4sIIHHQ")


class LatticeSlice:
    """All k-subspaces of F_q^n in canonical order.

    Point masks and the member index are built lazily and shared.
    """

    def __init__(self, n, k, q, elements):
        self.n = n
        self.k = k
        self.q = q
        self.elements = tuple(elements)
        self._masks = None
        self._index = None

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    @property
    def masks(self):
        if self._masks is None:
            self._masks = gfq.point_masks(self.elements, self.n, self.q)
            self._masks.setflags(write=False)
        return self._masks

    @property
    def index(self):
        if self._index is None:
            self._index = {s: i for i, s in enumerate(self.elements)}
        return self._index

    def __eq__(self, other):
        return (
            isinstance(other, LatticeSlice)
            and (self.n, self.k, self.q) == (other.n, other.k, other.q)
            and self.elements == other.elements
        )


def _guard(count, budget, what):
    budget = DEFAULT_BUDGET if budget is None else budget
    if count > budget:
        raise BudgetExceeded(what, count, budget)


def enumerate_slice(n, k, q, budget=None):
    """All k-subspaces of F_q^n, each exactly once, in pivot-lex order."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    gfq.field_make(q)
    _guard(gauss_binom(n, k, q), budget, f"[{n},{k}]_{q} slice")
    return _slice(n, k, q)


@lru_cache(maxsize=64)
def _slice(n, k, q):
    cache_dir = os.environ.get(CACHE_ENV)
    if cache_dir:
        path = cache_path(cache_dir, n, k, q)
        if path.exists():
            return cache_load(path)
    elems = [Subspace(q, n, rows, piv) for piv, rows in gfq.iter_rref(n, k, q)]
    sl = LatticeSlice(n, k, q, elems)
    if cache_dir:
        cache_save(sl, cache_path(cache_dir, n, k, q))
    return sl


def enumerate_between(a, c, b):
    """Yield every b-subspace B with a <= B <= c.

    Enumerates (b - dim a)-subspaces of the quotient c/a and lifts them.
    """
    if not gfq.contains(c, a):
        raise NotNested("a is not contained in c")
    if not a.dim <= b <= c.dim:
        raise NotNested(f"need dim a <= b <= dim c, got {a.dim}, {b}, {c.dim}")
    n, q = a.n, a.q
    w = gfq.complement_basis(a, c)
    m = len(w)
    for _, rows in gfq.iter_rref(m, b - a.dim, q):
        lifted = [gfq.vec_lincomb(gfq.unpack(r, m, q), w, n, q) for r in rows]
        codes, piv = gfq.rref_codes(list(a.rows) + lifted, n, q)
        yield Subspace(q, n, codes, piv)


def count_between(a, c, b):
    return count_containing(a.dim, b, c.dim, a.q)


def enumerate_type(m, h, L, budget=None):
    """Yield every m-subspace U of the ambient space with dim(U & L) = h."""
    sl = enumerate_slice(L.n, m, L.q, budget=budget)
    lm = gfq.point_masks([L], L.n, L.q)[0]
    dims = gfq.dims_from_sizes(gfq.mask_size(sl.masks & lm), L.q)
    for i in np.flatnonzero(dims == h):
        yield sl.elements[i]


# ---------------------------------------------------------------------------
# cache files


def row_bytes(n, q):
    return max(1, ((q**n - 1).bit_length() + 7) // 8)


def cache_path(directory, n, k, q):
    return Path(directory) / f"q{q}_n{n}_k{k}.qlat"


def _checksum(data):
    return hashlib.blake2b(data, digest_size=8).digest()


def encode_elements(elements, n, k, q):
    rb = row_bytes(n, q)
    body = bytearray()
    for s in elements:
        for r in s.rows:
            body += r.to_bytes(rb, "little")
    header = _HEADER.pack(MAGIC, VERSION, q, n, k, len(elements))
    data = header + bytes(body)
    return data + _checksum(data)


def decode_elements(data):
    """Inverse of :func:`encode_elements`; returns (n, k, q, elements)."""
    if len(data) < 4 or data[:4] != MAGIC:
        raise IoFailure("not a QLAT cache file")
    if len(data) < _HEADER.size + 8:
        raise ChecksumMismatch("file truncated")
    magic, version, q, n, k, count = _HEADER.unpack_from(data)
    if version != VERSION:
        raise VersionMismatch(f"cache version {version}, expected {VERSION}")
    payload, tail = data[:-8], data[-8:]
    if _checksum(payload) != tail:
        raise ChecksumMismatch("checksum does not match contents")
    rb = row_bytes(n, q)
    body = payload[_HEADER.size :]
    if len(body) != count * k * rb:
        raise ChecksumMismatch("body length disagrees with header")
    elems = []
    pos = 0
    for _ in range(count):
        rows = []
        for _ in range(k):
            rows.append(int.from_bytes(body[pos : pos + rb], "little"))
            pos += rb
        codes, piv = gfq.rref_codes(rows, n, q)
        if len(codes) != k or tuple(codes) != tuple(rows):
            raise ChecksumMismatch("stored basis is not canonical")
        elems.append(Subspace(q, n, codes, piv))
    return n, k, q, elems


def cache_save(sl, path):
    path = Path(path)
    data = encode_elements(sl.elements, sl.n, sl.k, sl.q)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_bytes(data)
        tmp.replace(path)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return path


def cache_load(path):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    n, k, q, elems = decode_elements(data)
    return LatticeSlice(n, k, q, elems)
