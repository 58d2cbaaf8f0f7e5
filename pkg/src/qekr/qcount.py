"""Exact evaluation of Gaussian binomials and the named size formulas.

Everything here is integer arithmetic.  Each named formula is stored as a list
of signed terms ``sign * q**exp * prod([a_i, b_i]**pow_i)`` so that callers
can print per-term breakdowns; see :data:`FORMULAS`.
"""
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainViolation, InvalidOrder, OrderViolation, UnknownFormula


def _check_q(q):
    if q < 2:
        raise InvalidOrder(f"q={q} < 2")


@lru_cache(maxsize=65536)
def gauss_binom(a, b, q):
    """Gaussian binomial [a, b]_q.

    Zero for b < 0 or b > a, one for b == 0.

    >>> gauss_binom(4, 2, 2)
    35
    """
    _check_q(q)
    if b < 0 or b > a:
        return 0
    if b == 0:
        return 1
    b = min(b, a - b)
    num = den = 1
    for i in range(b):
        num *= q ** (a - i) - 1
        den *= q ** (b - i) - 1
    return num // den


def qint(m, q):
    """[m, 1]_q = 1 + q + ... + q^(m-1)."""
    return gauss_binom(m, 1, q)


def nprime(m1, h1, m, h, e, l, q):
    """Number of type-(m, h) subspaces containing a fixed type-(m1, h1) one.

    The ambient space has dimension e + l and the reference subspace L has
    dimension l; "type (m, h)" means dimension m meeting L in dimension h.
    """
    _check_q(q)
    if not (0 <= h1 <= h <= l and 0 <= m1 - h1 <= m - h <= e):
        return 0
    return (
        q ** ((l - h) * (m - h - m1 + h1))
        * gauss_binom(e - (m1 - h1), (m - h) - (m1 - h1), q)
        * gauss_binom(l - h1, h - h1, q)
    )


def count_containing(a, b, c, q):
    """Number of b-spaces between a fixed a-space and a fixed c-space."""
    if not 0 <= a <= b <= c:
        raise OrderViolation(f"need 0 <= a <= b <= c, got {(a, b, c)}")
    return gauss_binom(c - a, b - a, q)


# ---------------------------------------------------------------------------
# formula registry


@dataclass(frozen=True)
class Term:
    sign: int
    exp: object  # params -> int
    factors: tuple  # of (top, bottom, power) callables; power may be None


@dataclass(frozen=True)
class FormulaId:
    name: str
    args: tuple
    terms: tuple
    domain: object  # params -> bool


def _t(sign, exp, *factors):
    fs = []
    for f in factors:
        if len(f) == 2:
            f = (f[0], f[1], None)
        fs.append(f)
    return Term(sign, exp, tuple(fs))


def _zero(p):
    return 0


def _nonneg(p):
    return all(isinstance(v, int) and v >= 0 for k, v in p.items() if k != "q")


FORMULAS = {
    "f1": FormulaId(
        "f1",
        ("k", "l", "n", "t"),
        (
            _t(
                1,
                _zero,
                (lambda p: p["t"] + 1, lambda p: 1),
                (lambda p: p["k"] - p["t"] + 1, lambda p: 1),
                (lambda p: p["n"] - p["t"] - 1, lambda p: p["l"] - p["t"] - 1),
            ),
        ),
        lambda p: p["k"] >= p["t"] and p["l"] >= p["t"] + 1 and p["n"] >= p["l"],
    ),
    "f2": FormulaId(
        "f2",
        ("m", "k", "l", "n", "t"),
        (
            _t(
                1,
                _zero,
                (lambda p: p["m"], lambda p: p["t"]),
                (lambda p: p["k"], lambda p: 1, lambda p: p["m"] - p["t"] - 2),
                (lambda p: p["k"] - p["t"] + 1, lambda p: 1, lambda p: 2),
                (lambda p: p["n"] - p["m"], lambda p: p["l"] - p["m"]),
            ),
        ),
        lambda p: p["m"] >= p["t"] + 2 and p["k"] >= p["t"] and p["n"] >= p["l"],
    ),
    "g1": FormulaId(
        "g1",
        ("k", "l", "n", "t"),
        (
            _t(1, _zero, (lambda p: p["n"] - p["t"], lambda p: p["k"] - p["t"])),
            _t(
                -1,
                lambda p: (p["l"] + 1 - p["t"]) * (p["k"] - p["t"]),
                (lambda p: p["n"] - p["l"] - 1, lambda p: p["k"] - p["t"]),
            ),
        ),
        lambda p: min(p["k"], p["l"]) >= p["t"] + 1 and p["n"] >= max(p["k"], p["l"] + 1),
    ),
    "g2": FormulaId(
        "g2",
        ("l", "n", "t"),
        (
            _t(1, _zero, (lambda p: p["n"] - p["t"], lambda p: p["l"] - p["t"])),
            _t(1, lambda p: p["l"] + 1 - p["t"], (lambda p: p["t"], lambda p: 1)),
        ),
        lambda p: p["l"] >= p["t"] and p["n"] >= p["l"] + 1,
    ),
    "g3": FormulaId(
        "g3",
        ("k", "l", "n", "t"),
        (
            _t(
                1,
                lambda p: p["l"] - p["t"],
                (lambda p: p["n"] - p["t"] - 1, lambda p: p["k"] - p["t"] - 1),
                (lambda p: p["t"] + 1, lambda p: 1),
                (lambda p: p["n"] - p["t"] - 1, lambda p: p["l"] - p["t"]),
            ),
            _t(
                1,
                _zero,
                (lambda p: p["n"] - p["t"] - 1, lambda p: p["k"] - p["t"] - 1),
                (lambda p: p["n"] - p["t"] - 1, lambda p: p["l"] - p["t"] - 1),
            ),
        ),
        lambda p: min(p["k"], p["l"]) >= p["t"] + 1 and p["n"] >= max(p["k"], p["l"]),
    ),
    "g4": FormulaId(
        "g4",
        ("k", "l", "n", "t"),
        (
            _t(
                1,
                _zero,
                (lambda p: p["l"] - p["t"] + 1, lambda p: 1),
                (lambda p: p["n"] - p["t"] - 1, lambda p: p["k"] - p["t"] - 1),
            ),
            _t(
                -1,
                lambda p: 1,
                (lambda p: p["l"] - p["t"] + 1, lambda p: 2),
                (lambda p: p["n"] - p["t"] - 2, lambda p: p["k"] - p["t"] - 2),
            ),
        ),
        lambda p: min(p["k"], p["l"]) >= p["t"] + 1 and p["n"] >= max(p["k"], p["l"] + 1),
    ),
    "g5": FormulaId(
        "g5",
        ("k", "l", "n", "t"),
        (
            _t(
                1,
                _zero,
                (lambda p: p["l"] - p["t"] + 1, lambda p: 1),
                (lambda p: p["n"] - p["t"] - 1, lambda p: p["k"] - p["t"] - 1),
            ),
            _t(
                -1,
                lambda p: (p["l"] - p["t"] - 1) * (p["k"] - p["t"] - 2) + 1,
                (lambda p: p["n"] - p["l"] - 1, lambda p: p["k"] - p["t"] - 2),
                (lambda p: p["l"] + 1 - p["t"], lambda p: 2),
            ),
        ),
        lambda p: min(p["k"], p["l"]) >= p["t"] + 1 and p["n"] >= max(p["k"], p["l"] + 1),
    ),
    "f3": FormulaId(
        "f3",
        ("k", "l", "n", "t"),
        (
            _t(
                1,
                _zero,
                (lambda p: p["l"] - p["t"], lambda p: 1),
                (lambda p: p["n"] - p["t"] - 1, lambda p: p["k"] - p["t"] - 1),
            ),
            _t(
                1,
                lambda p: 2 * (p["l"] - p["t"]),
                (lambda p: p["n"] - p["t"] - 2, lambda p: p["k"] - p["t"] - 2),
            ),
        ),
        lambda p: min(p["k"], p["l"]) >= p["t"] + 1 and p["n"] >= max(p["k"], p["l"]),
    ),
    "f4": FormulaId(
        "f4",
        ("k", "l", "n", "t"),
        (
            _t(1, _zero, (lambda p: p["n"] - p["t"], lambda p: p["l"] - p["t"])),
            _t(
                1,
                lambda p: p["l"] - p["t"] + 1,
                (lambda p: p["t"], lambda p: 1),
                (lambda p: p["k"] - p["t"], lambda p: 1),
                (lambda p: p["n"] - p["t"] - 2, lambda p: p["l"] - p["t"] - 1),
            ),
        ),
        lambda p: min(p["k"], p["l"]) >= p["t"] + 1 and p["n"] >= max(p["k"], p["l"]),
    ),
    "h1": FormulaId(
        "h1",
        ("d", "k", "n"),
        (
            _t(1, _zero, (lambda p: p["n"] - p["d"], lambda p: p["k"] - p["d"])),
            _t(
                -1,
                lambda p: (p["k"] + 1 - p["d"]) * (p["k"] - p["d"]),
                (lambda p: p["n"] - p["k"] - 1, lambda p: p["k"] - p["d"]),
            ),
            _t(1, lambda p: p["k"] + 1 - p["d"], (lambda p: p["d"], lambda p: 1)),
        ),
        lambda p: 0 <= p["d"] <= p["k"] and p["n"] >= p["k"] + 1,
    ),
    "h2": FormulaId(
        "h2",
        ("d", "k", "n"),
        (
            _t(1, _zero, (lambda p: p["n"] - p["d"], lambda p: p["k"] - p["d"])),
            _t(
                -1,
                lambda p: (p["k"] - p["d"]) ** 2,
                (lambda p: p["n"] - p["k"], lambda p: p["k"] - p["d"]),
            ),
            _t(
                1,
                lambda p: p["k"] - p["d"] + 1,
                (lambda p: p["n"] - p["k"], lambda p: 1),
                (lambda p: p["d"], lambda p: 1),
            ),
        ),
        lambda p: 0 <= p["d"] <= p["k"] and p["n"] >= p["k"] + 1,
    ),
    "fprime": FormulaId(
        "fprime",
        ("n", "k", "l", "m", "t"),
        (
            _t(
                1,
                _zero,
                (lambda p: p["m"] - p["t"], lambda p: 1),
                (lambda p: p["n"] - p["t"] - 1, lambda p: p["k"] - p["t"] - 1),
            ),
            _t(
                1,
                _zero,
                (lambda p: p["n"] - p["t"] - 2, lambda p: p["k"] - p["t"] - 2),
                ("sqdiff",),
            ),
        ),
        lambda p: p["t"] <= p["m"] <= p["l"] and p["k"] >= p["t"] + 1 and p["n"] >= p["k"],
    ),
}


def _factor_value(f, p, q):
    if f == ("sqdiff",):
        # ([l+1-t, 1] - [m-t, 1])^2 from the proof-local bound
        return (qint(p["l"] + 1 - p["t"], q) - qint(p["m"] - p["t"], q)) ** 2
    top, bot, pw = f
    v = gauss_binom(top(p), bot(p), q)
    if pw is not None:
        e = pw(p)
        if e < 0:
            if v == 0:
                raise DomainViolation("0 to a negative power")
            raise DomainViolation(f"negative power {e} of a Gaussian binomial")
        v = v**e
    return v


def _term_value(term, p, q):
    vals = [_factor_value(f, p, q) for f in term.factors]
    if any(v == 0 for v in vals):
        return 0
    e = term.exp(p)
    if e < 0:
        raise DomainViolation(f"negative exponent q^{e} on a nonzero term")
    out = term.sign * q**e
    for v in vals:
        out *= v
    return out


def _params(fid, args, kwargs):
    if args:
        if len(args) != len(fid.args):
            raise TypeError(f"{fid.name} takes {fid.args}")
        kwargs = dict(zip(fid.args, args), **kwargs)
    missing = [a for a in fid.args if a not in kwargs]
    if missing:
        raise TypeError(f"{fid.name}: missing {missing}")
    return {a: int(kwargs[a]) for a in fid.args}


def formula_terms(name, *args, q, **kwargs):
    """Per-term values of a named formula (signed)."""
    try:
        fid = FORMULAS[name]
    except KeyError:
        raise UnknownFormula(name) from None
    p = _params(fid, args, kwargs)
    _check_q(q)
    if not (_nonneg(p) and fid.domain(p)):
        raise DomainViolation(f"{name}{tuple(p.values())} outside its domain")
    return [_term_value(t, p, q) for t in fid.terms]


def formula_eval(name, *args, q, **kwargs):
    """Exact value of a named formula, e.g. ``formula_eval("g2", 2, 6, 1, q=2)``."""
    val = sum(formula_terms(name, *args, q=q, **kwargs))
    if val < 0:
        raise DomainViolation(f"{name} evaluated negative ({val})")
    return val


def f1(k, l, n, t, q):
    return formula_eval("f1", k, l, n, t, q=q)


def f2(m, k, l, n, t, q):
    return formula_eval("f2", m, k, l, n, t, q=q)


def f3(k, l, n, t, q):
    return formula_eval("f3", k, l, n, t, q=q)


def f4(k, l, n, t, q):
    return formula_eval("f4", k, l, n, t, q=q)


def g1(k, l, n, t, q):
    return formula_eval("g1", k, l, n, t, q=q)


def g2(l, n, t, q):
    return formula_eval("g2", l, n, t, q=q)


def g3(k, l, n, t, q):
    return formula_eval("g3", k, l, n, t, q=q)


def g4(k, l, n, t, q):
    return formula_eval("g4", k, l, n, t, q=q)


def g5(k, l, n, t, q):
    return formula_eval("g5", k, l, n, t, q=q)


def h1(d, k, n, q):
    return formula_eval("h1", d, k, n, q=q)


def h2(d, k, n, q):
    return formula_eval("h2", d, k, n, q=q)


def fprime(n, k, l, m, t, q):
    return formula_eval("fprime", n, k, l, m, t, q=q)


# sizes of the single-anchor families


def size_C(k, dim_T, n, q):
    return gauss_binom(n - dim_T, k - dim_T, q)


def size_D_plus_one(l, s, n, q):
    """|{F in [V, l] : dim(F & T) >= s}| for dim T = s + 1."""
    return q ** max(l - s, 0) * qint(s + 1, q) * gauss_binom(n - s - 1, l - s, q) + gauss_binom(
        n - s - 1, l - s - 1, q
    )


def rwise_bound_i(k, n, t, r, q):
    """Upper bound for non-trivial r-wise families when t+r-2 <= k/2 - 1."""
    return h1(t + r - 2, k, n, q)


def rwise_bound_ii(k, n, t, r, q):
    """Upper bound for non-trivial r-wise families when k/2 - 1 < t+r-2 <= k-2."""
    return qint(t + r, q) * gauss_binom(n - t - r + 1, k - t - r + 1, q) - q * qint(
        t + r - 1, q
    ) * gauss_binom(n - t - r, k - t - r, q)


def cross_bound_trivial(ks, n, t, q):
    out = 1
    for k in ks:
        out *= gauss_binom(n - t, k - t, q)
    return out


def cross_bound_nontrivial(k1, k2, n, t, q):
    """Product bound for non-trivial cross t-intersecting pairs (k1 >= k2 >= t+1)."""
    if k2 >= 2 * t + 1:
        return g1(k1, k2, n, t, q) * g2(k2, n, t, q)
    return g3(k1, k2, n, t, q)
