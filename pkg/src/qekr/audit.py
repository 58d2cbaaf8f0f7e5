"""Exact audit of the inequalities and monotonicity claims behind the bounds.

Each :class:`LemmaCase` bundles a hypothesis predicate, a claim producing one
or more exact comparisons, and an optional "observe" predicate marking tuples
that sit outside the hypothesis but are worth reporting (the excluded
triples of the k2 = t+1 case). Everything is big-integer or Fraction
arithmetic; nothing is ever rounded.
"""
import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable

from .errors import UnknownLemma
from .qcount import f1, f2, f3, f4, fprime, g1, g2, g3, g4, g5, gauss_binom, h1, h2

RELATIONS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
}

EXCLUDED_TRIPLES = {(2, 2, 1), (3, 2, 1), (4, 2, 1)}


@dataclass(frozen=True)
class Sweep:
    qs: tuple = (2, 3, 4)
    ts: tuple = (1, 2, 3, 4)
    k2_span: int = 4  # k2 in [t+1, t+k2_span]
    k1_span: int = 4  # k1 in [k2, k2+k1_span-1]
    n_span: int = 5  # n in [k1+k2+t+3, k1+k2+t+3+n_span-1]

    def main_grid(self):
        for q, t in product(self.qs, self.ts):
            for k2 in range(t + 1, t + self.k2_span + 1):
                for k1 in range(k2, k2 + self.k1_span):
                    n0 = k1 + k2 + t + 3
                    for n in range(n0, n0 + self.n_span):
                        yield {"q": q, "t": t, "k1": k1, "k2": k2, "n": n}


@dataclass(frozen=True)
class LemmaCase:
    id: str
    text: str
    hypothesis: Callable
    claim: Callable  # params -> list of (lhs, relation, rhs)
    grid: Callable  # Sweep -> iterable of params
    observe: Callable = None


@dataclass
class AuditReport:
    lemma: str
    tested: int = 0
    failures: list = field(default_factory=list)
    observations: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    @property
    def status(self):
        return "failed" if self.failures else "verified"

    def summary(self):
        return {
            "lemma": self.lemma,
            "tested": str(self.tested),
            "failures": str(len(self.failures)),
            "observations": str(len(self.observations)),
            "status": self.status,
        }


def _main_hyp(p):
    return p["n"] >= p["k1"] + p["k2"] + p["t"] + 3 and p["k1"] >= p["k2"] >= p["t"] + 1


def _excluded(p):
    return (p["k1"], p["k2"], p["t"]) in EXCLUDED_TRIPLES


def _main(s):
    return s.main_grid()


# ---------------------------------------------------------------------------
# claims over (q, t, k1, k2, n)


def _c_g4_g1_g5(p):
    q, t, n = p["q"], p["t"], p["n"]
    out = []
    for k, l in ((p["k1"], p["k2"]), (p["k2"], p["k1"])):
        mid = g1(k, l, n, t, q)
        out.append((g4(k, l, n, t, q), "<=", mid))
        out.append((mid, "<=", g5(k, l, n, t, q)))
    return out


def _c_g4g2_g3(p):
    q, t, k1, k2, n = p["q"], p["t"], p["k1"], p["k2"], p["n"]
    return [(g4(k1, k2, n, t, q) * g2(k2, n, t, q), ">", g3(k1, k2, n, t, q))]


def _c_g5g2_g3(p):
    q, t, k1, k2, n = p["q"], p["t"], p["k1"], p["k2"], p["n"]
    return [(g5(k1, k2, n, t, q) * g2(k2, n, t, q), "<", g3(k1, k2, n, t, q))]


def _c_g1g2_g3(p):
    q, t, k1, k2, n = p["q"], p["t"], p["k1"], p["k2"], p["n"]
    return [(g1(k1, k2, n, t, q) * g2(k2, n, t, q), "<", g3(k1, k2, n, t, q))]


def _c_f3f4(p):
    q, t, k1, k2, n = p["q"], p["t"], p["k1"], p["k2"], p["n"]
    lhs = max(
        f3(k1, k2, n, t, q) * f4(k1, k2, n, t, q),
        f3(k2, k1, n, t, q) * f4(k2, k1, n, t, q),
    )
    return [(lhs, "<", g4(k1, k2, n, t, q) * g2(k2, n, t, q))]


def _c_g1g2_swap(p):
    q, t, k1, k2, n = p["q"], p["t"], p["k1"], p["k2"], p["n"]
    return [
        (
            g1(k2, k1, n, t, q) * g2(k1, n, t, q),
            "<",
            g1(k1, k2, n, t, q) * g2(k2, n, t, q),
        )
    ]


def _c_g3_swap(p):
    q, t, k1, k2, n = p["q"], p["t"], p["k1"], p["k2"], p["n"]
    return [(g3(k2, k1, n, t, q), "<", g3(k1, k2, n, t, q))]


def _c_f2_g4g2(p):
    q, t, k1, k2, n = p["q"], p["t"], p["k1"], p["k2"], p["n"]
    lhs = gauss_binom(n - t, k2 - t, q) * f2(t + 2, k2, k1, n, t, q)
    return [(lhs, "<", g4(k1, k2, n, t, q) * g2(k2, n, t, q))]


def _c_f2_split(p):
    q, t, k1, k2, n = p["q"], p["t"], p["k1"], p["k2"], p["n"]
    lhs = gauss_binom(n - t, k1 - t, q) * f2(t + 2, k1, k2, n, t, q)
    if k2 <= 2 * t:
        return [(lhs, "<", g3(k1, k2, n, t, q))]
    return [(lhs, "<", g4(k1, k2, n, t, q) * g2(k2, n, t, q))]


def _c_f1f1(p):
    q, t, k1, k2, n = p["q"], p["t"], p["k1"], p["k2"], p["n"]
    return [
        (f1(k1, k2, n, t, q) * f1(k2, k1, n, t, q), "<", g4(k1, k2, n, t, q) * g2(k2, n, t, q))
    ]


def _c_dichotomy(p):
    q, t, k1, k2, n = p["q"], p["t"], p["k1"], p["k2"], p["n"]
    rel = ">" if k2 >= 2 * t + 1 else "<"
    return [(g1(k1, k2, n, t, q) * g2(k2, n, t, q), rel, g3(k1, k2, n, t, q))]


# ---------------------------------------------------------------------------
# binomial facts and the cover-lemma monotonicity


def _grid_mi(s):
    for q in s.qs:
        for m in range(1, 31):
            for i in range(1, m + 1):
                yield {"q": q, "m": m, "i": i}


def _c_pascal(p):
    q, m, i = p["q"], p["m"], p["i"]
    top = gauss_binom(m, i, q)
    return [
        (top, "==", gauss_binom(m - 1, i - 1, q) + q**i * gauss_binom(m - 1, i, q)),
        (top * (q**i - 1), "==", (q**m - 1) * gauss_binom(m - 1, i - 1, q)),
    ]


def _c_ratio_bounds(p):
    q, m, i = p["q"], p["m"], p["i"]
    r = Fraction(q**m - 1, q**i - 1)
    s = Fraction(q**i - 1, q**m - 1)
    return [
        (Fraction(q ** (m - i)), "<", r),
        (r, "<", Fraction(q ** (m - i + 1))),
        (Fraction(1, q ** (m - i + 1)), "<", s),
        (s, "<", Fraction(1, q ** (m - i))),
    ]


def _c_binom_bounds(p):
    q, m, i = p["q"], p["m"], p["i"]
    b = gauss_binom(m, i, q)
    out = [(q ** (i * (m - i)), "<=", b), (b, "<", q ** (i * (m - i + 1)))]
    if i < m:
        out.append((q ** (i * (m - i)), "<", b))
    return out


def _grid_kln(s, extra):
    for q, t in product(s.qs, s.ts):
        for k in range(t, t + 5):
            for l in range(t + 2, t + 6):
                n0 = k + l + extra(t)
                for n in range(n0, n0 + 3):
                    yield {"q": q, "t": t, "k": k, "l": l, "n": n}


def _c_f1_bound(p):
    q, t, k, l, n = p["q"], p["t"], p["k"], p["l"], p["n"]
    return [(f1(k, l, n, t, q), "<", gauss_binom(n - t, l - t, q))]


def _c_f2_monotone(p):
    q, t, k, l, n = p["q"], p["t"], p["k"], p["l"], p["n"]
    vals = [f2(m, k, l, n, t, q) for m in range(t + 2, l + 1)]
    out = [(b, "<", a) for a, b in zip(vals, vals[1:])]
    top = f1(k, l, n, t, q)
    out += [(v, "<", top) for v in vals]
    return out


def _grid_fs(s):
    for q, t in product(s.qs, s.ts):
        for k in range(t, t + 4):
            for l in range(t, t + 4):
                for sdim in range(0, k - t + 1):
                    for n in range(k + l, k + l + 3):
                        yield {"q": q, "t": t, "k": k, "l": l, "s": sdim, "n": n}


def _c_fs_monotone(p):
    q, t, k, l, s, n = p["q"], p["t"], p["k"], p["l"], p["s"], p["n"]

    def g(r):
        return gauss_binom(l - r, t - r, q) * gauss_binom(n - s - t + r, k - s - t + r, q)

    vals = [g(r) for r in range(t)]
    return [(a, "<", b) for a, b in zip(vals, vals[1:])]


def _grid_fprime(s):
    for q, t in product(s.qs, s.ts):
        for k in range(t + 1, t + 5):
            for l in range(t + 1, t + 5):
                n0 = k + l + t + 1
                for n in range(n0, n0 + 3):
                    yield {"q": q, "t": t, "k": k, "l": l, "n": n}


def _c_fprime(p):
    q, t, k, l, n = p["q"], p["t"], p["k"], p["l"], p["n"]
    vals = [fprime(n, k, l, m, t, q) for m in range(t, l + 1)]
    out = [(a, "<", b) for a, b in zip(vals, vals[1:])]
    out.append((vals[-1], "==", f3(k, l, n, t, q)))
    return out


def _grid_h(s):
    for q in s.qs:
        for k in range(3, 7):
            for d in range(1, k - 1):
                for n in range(2 * k, 2 * k + 4):
                    yield {"q": q, "d": d, "k": k, "n": n}


def _c_h(p):
    q, d, k, n = p["q"], p["d"], p["k"], p["n"]
    rel = ">" if d < k - 2 else "<"
    return [(h1(d, k, n, q), rel, h2(d, k, n, q))]


LEMMAS = {
    c.id: c
    for c in [
        LemmaCase("g-sandwich", "g4 <= g1 <= g5 (both argument orders)", _main_hyp, _c_g4_g1_g5, _main),
        LemmaCase(
            "g4g2>g3",
            "g4(k1,k2)g2(k2) > g3(k1,k2) when k2 >= 2t+1",
            lambda p: _main_hyp(p) and p["k2"] >= 2 * p["t"] + 1,
            _c_g4g2_g3,
            _main,
        ),
        LemmaCase(
            "g5g2<g3",
            "g5(k1,k2)g2(k2) < g3(k1,k2) when t+2 <= k2 <= 2t",
            lambda p: _main_hyp(p) and p["t"] + 2 <= p["k2"] <= 2 * p["t"],
            _c_g5g2_g3,
            _main,
        ),
        LemmaCase(
            "g1g2<g3@k2=t+1",
            "g1(k1,k2)g2(k2) < g3(k1,k2) when k2 = t+1, three triples excluded",
            lambda p: _main_hyp(p) and p["k2"] == p["t"] + 1 and not _excluded(p),
            _c_g1g2_g3,
            _main,
            observe=lambda p: _main_hyp(p) and _excluded(p),
        ),
        LemmaCase("f3f4<g4g2", "max of f3f4 over both orders < g4g2", _main_hyp, _c_f3f4, _main),
        LemmaCase(
            "g1g2-swap",
            "g1(k2,k1)g2(k1) < g1(k1,k2)g2(k2) when k1 > k2",
            lambda p: _main_hyp(p) and p["k1"] > p["k2"],
            _c_g1g2_swap,
            _main,
        ),
        LemmaCase(
            "g3-swap",
            "g3(k2,k1) < g3(k1,k2) when k1 > k2",
            lambda p: _main_hyp(p) and p["k1"] > p["k2"],
            _c_g3_swap,
            _main,
        ),
        LemmaCase(
            "f2-vs-g4g2", "[n-t,k2-t] f2(t+2,k2,k1) < g4g2", _main_hyp, _c_f2_g4g2, _main
        ),
        LemmaCase(
            "f2-vs-g3|g4g2",
            "[n-t,k1-t] f2(t+2,k1,k2) < g3 (k2 <= 2t) or < g4g2 (k2 >= 2t+1)",
            _main_hyp,
            _c_f2_split,
            _main,
        ),
        LemmaCase("f1f1<g4g2", "f1(k1,k2)f1(k2,k1) < g4g2", _main_hyp, _c_f1f1, _main),
        LemmaCase(
            "dichotomy",
            "g1g2 > g3 iff k2 >= 2t+1",
            lambda p: _main_hyp(p) and not _excluded(p),
            _c_dichotomy,
            _main,
            observe=lambda p: _main_hyp(p) and _excluded(p),
        ),
        LemmaCase(
            "binom-identities",
            "Pascal-type and ratio identities",
            lambda p: 1 <= p["i"] <= p["m"],
            _c_pascal,
            _grid_mi,
        ),
        LemmaCase(
            "binom-ratio-bounds",
            "q^(m-i) < (q^m-1)/(q^i-1) < q^(m-i+1) and the reciprocal form",
            lambda p: 1 <= p["i"] < p["m"],
            _c_ratio_bounds,
            _grid_mi,
        ),
        LemmaCase(
            "binom-bounds",
            "q^(i(m-i)) <= [m,i] < q^(i(m-i+1)), strict below when i < m",
            lambda p: 1 <= p["i"] <= p["m"],
            _c_binom_bounds,
            _grid_mi,
        ),
        LemmaCase(
            "f1<[n-t,l-t]",
            "f1(k,l,n,t) < [n-t, l-t] when n >= k+l+2",
            lambda p: p["n"] >= p["k"] + p["l"] + 2 and p["l"] >= p["t"] + 2 and p["k"] >= p["t"],
            _c_f1_bound,
            lambda s: _grid_kln(s, lambda t: 2),
        ),
        LemmaCase(
            "f2-decreasing",
            "f2(m,k,l,n,t) strictly decreasing in m on [t+2, l] and below f1",
            lambda p: p["n"] >= p["k"] + p["l"] + p["t"] + 1 and p["l"] >= p["t"] + 2 and p["k"] >= p["t"],
            _c_f2_monotone,
            lambda s: _grid_kln(s, lambda t: t + 1),
        ),
        LemmaCase(
            "cover-bound-increasing",
            "[l-r,t-r][n-s-t+r,k-s-t+r] strictly increasing in r on [0, t-1]",
            lambda p: p["n"] >= p["k"] + p["l"] and p["s"] + p["t"] <= p["k"],
            _c_fs_monotone,
            _grid_fs,
        ),
        LemmaCase(
            "fprime-increasing",
            "f'(n,k,l,m,t) strictly increasing in m on [t, l], with f'(l) = f3",
            lambda p: p["n"] >= p["k"] + p["l"] + p["t"] + 1 and p["k"] >= p["t"] + 1,
            _c_fprime,
            _grid_fprime,
        ),
        LemmaCase(
            "h1-vs-h2",
            "h1 > h2 for 1 <= d < k-2, h1 < h2 at d = k-2 (n >= 2k >= 6)",
            lambda p: p["n"] >= 2 * p["k"] >= 6 and 1 <= p["d"] <= p["k"] - 2,
            _c_h,
            _grid_h,
        ),
    ]
}

# the inequality lemmas used by the non-trivial cross bound
SECTION5 = (
    "g-sandwich",
    "g4g2>g3",
    "g5g2<g3",
    "g1g2<g3@k2=t+1",
    "f3f4<g4g2",
    "g1g2-swap",
    "g3-swap",
    "f2-vs-g4g2",
    "f2-vs-g3|g4g2",
    "f1f1<g4g2",
)

# claims outside the batch set; run them by id
EXTRA = ("h1-vs-h2",)
DEFAULT = tuple(i for i in LEMMAS if i not in EXTRA)


def _fmt(params):
    return ";".join(f"{k}={v}" for k, v in params.items())


def _num(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    return str(x)


def _parts(p, claims):
    # several comparisons per tuple get a part index so CSV rows stay distinct
    base = _fmt(p)
    if len(claims) == 1:
        return [(base, claims[0])]
    return [(f"{base};part={j}", c) for j, c in enumerate(claims)]


def audit(lemma, grid):
    """Evaluate one lemma over an iterable of parameter dicts."""
    case = lemma if isinstance(lemma, LemmaCase) else LEMMAS.get(lemma)
    if case is None:
        raise UnknownLemma(f"no lemma registered as {lemma!r}")
    rep = AuditReport(case.id)
    for p in grid:
        if case.hypothesis(p):
            rep.tested += 1
            for tag, (lhs, rel, rhs) in _parts(p, case.claim(p)):
                ok = RELATIONS[rel](lhs, rhs)
                rep.rows.append((case.id, tag, _num(lhs), _num(rhs), rel, "pass" if ok else "fail"))
                if not ok:
                    rep.failures.append((dict(p), lhs, rel, rhs))
        elif case.observe is not None and case.observe(p):
            for tag, (lhs, rel, rhs) in _parts(p, case.claim(p)):
                ok = RELATIONS[rel](lhs, rhs)
                status = "observed-true" if ok else "observed-false"
                rep.rows.append((case.id, tag, _num(lhs), _num(rhs), rel, status))
                rep.observations.append((dict(p), lhs, rel, rhs, ok))
    return rep


def audit_all(sweep=None, lemmas=None):
    sweep = Sweep() if sweep is None else sweep
    ids = list(DEFAULT) if lemmas is None else list(lemmas)
    return [audit(LEMMAS[i] if i in LEMMAS else i, LEMMAS[i].grid(sweep) if i in LEMMAS else ()) for i in ids]


CSV_HEADER = ("lemma", "params", "lhs", "rhs", "relation", "status")


def to_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rep in reports:
        w.writerows(rep.rows)
    return buf.getvalue()


def to_json(reports):
    return json.dumps([r.summary() for r in reports], indent=2, sort_keys=True)
