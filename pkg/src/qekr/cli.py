"""Command line front end.

Exit codes: 0 success, 1 a checked property failed (failures are listed in
the report), 2 usage or parameter error.
"""
import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from . import audit as au
from . import families as fm
from . import gfq, lattice, qcount
from . import search as se
from . import verify as vf
from .errors import QekrError

FORMATS = ("text", "json", "csv")
# options that shape output only; they are not part of a report's params
_PLUMBING = {"command", "format", "output", "config", "from_report", "func"}


class UsageError(Exception):
    pass


def _s(x):
    return str(x)


# ---------------------------------------------------------------------------
# command implementations: each returns (results, failures, sampled)


def cmd_qbinom(a):
    return [{"value": _s(qcount.gauss_binom(a.a, a.b, a.q))}], [], False


def cmd_formula(a):
    fid = qcount.FORMULAS.get(a.name)
    if fid is None:
        raise UsageError(f"unknown formula {a.name!r}; choose from {', '.join(qcount.FORMULAS)}")
    vals = {}
    for arg in fid.args:
        v = getattr(a, arg, None)
        if v is None:
            raise UsageError(f"formula {a.name} needs --{arg}")
        vals[arg] = v
    terms = qcount.formula_terms(a.name, q=a.q, **vals)
    value = qcount.formula_eval(a.name, q=a.q, **vals)
    return [{"value": _s(value), "terms": [_s(x) for x in terms]}], [], False


def cmd_enumerate(a):
    sl = lattice.enumerate_slice(a.n, a.k, a.q, budget=a.budget)
    res = {"count": _s(len(sl)), "expected": _s(qcount.gauss_binom(a.n, a.k, a.q))}
    if a.list:
        res["elements"] = [[_s(r) for r in s.rows] for s in sl]
    fails = [] if len(sl) == qcount.gauss_binom(a.n, a.k, a.q) else [{"count": res["count"]}]
    return [res], fails, False


def build_spec(a, name=None, k=None):
    name = name or a.name
    q, n, t = a.q, a.n, a.t
    k = a.k if k is None else k
    V = gfq.full(n, q)

    def chain(*dims):
        return fm.anchor_chain(n, q, *dims)

    if name in ("A", "B"):
        dx = a.dx if a.dx is not None else t
        dm = a.dm if a.dm is not None else k + 1
        X, M = chain(dx, dm)
        return fm.A(k, X, M) if name == "A" else fm.B(k, X, M)
    if name == "C":
        (T,) = chain(a.dt if a.dt is not None else t)
        return fm.C(k, T)
    if name == "D":
        s = a.s if a.s is not None else t
        (T,) = chain(a.dt if a.dt is not None else s + 1)
        return fm.D(k, s, T)
    if name in ("E1", "E2", "E3", "H2"):
        dx = a.dx if a.dx is not None else t
        dm = a.dm if a.dm is not None else k
        X, M = chain(dx, dm)
        if name == "E1":
            return fm.E1(k, X, M)
        dc = a.dc if a.dc is not None else k + 1
        C = V if dc == n else chain(dc)[0]
        return getattr(fm, name)(k, X, M, C)
    if name == "M_full":
        (M,) = chain(a.dm if a.dm is not None else k + 1)
        return fm.M_full(k, M)
    raise UsageError(f"unknown construction {name!r}")


def cmd_construct(a):
    spec = build_spec(a)
    fam = fm.construct(spec, a.budget)
    res = {"spec": spec.describe(), "size": _s(len(fam))}
    fails = []
    if a.size_check:
        try:
            rep = fm.size_check(spec, a.budget)
            res.update(formula=rep.formula_name, formula_value=_s(rep.formula), match=rep.match)
            if not rep.match:
                fails.append({"spec": spec.describe(), "enumerated": _s(rep.enumerated), "formula": _s(rep.formula)})
        except fm.NoFormula as exc:
            res["formula"] = f"none ({exc})"
    if a.save:
        fm.save_family(fam, a.save, spec)
        res["saved"] = str(a.save)
    return [res], fails, False


def _pair(a):
    t = a.t
    k1, k2 = a.k1, a.k2
    n, q = a.n, a.q
    if a.pair == "AB":
        X, M = fm.anchor_chain(n, q, t, k2 + 1)
        return fm.construct(fm.A(k1, X, M), a.budget), fm.construct(fm.B(k2, X, M), a.budget)
    if a.pair == "CD":
        (T,) = fm.anchor_chain(n, q, t + 1)
        return fm.construct(fm.C(k1, T), a.budget), fm.construct(fm.D(k2, t, T), a.budget)
    if a.pair == "CC":
        (T,) = fm.anchor_chain(n, q, t)
        return fm.construct(fm.C(k1, T), a.budget), fm.construct(fm.C(k2, T), a.budget)
    raise UsageError(f"unknown pair {a.pair!r}")


def cmd_verify(a):
    if (a.pair or a.rwise) and (a.q is None or a.n is None):
        raise UsageError("verify needs --q and --n")
    if a.pair and (a.k1 is None or a.k2 is None):
        raise UsageError("--pair needs --k1 and --k2")
    if a.rwise and a.k is None:
        raise UsageError("--rwise needs --k")
    if a.pair:
        F, G = _pair(a)
        chk = vf.is_cross_intersecting([F, G], a.t, sample=a.sample, seed=a.seed)
        res = {
            "pair": a.pair,
            "sizes": [_s(len(F)), _s(len(G))],
            "cross_intersecting": chk.holds,
            "trivial": vf.is_trivial([F, G], a.t),
        }
    elif a.rwise:
        cons = se.rwise_constructions(a.n, a.k, a.t, a.r, a.q, a.budget)
        key = {"AM": "A+M", "D": "D"}[a.rwise]
        if key not in cons:
            raise UsageError(f"{a.rwise} does not fit these parameters")
        F = cons[key]
        chk = vf.is_rwise_intersecting(F, a.r, a.t, sample=a.sample, seed=a.seed)
        res = {
            "family": a.rwise,
            "size": _s(len(F)),
            "rwise_intersecting": chk.holds,
            "trivial": vf.is_trivial(F, a.t),
        }
    else:
        raise UsageError("verify needs --pair, --rwise or --from-report")
    fails = [] if chk.holds else [{"witness": chk.witness.as_dict()}]
    return [res], fails, chk.sampled


def cmd_tau(a):
    spec = build_spec(a)
    fam = fm.construct(spec, a.budget)
    cr = vf.tau(fam, a.t, method=a.method, budget=a.budget)
    res = {
        "spec": spec.describe(),
        "tau": _s(cr.tau),
        "covers": _s(len(cr.covers)),
    }
    if a.list:
        res["cover_bases"] = [[_s(r) for r in c.rows] for c in cr.covers]
    return [res], [], False


def cmd_closure(a):
    spec = build_spec(a)
    fam = fm.construct(spec, a.budget)
    partner = vf.partner_closure(fam, a.partner_dim, a.t, a.budget)
    closed = vf.close_families([fam, partner], a.t, budget=a.budget)
    F, G = closed.families
    res = {
        "seed": spec.describe(),
        "sizes": [_s(len(F)), _s(len(G))],
        "rounds": _s(closed.rounds),
        "converged": closed.converged,
        "seed_was_maximal": F == fam,
        "matched": se.identify_pair(F, G, a.t),
    }
    fails = [] if closed.converged else [{"closure": "did not converge"}]
    return [res], fails, False


def cmd_audit(a):
    if not a.all and not a.lemma:
        raise UsageError("audit needs --all or --lemma")
    sweep = au.Sweep(qs=tuple(a.qs)) if a.qs else au.Sweep()
    ids = None if a.all else a.lemma
    for i in ids or ():
        if i not in au.LEMMAS:
            raise UsageError(f"unknown lemma {i!r}")
    reps = au.audit_all(sweep, ids)
    results = [r.summary() for r in reps]
    fails = []
    for r in reps:
        for p, lhs, rel, rhs in r.failures:
            fails.append({"lemma": r.lemma, "params": au._fmt(p), "lhs": _s(lhs), "relation": rel, "rhs": _s(rhs)})
    return results, fails, False, reps


def cmd_search(a):
    ks = tuple(a.k)
    cfg = se.SearchConfig(
        q=a.q,
        n=a.n,
        t=a.t,
        ks=ks,
        r=a.r,
        strategies=tuple(a.strategies) if a.strategies else se.STRATEGIES,
        random_seeds=a.random_seeds,
        perturbations=a.perturbations,
        seed=a.seed,
        budget=a.budget,
        workers=a.workers,
    )
    if a.mode == "cross":
        if len(ks) != 2:
            raise UsageError("cross search needs two values for --k")
        res = se.search_cross_pairs(cfg, nontrivial=a.nontrivial)
        out = res.as_dict()
    elif a.mode == "rwise":
        res = se.search_rwise(cfg)
        out = res.as_dict()
    elif a.mode == "nonexistence":
        rep = se.rwise_nonexistence(a.n, ks[0], a.t, a.r, a.q, a.budget)
        out = {k: (_s(v) if isinstance(v, int) and not isinstance(v, bool) else v) for k, v in rep.items()}
        return [out], [], False
    else:
        out = se.stability_probe(cfg)
        fails = [f for f in out["families"] if not f["pairwise_ok"] or f["contained"] is False]
        return [out], fails, False
    return [out], list(res.violations), False


def cmd_cache(a):
    if a.action == "build":
        d = a.dir or os.environ.get(lattice.CACHE_ENV)
        if not d:
            raise UsageError(f"cache build needs --dir or ${lattice.CACHE_ENV}")
        sl = lattice.enumerate_slice(a.n, a.k, a.q, budget=a.budget)
        path = lattice.cache_save(sl, lattice.cache_path(d, a.n, a.k, a.q))
        return [{"path": str(path), "count": _s(len(sl))}], [], False
    if not a.path:
        raise UsageError(f"cache {a.action} needs --path")
    sl = lattice.cache_load(a.path)
    res = {"q": _s(sl.q), "n": _s(sl.n), "k": _s(sl.k), "count": _s(len(sl))}
    fails = []
    if a.action == "verify":
        fresh = lattice.enumerate_slice(sl.n, sl.k, sl.q, budget=a.budget)
        res["matches_enumeration"] = fresh.elements == sl.elements
        if not res["matches_enumeration"]:
            fails.append({"path": str(a.path)})
    return [res], fails, False


# ---------------------------------------------------------------------------
# parser


def _ints(s):
    return [int(x) for x in s.split(",") if x]


def _common(p):
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--output", type=Path, default=None, help="write the report here")
    p.add_argument("--config", type=Path, default=None, help="key=value file; flags override it")
    p.add_argument("--budget", type=int, default=None, help="enumeration budget")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache-dir", default=None, help=f"overrides ${lattice.CACHE_ENV}")


def _space(p, k=True, required=True):
    p.add_argument("--q", type=int, required=required)
    p.add_argument("--n", type=int, required=required)
    if k:
        p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, default=1)


def _anchors(p):
    p.add_argument("name", choices=fm.NAMES)
    p.add_argument("--dx", type=int, help="dim X (default t; H2-type: d)")
    p.add_argument("--dm", type=int, help="dim M")
    p.add_argument("--dt", type=int, help="dim T")
    p.add_argument("--dc", type=int, help="dim C (n means the whole space)")
    p.add_argument("--s", type=int, help="threshold s for D")


def build_parser():
    parser = argparse.ArgumentParser(prog="qekr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qbinom", help="Gaussian binomial [a, b]_q")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--q", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_qbinom)

    p = sub.add_parser("formula", help="evaluate a named formula")
    p.add_argument("name")
    p.add_argument("--q", type=int, required=True)
    for arg in ("k", "l", "n", "t", "m", "d"):
        p.add_argument(f"--{arg}", type=int)
    _common(p)
    p.set_defaults(func=cmd_formula)

    p = sub.add_parser("enumerate", help="enumerate a lattice slice")
    _space(p)
    p.add_argument("--list", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("construct", help="build a named family")
    _anchors(p)
    _space(p)
    p.add_argument("--size-check", action="store_true")
    p.add_argument("--save", type=Path)
    _common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="check intersection properties")
    _space(p, k=False, required=False)
    p.add_argument("--pair", choices=("AB", "CD", "CC"))
    p.add_argument("--k1", type=int)
    p.add_argument("--k2", type=int)
    p.add_argument("--rwise", choices=("AM", "D"))
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--sample", type=int, default=None, help="fall back to this many sampled tuples")
    p.add_argument("--from-report", type=Path, default=None)
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tau", help="t-covering number of a named family")
    _anchors(p)
    _space(p)
    p.add_argument("--method", choices=("cover", "scan"), default="cover")
    p.add_argument("--list", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("closure", help="close a named family to a maximal pair")
    _anchors(p)
    _space(p)
    p.add_argument("--partner-dim", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("audit", help="exact inequality audit")
    p.add_argument("--all", action="store_true")
    p.add_argument("--lemma", action="append")
    p.add_argument("--qs", type=_ints, help="comma-separated field orders for the sweep")
    _common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("search", help="seeded extremal search")
    p.add_argument("--mode", choices=("cross", "rwise", "nonexistence", "stability"), default="cross")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--k", type=_ints, required=True, help="comma-separated dimensions")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--nontrivial", action="store_true")
    p.add_argument("--strategies", type=lambda s: s.split(","))
    p.add_argument("--random-seeds", type=int, default=16)
    p.add_argument("--perturbations", type=int, default=8)
    _common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("cache", help="build or inspect slice cache files")
    p.add_argument("action", choices=("build", "info", "verify"))
    p.add_argument("--q", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--dir")
    p.add_argument("--path")
    _common(p)
    p.set_defaults(func=cmd_cache)
    return parser


def _subparser(parser, command):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices.get(command)
    return None


def read_config(path, sub):
    """Parse a flat key=value file against a subcommand's options."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    actions = {a.dest: a for a in sub._actions}
    out = {}
    for ln, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{ln}: expected key=value")
        key, val = (x.strip() for x in line.split("=", 1))
        dest = key.replace("-", "_")
        act = actions.get(dest)
        if act is None or dest in ("help", "config"):
            raise UsageError(f"{path}:{ln}: unknown key {key!r}")
        if act.nargs == 0:
            out[dest] = val.lower() in ("1", "true", "yes", "on")
        elif act.type is not None:
            try:
                out[dest] = act.type(val)
            except (TypeError, ValueError) as exc:
                raise UsageError(f"{path}:{ln}: bad value for {key}: {val!r}") from exc
        else:
            out[dest] = val
    return out


def _peek_config(argv):
    """(command, config path) found in argv without a full parse."""
    command = next((x for x in argv if not x.startswith("-")), None)
    for i, x in enumerate(argv):
        if x == "--config" and i + 1 < len(argv):
            return command, argv[i + 1]
        if x.startswith("--config="):
            return command, x.split("=", 1)[1]
    return command, None


def parse(argv):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    command, path = _peek_config(argv)
    sub = _subparser(parser, command) if command else None
    if path and sub is not None:
        cfg = read_config(path, sub)
        # config values become defaults, so explicit flags still win
        for a in sub._actions:
            if a.dest in cfg:
                a.required = False
        sub.set_defaults(**cfg)
    return parser.parse_args(argv)


def params_of(args):
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in _PLUMBING or v is None:
            continue
        out[k] = [str(x) for x in v] if isinstance(v, list) else (str(v) if not isinstance(v, bool) else v)
    return out


def make_report(command, params, results, failures, sampled):
    return {
        "command": command,
        "params": params,
        "results": results,
        "failures": failures,
        "sampled": sampled,
        "version": __version__,
    }


def render(report, fmt, reps=None):
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        if reps is not None:
            return au.to_csv(reps)
        import csv
        import io

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for r in report["results"]:
            flat = {k: (json.dumps(v, sort_keys=True) if isinstance(v, (list, dict)) else v) for k, v in r.items()}
            if buf.tell() == 0:
                w.writerow(flat.keys())
            w.writerow(flat.values())
        return buf.getvalue()
    lines = []
    for r in report["results"]:
        if set(r) == {"value"}:
            lines.append(r["value"])
        elif report["command"] == "formula":
            lines.append(r["value"])
        else:
            lines.append(" ".join(f"{k}={_short(v)}" for k, v in r.items()))
    for f in report["failures"]:
        lines.append("FAILURE " + json.dumps(f, sort_keys=True))
    if report["sampled"]:
        lines.append("sampled: not a proof")
    return "\n".join(lines) + "\n"


def _short(v):
    if isinstance(v, list) and len(v) > 8:
        return f"[{len(v)} items]"
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return v


def _args_from_params(command, params):
    argv = [command]
    parser = build_parser()
    sub = _subparser(parser, command)
    positional = [a.dest for a in sub._actions if not a.option_strings and a.dest != "help"]
    for dest in positional:
        if dest in params:
            argv.append(str(params[dest]))
    acts = {a.dest: a for a in sub._actions}
    for k, v in params.items():
        if k in positional or k not in acts:
            continue
        flag = acts[k].option_strings[-1]
        if isinstance(v, bool):
            if v:
                argv.append(flag)
        elif isinstance(v, list):
            if acts[k].nargs is None and acts[k].type in (_ints,):
                argv += [flag, ",".join(v)]
            elif k == "strategies":
                argv += [flag, ",".join(v)]
            else:
                for x in v:
                    argv += [flag, x]
        else:
            argv += [flag, v]
    return parser.parse_args(argv)


def _execute(args):
    out = args.func(args)
    reps = None
    if len(out) == 4:
        results, failures, sampled, reps = out
    else:
        results, failures, sampled = out
    return results, failures, sampled, reps


def replay(path):
    """Re-run the command recorded in a JSON report and compare results."""
    try:
        old = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read report: {exc}") from exc
    for key in ("command", "params", "results"):
        if key not in old:
            raise UsageError(f"report lacks {key!r}")
    args = _args_from_params(old["command"], old["params"])
    results, failures, sampled, _ = _execute(args)
    res = {
        "replayed": old["command"],
        "results_match": results == old["results"],
        "failures_match": failures == old.get("failures", []),
    }
    fails = list(failures)
    if not res["results_match"]:
        fails.append({"replay": "results differ from the report"})
    return [res], fails, sampled


def run(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    try:
        args = parse(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    if getattr(args, "cache_dir", None):
        os.environ[lattice.CACHE_ENV] = args.cache_dir
    reps = None
    try:
        if getattr(args, "from_report", None):
            results, failures, sampled = replay(args.from_report)
        else:
            results, failures, sampled, reps = _execute(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QekrError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    report = make_report(args.command, params_of(args), results, failures, sampled)
    text = render(report, args.format, reps)
    if args.output:
        args.output.write_text(text)
    else:
        stdout.write(text)
    return 1 if failures else 0


def main():
    try:
        code = run()
    except BrokenPipeError:
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main()
