"""Command line entry point ``llab``.

Exit codes: 0 success, 1 usage or input error, 2 a checked implication was
falsified, 3 the check could not be decided.
"""
from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

import numpy as np

from . import counting, empirical, excursions, lattice, symbolic
from .output import COUNT_FOOTER, atomic_write, csv_text, emit_svg, json_text
from .realnum import InputError, parse_number, parse_rational

__all__ = ["main", "run", "build_parser"]

OK, USAGE, FALSIFIED, INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _number(text):
    try:
        return parse_number(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _rational(text):
    try:
        return parse_rational(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _floats(text):
    try:
        return [float(Fraction(v)) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad list {text!r}") from exc


def _pair(p):
    p.add_argument("--alpha", type=_number, required=True)
    p.add_argument("--beta", type=_number, required=True)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="llab", description="Diagonal orbits, cusp excursions and Littlewood counts.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("count", help="count n <= N with n<n alpha><n beta> below eps")
    _pair(p)
    p.add_argument("--eps", type=_rational, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--big-n", type=int)
    g.add_argument("--T", type=float)
    p.add_argument("--mode", choices=("strict", "closed"), default="strict")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--csv")

    p = sub.add_parser("orbit", help="systole along the flow grid")
    _pair(p)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--csv")

    p = sub.add_parser("excursions", help="cusp excursion triangles in [0,T]^2")
    _pair(p)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--svg")
    p.add_argument("--csv")

    p = sub.add_parser("measure", help="escape fraction bounds or observable averages")
    _pair(p)
    p.add_argument("--eps", type=_rational)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--grid", type=float)
    p.add_argument("--obs", default=None, help="systole:r1,r2,... | xeps:<eps> | const")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--csv")

    p = sub.add_parser("entropy", help="Bowen table or orbit coding entropy rates")
    p.add_argument("--k", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--alpha", type=_number)
    p.add_argument("--beta", type=_number)
    p.add_argument("--N", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--bins", type=_floats)
    p.add_argument("--threshold", type=float)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--csv")

    v = sub.add_parser("verify", help="finite-parameter checks").add_subparsers(
        dest="check", required=True, parser_class=_Parser)
    p = v.add_parser("cusp")
    _pair(p)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--report")
    p = v.add_parser("cover")
    _pair(p)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--margin", type=float, default=1e-9)
    p.add_argument("--report")
    p = v.add_parser("bowen")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--csv")
    p.add_argument("--report")
    p = v.add_parser("lemmas")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report")
    return ap


def _say(*lines):
    for line in lines:
        print(line)


# -- subcommands ---------------------------------------------------------------

def _cmd_count(a) -> int:
    N = a.big_n if a.big_n is not None else counting.count_limit(a.T)
    rep = counting.count_below(a.alpha, a.beta, a.eps, N, a.mode, a.threads,
                               store_hits=a.csv is not None)
    _say(f"N = {N}", f"count ({a.mode}) = {rep.count}",
         f"strict = {rep.count_strict}  closed = {rep.count_closed}",
         f"boundary cases = {len(rep.boundary_cases)}")
    if rep.running_min is not None:
        n, iv = rep.running_min
        lo, hi = iv.floats()
        _say(f"minimum at n = {n}: [{lo!r}, {hi!r}]")
    if a.csv:
        if rep.hits_truncated:
            raise InputError("too many hits to store")
        atomic_write(a.csv, csv_text("count", rep.hits, (COUNT_FOOTER, rep.count_strict, rep.count_closed)))
    return OK


def _cmd_orbit(a) -> int:
    pts = lattice.orbit_trace(a.alpha, a.beta, a.T, a.step, a.threads)
    rows = []
    for p in pts:
        lo, hi = p.systole.norm.floats()
        rows.append((p.s, p.t, lo, hi) + tuple(p.systole.coeffs))
    _say(f"points = {len(rows)}", f"min systole = {min(r[3] for r in rows)!r}")
    if a.csv:
        atomic_write(a.csv, csv_text("orbit", rows))
    return OK


def _excursion_table(alpha, beta, eps, T):
    exc = excursions.all_excursions(alpha, beta, eps, T)
    proj = {e.n: excursions.project(e, T) for e in exc}
    keys, _, _ = excursions.maximal_intervals([(n, lo, hi) for n, (lo, hi) in proj.items()])
    classes = excursions.equivalence_classes({n: proj[n] for n in keys}, eps)
    cls = {n: c.base for c in classes for n in c.members}
    rows = []
    for e in exc:
        lo, hi = proj[e.n]
        rows.append((e.n, e.m1, e.m2, e.r1.mid, e.r2.mid, e.leg, lo, hi, e.n in cls, cls.get(e.n)))
    return exc, rows


def _cmd_excursions(a) -> int:
    exc, rows = _excursion_table(a.alpha, a.beta, a.eps, a.T)
    _say(f"excursions = {len(exc)}", f"in Xi = {sum(1 for r in rows if r[8])}")
    if a.csv:
        atomic_write(a.csv, csv_text("excursions", rows))
    if a.svg:
        atomic_write(a.svg, emit_svg(exc, a.T))
    return OK


def _observable(text):
    kind, _, arg = text.partition(":")
    if kind == "systole":
        return empirical.SystoleBins([Fraction(v) for v in arg.split(",")])
    if kind == "xeps":
        return empirical.IndicatorXEps(Fraction(arg))
    if kind == "const":
        return empirical.Constant(float(arg) if arg else 1.0)
    raise InputError(f"unknown observable {text!r}")


def _cmd_measure(a) -> int:
    if a.grid is not None:
        if not a.obs:
            raise UsageError("--grid needs --obs")
        avg = empirical.observable_average(a.alpha, a.beta, a.T, a.grid, _observable(a.obs),
                                           workers=a.threads)
        rows = [(lab, m, avg.delta) for lab, m in zip(avg.labels, avg.masses)]
        for lab, m, _ in rows:
            _say(f"{lab}: {m!r}")
        _say(f"delta = {avg.delta!r}")
        if a.csv:
            atomic_write(a.csv, csv_text("average", rows))
        return OK
    if a.eps is None:
        raise UsageError("measure needs --eps (or --grid with --obs)")
    b = empirical.escape_fraction(a.alpha, a.beta, a.eps, a.T, a.depth, a.threads)
    rows = [("lower", b.lower), ("upper", b.upper), ("unresolved", b.unresolved_area)]
    for q, v in rows:
        _say(f"{q} = {v!r}")
    if a.csv:
        atomic_write(a.csv, csv_text("measure", rows))
    return OK


def _cmd_entropy(a) -> int:
    if a.k is not None:
        if a.n_max is None or a.t is None:
            raise UsageError("the Bowen table needs --k, --n-max and --t")
        rows = symbolic.bowen_bound_check(a.k, a.n_max, a.t)
        table = [(r.N, r.count, r.rate, r.envelope, r.ok) for r in rows]
        for r in table:
            _say(",".join(map(str, r)))
        if a.csv:
            atomic_write(a.csv, csv_text("bowen", table))
        return OK if all(r.ok for r in rows) else FALSIFIED
    if None in (a.alpha, a.beta, a.N, a.M, a.bins):
        raise UsageError("orbit coding needs --alpha, --beta, --N, --M and --bins")
    oc = symbolic.orbit_coding(a.alpha, a.beta, a.N, a.M, a.bins, a.threshold, a.threads)
    table = [(r.n, "".join(map(str, r.symbols)), r.rate, r.flagged) for r in oc.rows]
    for r in table:
        _say(f"row {r[0]}: rate = {r[2]!r}{'  (flagged)' if r[3] else ''}")
    _say(f"cusp fraction = {oc.cusp_fraction}")
    if a.csv:
        atomic_write(a.csv, csv_text("coding", table))
    return OK


# -- verification ---------------------------------------------------------------

def _report(a, config: dict, checks: list[dict]) -> int:
    statuses = [c["status"] for c in checks]
    if "fail" in statuses:
        summary, code = "fail", FALSIFIED
    elif "inconclusive" in statuses:
        summary, code = "inconclusive", INCONCLUSIVE
    else:
        summary, code = "pass", OK
    for c in checks:
        _say(f"{c['name']}: {c['status']}")
    _say(f"summary: {summary}")
    if getattr(a, "report", None):
        atomic_write(a.report, json_text({"config": config, "checks": checks, "summary": summary}))
    return code


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (Fraction, np.integer, np.floating)):
        return str(v) if isinstance(v, Fraction) else v.item()
    return v


def _verify_cusp(a) -> int:
    rep = excursions.verify_cusp_proposition(a.alpha, a.beta, a.eps, a.T, a.gamma, a.depth, a.threads)
    checks = [{"name": c.name, "status": c.status, "witnesses": _jsonable(c.detail)} for c in rep.checks]
    code = _report(a, _jsonable(rep.config), checks)
    _say(f"status: {rep.status}")
    return code


def _verify_cover(a) -> int:
    rep = excursions.verify_cover_identity(a.alpha, a.beta, a.eps, a.T, a.samples, a.seed, a.margin)
    config = {"alpha": str(a.alpha), "beta": str(a.beta), "eps": str(a.eps), "T": a.T,
              "samples": a.samples, "seed": a.seed, "margin": a.margin}
    checks = [{"name": "cover_identity", "status": rep.status,
               "witnesses": {"compared": rep.compared, "excluded": rep.excluded,
                             "boundary": rep.boundary, "agree": rep.agree,
                             "disagreements": [list(p) for p in rep.disagreements[:20]]}}]
    return _report(a, config, checks)


def _verify_bowen(a) -> int:
    rows = symbolic.bowen_bound_check(a.k, a.n_max, a.t)
    table = [(r.N, r.count, r.rate, r.envelope, r.ok) for r in rows]
    if a.csv:
        atomic_write(a.csv, csv_text("bowen", table))
    for r in table:
        _say(",".join(map(str, r)))
    exact = [r.N for r in rows if a.k ** r.N <= 10 ** 6
             and symbolic.bowen_count(a.k, r.N, a.t, "exhaustive") != symbolic.bowen_count(a.k, r.N, a.t, "types")]
    bad = [r.N for r in rows if not r.ok]
    checks = [
        {"name": "envelope", "status": "fail" if bad else "pass", "witnesses": {"N": bad}},
        {"name": "exhaustive_vs_types", "status": "fail" if exact else "pass", "witnesses": {"N": exact}},
    ]
    return _report(a, {"k": a.k, "n_max": a.n_max, "t": a.t}, checks)


def lemma_checks(samples: int, seed: int) -> list[dict]:
    """Conjugation rates, the Minkowski bound, the growth constant and the
    doubling-set example, each as a check record."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        u1, u2 = rng.uniform(-1, 1, size=2)
        for (s, t), (k1, k2) in (((1.0, 0.0), (math.e ** 2, math.e)), ((0.0, 1.0), (math.e, math.e ** 2))):
            got = lattice.conjugate(lattice.flow_matrix(s, t), lattice.tau_matrix(u1, u2))
            want = lattice.tau_matrix(k1 * u1, k2 * u2)
            worst = max(worst, float(np.max(np.abs(got - want))))
    mink = []
    for i in range(samples):
        x = lattice.random_unimodular(rng)
        if x.systole().norm.lo > 1 + 1e-9:
            mink.append(i)
    const = symbolic.growth_constant()
    lam = excursions.lambda_set(7, 6.3)
    return [
        {"name": "conjugation_rates", "status": "pass" if worst <= 1e-12 else "fail",
         "witnesses": {"max_error": worst}},
        {"name": "minkowski_bound", "status": "fail" if mink else "pass",
         "witnesses": {"samples": samples, "violations": mink[:20]}},
        {"name": "growth_constant", "status": "pass" if const < 15 else "fail",
         "witnesses": {"value": str(const)[:12]}},
        {"name": "doubling_set", "status": "pass" if lam == [7, 14, 28, 56] else "fail",
         "witnesses": {"lambda": lam}},
    ]


def _verify_lemmas(a) -> int:
    return _report(a, {"samples": a.samples, "seed": a.seed}, lemma_checks(a.samples, a.seed))


COMMANDS = {
    "count": _cmd_count,
    "orbit": _cmd_orbit,
    "excursions": _cmd_excursions,
    "measure": _cmd_measure,
    "entropy": _cmd_entropy,
}
CHECKS = {"cusp": _verify_cusp, "cover": _verify_cover, "bowen": _verify_bowen, "lemmas": _verify_lemmas}


def run(argv=None) -> int:
    try:
        a = build_parser().parse_args(argv)
        if a.cmd == "verify":
            return CHECKS[a.check](a)
        return COMMANDS[a.cmd](a)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return USAGE
    except InputError as exc:
        print(f"llab: error: {exc}", file=sys.stderr)
        return USAGE


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
