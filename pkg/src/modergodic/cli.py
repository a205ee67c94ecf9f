"""Command-line front end.

Every subcommand prints one report. JSON reports carry ``"schema": 1``, the
normalized argument vector that produced them, and a ``result`` object in which
exact rationals are strings "num/den" in lowest terms. ``verify`` re-runs the
stored arguments and compares every field.

Exit status: 0 ok, 1 usage or input error, 2 a checked inequality or identity failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import averages, bounds, combinatorics
from .polynomials import PolyParseError, format_poly, parse_and_validate
from .ring import DomainError, factorize
from .sets import ResidueSet, SetParseError, parse_set

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def encode(obj: Any) -> Any:
    """Make a result JSON-safe; fractions become 'num/den'."""
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, ResidueSet):
        return obj.elements
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    return str(obj)


# ---------------------------------------------------------------------------
# subcommands: each returns (result dict, ok flag)


def _modulus(args):
    if args.n is None:
        raise UsageError("--n is required")
    if args.n <= 1:
        raise UsageError("--n must exceed 1")
    return factorize(args.n)


def _sets(args, M) -> Tuple[ResidueSet, ResidueSet]:
    A = parse_set(args.set_a, M)
    B = parse_set(args.set_b, M) if args.set_b is not None else A
    return A, B


def cmd_average(args):
    M = _modulus(args)
    A, B = _sets(args, M)
    P = parse_and_validate(args.poly)
    rep = averages.polynomial_average(A, B, P, averages.correlation_profile(A, B, args.backend))
    return {
        "n": M.N, "poly": format_poly(P.monomial_coeffs), "mu_a": A.measure, "mu_b": B.measure,
        "average": rep.average, "product": rep.product,
        "signed_deviation": rep.deviation, "deviation": abs(rep.deviation),
    }, True


def cmd_deviation_scan(args):
    M = _modulus(args)
    P = parse_and_validate(args.poly)
    mode = args.mode
    if mode == "auto":
        mode = "exhaustive" if M.N <= args.max_exhaustive else "sampled"
    if mode == "exhaustive":
        res = averages.max_deviation_exhaustive(M, P, symmetry=not args.no_symmetry,
                                                max_exhaustive=args.max_exhaustive, workers=args.workers)
    else:
        res = averages.max_deviation_sampled(M, P, samples=args.samples, seed=args.seed)
    return {
        "n": M.N, "poly": format_poly(P.monomial_coeffs), "mode": res.mode,
        "proven_maximum": res.mode == "exhaustive", "max_deviation": res.max_deviation,
        "signed_deviation": res.signed_deviation, "witness": res.witness, "examined": res.examined,
    }, True


def cmd_pkgoal(args):
    p, k = args.prime, args.power
    if p is None or k is None:
        raise UsageError("--prime and --power are required")
    A = parse_set(args.set_a, p ** k)
    rep = averages.pkgoal_check(A, p, k, permissive=args.permissive)
    out = {
        "prime": p, "power": k, "lhs": rep.lhs, "rhs": rep.rhs, "equal": rep.equal,
        "asserted": rep.asserted, "terms": {str(t.m): t.inner for t in rep.terms},
    }
    return out, rep.equal or not rep.asserted


def cmd_expsum(args):
    M = _modulus(args)
    if args.j is not None:
        val = bounds.expsum_exact(M, args.j, args.degree)
        rhs = Fraction(args.degree, M.lpf)
        return {"n": M.N, "degree": args.degree, "j": args.j, "value": val, "bound": rhs,
                "holds": val <= rhs}, val <= rhs
    rep = bounds.expsum_bound_check(M, args.degree)
    return {"n": M.N, "degree": args.degree, "worst_j": rep.worst_j, "lhs": rep.lhs,
            "rhs": rep.rhs, "holds": rep.holds}, bool(rep.holds)


def _signal(args, M):
    if args.signal is not None:
        vals = [_rational(v) for v in args.signal.split(",")]
        if len(vals) != M.N:
            raise UsageError(f"--signal needs {M.N} values, got {len(vals)}")
        return bounds.ComplexSignal.from_values(M, vals)
    A = parse_set(args.set_a, M)
    return A


def cmd_bounds(args):
    M = _modulus(args)
    src = _signal(args, M)
    if args.kind == "lpf-bound":
        f = src if isinstance(src, bounds.ComplexSignal) else bounds.ComplexSignal.from_values(
            M, [int(x) for x in src.membership])
        rep = bounds.weighted_linear_check(f, args.degree)
        return {"kind": args.kind, "n": M.N, "degree": args.degree, "lhs": rep.lhs, "rhs": rep.rhs,
                "holds": rep.holds, "note": rep.note}, rep.holds is not False
    P = parse_and_validate(args.poly)
    try:
        rep = bounds.average_norm_check(src, P, chain=args.kind == "vdc")
        applicable = True
    except bounds.InapplicableBound as exc:
        rep, applicable = exc.report, False
    out = {
        "kind": args.kind, "n": M.N, "poly": format_poly(P.monomial_coeffs), "applicable": applicable,
        "lhs": rep.lhs, "rhs": rep.rhs, "holds": rep.holds, "note": rep.note,
        "norm_squared": rep.lhs_squared, "compared_power": rep.compared_power,
        "reduction_ok": rep.reduction_ok,
    }
    if args.kind == "vdc":
        out["chain"] = [{"d": d, "lhs": l, "rhs": r, "holds": h} for d, l, r, h in rep.chain]
    return out, rep.holds is not False


def cmd_thresholds(args):
    P = parse_and_validate(args.poly)
    rep = bounds.thresholds(P, args.mu_a, args.mu_b, args.eps, args.delta)
    return {
        "poly": format_poly(P.monomial_coeffs), "C_P": rep.C_P, "threshold": rep.threshold,
        "epsilon": rep.epsilon, "delta": rep.delta, "C": rep.C,
        "quantitative_threshold": rep.quantitative_threshold, "degenerate": rep.degenerate,
    }, True


def cmd_pair_count(args):
    M = _modulus(args)
    A, B = _sets(args, M)
    P = parse_and_validate(args.poly)
    rep = combinatorics.pair_count(A, B, P, args.eps)
    return {
        "n": M.N, "poly": format_poly(P.monomial_coeffs), "s": rep.s, "expected": rep.expected,
        "epsilon_achieved": rep.epsilon_achieved, "threshold": rep.threshold,
        "threshold_ok": rep.threshold_ok,
    }, True


def _coverage_out(M, rep):
    return {"n": M.N, "covered": rep.covered, "missing": list(rep.missing),
            "witness_triples": [{"x": x, "a": a, "b": b, "s": s} for x, a, b, s in rep.witness_triples]}


def cmd_coverage(args):
    M = _modulus(args)
    A, B = _sets(args, M)
    Q = parse_and_validate(args.poly)
    rep = combinatorics.coverage_check(A, B, Q, witnesses=args.witnesses)
    out = _coverage_out(M, rep)
    out["poly"] = format_poly(Q.monomial_coeffs)
    return out, True


def cmd_waring(args):
    N = args.prime if args.prime is not None else args.n
    if N is None or args.power is None:
        raise UsageError("waring needs --prime (or --n) and --power")
    M = factorize(N)
    Q = parse_and_validate(f"n^{args.power}")
    S = parse_set(f"image(n^{args.power})", M)
    rep = combinatorics.coverage_check(S, S, Q, witnesses=args.witnesses)
    out = _coverage_out(M, rep)
    out["power"] = args.power
    return out, True


def cmd_weil_count(args):
    p = args.prime
    if p is None:
        raise UsageError("--prime is required")
    polys = [parse_and_validate(t if t is not None else args.poly) for t in (args.f1, args.f2, args.f3)]
    rep = combinatorics.solution_count_three(*polys, args.c, p)
    return {"prime": p, "c": args.c % p, "polys": [format_poly(F.monomial_coeffs) for F in polys],
            "count": rep.count, "weil_lower": rep.weil_lower, "holds": rep.holds,
            "asserted": rep.holds is not None}, rep.holds is not False


def cmd_counterexample(args):
    P = parse_and_validate(args.poly) if args.poly is not None else None
    w = combinatorics.construct_counterexample(
        args.kind, p=args.prime, k=args.k, P=P, N=args.n, c=args.c, search_bound=args.search_bound
    )
    out = {"kind": w.kind, "n": w.modulus.N, "params": w.params,
           "sets": {name: s for name, s in w.sets.items()},
           "poly": format_poly(w.polynomial.monomial_coeffs) if w.polynomial is not None else None,
           "predicted": w.predicted, "observed": w.observed}
    if args.kind == "interval":
        ok = w.observed > 0
    else:
        ok = w.matches
        if args.kind == "nonpermutation":
            p = w.params["p"]
            out["stated_bound"] = Fraction(1, p * p)
            ok = ok and w.observed >= Fraction(1, p * p)
    out["holds"] = ok
    return out, ok


def cmd_reproduce(args):
    from .reproduce import CRITERIA, run_criteria

    if not args.all and not args.criterion:
        raise UsageError("pass --all or --criterion N")
    nums = sorted(CRITERIA) if args.all else args.criterion
    for i in nums:
        if i not in CRITERIA:
            raise UsageError(f"no criterion {i}")
    results = run_criteria(nums)
    for r in results:
        print(r.line(), file=sys.stderr)
    out = {"criteria": [{"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail}
                        for r in results]}
    return out, all(r.passed for r in results)


def cmd_verify(args):
    text = sys.stdin.read() if args.report == "-" else open(args.report).read()
    try:
        claimed = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"report is not JSON: line {exc.lineno}, column {exc.colno}")
    if not isinstance(claimed, dict) or claimed.get("schema") != SCHEMA or "argv" not in claimed:
        raise UsageError("not a schema 1 report")
    if claimed["argv"][:1] == ["verify"]:
        raise UsageError("refusing to verify a verify report")
    sub = build_parser().parse_args(claimed["argv"])
    result, ok = sub.handler(sub)
    fresh = encode(result)
    diffs = sorted(k for k in set(fresh) | set(claimed.get("result", {}))
                   if fresh.get(k) != claimed.get("result", {}).get(k))
    return {"command": claimed.get("command"), "matches": not diffs, "mismatched_fields": diffs,
            "recomputed_ok": ok}, not diffs


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modergodic", description="Exact polynomial averages on Z/NZ.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, handler, *flags, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(handler=handler)
        p.add_argument("--output", choices=("json", "csv", "text"), default="json")
        for flag in flags:
            flag(p)
        return p

    n = lambda p: p.add_argument("--n", type=int)
    sets = lambda p: (p.add_argument("--set-a", default="full"), p.add_argument("--set-b"))
    poly = lambda p: p.add_argument("--poly", default="n^2")
    prime = lambda p: p.add_argument("--prime", type=int)
    power = lambda p: p.add_argument("--power", type=int)
    eps = lambda p: p.add_argument("--eps", type=_rational, default=Fraction(1))
    seed = lambda p: p.add_argument("--seed", type=_seed, default=0)
    workers = lambda p: p.add_argument("--workers", type=int, default=1)
    degree = lambda p: p.add_argument("--degree", type=int, default=1)
    witnesses = lambda p: p.add_argument("--witnesses", type=int, default=8)

    p = add("average", cmd_average, n, sets, poly)
    p.add_argument("--backend", choices=("auto", "bitset", "transform"), default="auto")
    p = add("deviation-scan", cmd_deviation_scan, n, poly, seed, workers)
    p.add_argument("--mode", choices=("auto", "exhaustive", "sampled"), default="auto")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--max-exhaustive", type=int, default=averages.DEFAULT_MAX_EXHAUSTIVE)
    p.add_argument("--no-symmetry", action="store_true")
    p = add("pkgoal", cmd_pkgoal, prime, power)
    p.add_argument("--set-a", default="full")
    p.add_argument("--permissive", action="store_true")
    p = add("expsum", cmd_expsum, n, degree)
    p.add_argument("--j", type=int)
    p = add("bounds", cmd_bounds, n, poly, degree)
    p.add_argument("--kind", choices=("lpf-bound", "vdc", "norm"), default="norm")
    p.add_argument("--set-a", default="full")
    p.add_argument("--signal", help="comma separated rational values f(0), ..., f(N-1)")
    p = add("thresholds", cmd_thresholds, poly, eps)
    p.add_argument("--mu-a", type=_rational, default=Fraction(1, 2))
    p.add_argument("--mu-b", type=_rational, default=Fraction(1, 2))
    p.add_argument("--delta", type=_rational, default=Fraction(1))
    add("pair-count", cmd_pair_count, n, sets, poly, eps)
    add("coverage", cmd_coverage, n, sets, poly, witnesses)
    add("waring", cmd_waring, n, prime, power, witnesses)
    p = add("weil-count", cmd_weil_count, prime, poly)
    for f in ("--f1", "--f2", "--f3"):
        p.add_argument(f)
    p.add_argument("--c", type=int, default=0)
    p = add("counterexample", cmd_counterexample, n, prime)
    p.add_argument("--kind", choices=("under", "over", "nonpermutation", "interval"), required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--poly")
    p.add_argument("--c", type=int)
    p.add_argument("--search-bound", type=int, default=combinatorics.DIRICHLET_SEARCH_BOUND)
    p = add("reproduce", cmd_reproduce)
    p.add_argument("--all", action="store_true")
    p.add_argument("--criterion", type=int, nargs="+")
    p = add("verify", cmd_verify)
    p.add_argument("report", help="JSON report file, or - for stdin")
    return parser


def _normalized_argv(args, argv: Sequence[str]) -> List[str]:
    """Original arguments minus --output, so verify can replay them."""
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok == "--output":
            skip = True
            continue
        if tok.startswith("--output="):
            continue
        out.append(tok)
    return out


def _flatten(obj: Any, prefix: str = "") -> List[Tuple[str, Any]]:
    if isinstance(obj, dict):
        rows = []
        for k, v in obj.items():
            rows += _flatten(v, f"{prefix}.{k}" if prefix else str(k))
        return rows
    if isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        rows = []
        for i, v in enumerate(obj):
            rows += _flatten(v, f"{prefix}.{i}")
        return rows
    if isinstance(obj, list):
        return [(prefix, " ".join(map(str, obj)))]
    return [(prefix, obj)]


def render(report: Dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    rows = _flatten(report["result"])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["field", "value"])
        w.writerows(rows)
        return buf.getvalue()
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        result, ok = args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PolyParseError, SetParseError, DomainError, OSError, ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {"schema": SCHEMA, "command": args.command, "argv": _normalized_argv(args, argv),
              "ok": ok, "result": encode(result)}
    sys.stdout.write(render(report, args.output))
    return EXIT_OK if ok else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
