"""Command-line front end.

Exit codes: 0 success, 1 verification mismatch, 2 usage error or refusal,
3 incomplete result.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys

from . import __version__
from .caps import ENV_VAR, default_caps
from .codes import NotDecreasingError, decreasing_closure, generator_matrix, is_decreasing, load_code_spec
from .dyadic import Dyadic
from .enumerators import (
    count_disjoint_k_sum,
    count_nested_degree_drop,
    master_orbit_size,
    verify_report,
)
from .errors import CapExceeded, DomainError, InvariantViolation
from .lta import orbit, orbit_size_formula
from .monomial import evaluate, parse_monomial, parse_poly
from .oracle import full_weight_distribution
from .templates import factor_head_kernel, template_from_spec
from .weights import (
    ResidualFamily,
    dyadic_coefficients,
    dyadic_decompose,
    dyadic_numerator,
    general_weight,
    sigma,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INCOMPLETE = 0, 1, 2, 3


class Refusal(Exception):
    pass


def emit(payload: dict, args, rows: list | None = None, out=None):
    out = out or sys.stdout
    payload = {**payload, "seed": args.seed}
    if args.format == "json":
        out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return
    if rows is None:
        rows = [["key", "value"]] + [[k, _cell(v)] for k, v in sorted(payload.items())]
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    out.write(buf.getvalue())


def _cell(v):
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return v


def _want_eval(args, m: int) -> bool:
    """True when evaluation should run; refuses when verification is on but m is too large."""
    if not args.verify:
        return False
    cap = default_caps().eval_m
    if m > cap:
        raise Refusal(f"m={m} exceeds evaluation cap {cap}; rerun with --no-verify to skip the oracle")
    return True


# commands ---------------------------------------------------------------------

def cmd_weight(args) -> int:
    P = parse_poly(args.poly, args.m)
    if P.is_zero():
        payload = {"poly": "0", "m": P.m, "weight_formula": "0", "sigma": None}
        emit(payload, args)
        return EXIT_OK
    fam = ResidualFamily.from_poly(P)
    sig = sigma(fam)
    wt = general_weight(fam)
    dec = dyadic_decompose(sig, fam)
    payload = {
        "poly": str(P), "m": P.m, "r": fam.r, "head": str(fam.head),
        "weight_formula": str(wt), "sigma": str(sig),
        "dyadic": dec.to_json(), "sigma_terms": dec.terms_text(),
    }
    status = EXIT_OK
    if _want_eval(args, P.m):
        ev = evaluate(P).weight()
        payload["weight_eval"] = str(ev)
        payload["match"] = ev == wt
        status = EXIT_OK if ev == wt else EXIT_MISMATCH
    emit(payload, args)
    return status


def cmd_dyadic(args) -> int:
    P = parse_poly(args.poly, args.m)
    if P.is_zero():
        raise DomainError("the zero polynomial has no normalized weight")
    fam = ResidualFamily.from_poly(P)
    sig = sigma(fam)
    dec = dyadic_decompose(sig, fam)
    ok = dec.reconstruct() == sig and dyadic_numerator(fam) == dec.N
    payload = {
        "poly": str(P), "sigma": str(sig), "U": fam.U, "a_max": fam.a_max,
        **dec.to_json(), "terms": dec.terms_text(),
        "grouped_coefficients": {str(l): c for l, c in dyadic_coefficients(fam).items()},
        "reconstructs": ok,
    }
    rows = [["j", "b_j", "term"]] + [[j, b, str(Dyadic.pow2(j - dec.k)) if b else "0"] for j, b in dec.digits]
    emit(payload, args, rows)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_template(args) -> int:
    inst = template_from_spec(args.spec)
    payload = inst.to_json()
    status = EXIT_OK
    if _want_eval(args, inst.m):
        ev = inst.evaluated_weight()
        payload["evaluated_weight"] = str(ev)
        payload["match"] = ev == inst.predicted_weight
        status = EXIT_OK if payload["match"] else EXIT_MISMATCH
    emit(payload, args)
    return status


def cmd_code(args) -> int:
    if args.action == "closure":
        try:
            spec = json.loads(args.spec) if args.spec.lstrip().startswith("{") else None
        except json.JSONDecodeError:
            spec = None
        if spec is None:
            if args.m is None:
                raise DomainError("closure of a generator list needs --m")
            gens = [parse_monomial(t, args.m) for t in args.spec.split(",") if t.strip()]
            I = decreasing_closure(gens, args.m)
        else:
            I = load_code_spec(spec, close=True)
        emit({**I.to_json(), "dimension": I.dimension}, args,
             [["monomial"]] + [[str(f)] for f in I.sorted_monomials()])
        return EXIT_OK
    if args.action == "validate":
        spec = args.spec
        try:
            I = load_code_spec(spec)
        except NotDecreasingError as exc:
            emit({"decreasing": False, "missing": [str(f) for f in exc.missing]}, args)
            return EXIT_MISMATCH
        emit({"decreasing": is_decreasing(I.monomials, I.m), "m": I.m, "dimension": I.dimension,
              "r_plus": I.r_plus, "d_min": None if I.d_min is None else str(I.d_min)}, args)
        return EXIT_OK
    I = load_code_spec(args.spec)
    G = generator_matrix(I)
    rows = G.to_hex() if args.hex else G.to_strings()
    rank = G.rank()
    emit({"m": I.m, "dimension": I.dimension, "rank": rank, "ncols": G.ncols,
          "rows": rows, "monomials": [str(f) for f in I.sorted_monomials()]},
         args, [["monomial", "row"]] + [[str(f), r] for f, r in zip(I.sorted_monomials(), rows)])
    return EXIT_OK if rank == I.dimension else EXIT_MISMATCH


def cmd_enumerate(args) -> int:
    I = load_code_spec(args.spec)
    caps = default_caps()
    if args.verify and I.m > caps.orbit_m:
        raise Refusal(f"m={I.m} exceeds orbit cap {caps.orbit_m}; rerun with --no-verify")
    if args.kind == "nested_degree_drop":
        report = count_nested_degree_drop(I, args.r)
    else:
        r = I.r_plus if args.r is None else args.r
        if r is None:
            raise DomainError("empty code")
        k = 1 if args.kind == "min_weight" else args.k
        report = count_disjoint_k_sum(I, r, k, ordered=args.ordered)
    status = EXIT_INCOMPLETE if report.incomplete else EXIT_OK
    if args.verify and not report.incomplete:
        v = verify_report(report, I)
        exhaustive_claim = args.kind == "min_weight" or (
            args.kind == "disjoint_k_sum" and args.k == 1 and report.notes["r"] == I.r_plus)
        if exhaustive_claim:
            v["ok"] = v["ok"] and v.get("count_matches_exhaustive", True)
        report.verified = v
        if not v["ok"]:
            status = EXIT_MISMATCH
    payload = report.to_json()
    payload["kind"] = args.kind
    rows = [["weight", "count"], [str(report.weight), str(report.total_count)]]
    emit(payload, args, rows)
    return status


def cmd_spectrum(args) -> int:
    I = load_code_spec(args.spec)
    dist = full_weight_distribution(I)
    emit(dist.to_json(), args, [["weight", "count"]] + [[w, c] for w, c in sorted(dist.entries.items())])
    return EXIT_OK


def cmd_orbit(args) -> int:
    P = parse_poly(args.poly, args.m)
    if P.is_zero():
        raise DomainError("the zero polynomial is a fixed point")
    head = parse_monomial(args.head_fix, P.m) if args.head_fix else None
    summ = orbit(P, head_fix=head, with_elements=False)
    payload = {"poly": str(P), "m": P.m, "size": str(summ.size), "exponent": summ.exponent,
               "head_fix": None if head is None else str(head)}
    status = EXIT_OK
    if len(P.terms) == 1 and head is None:
        (mono,) = P.monomials()
        payload["formula_exponent"] = orbit_size_formula(mono)
        if summ.exponent != payload["formula_exponent"]:
            status = EXIT_MISMATCH
    if args.master:
        h, Q = factor_head_kernel(P)
        rep = master_orbit_size(h, Q)
        payload["master"] = rep.to_json()
        if args.verify and not rep.matches_head_stabilizer:
            status = EXIT_MISMATCH
    emit(payload, args)
    return status


def _selftest_checks(rng: random.Random) -> list[tuple[str, bool]]:
    from .codes import reed_muller
    from .enumerators import minimum_weight_count
    from .monomial import Monomial, weight_by_points

    checks = []
    P = parse_poly("x0*x1*x2 + x3*x4*x5 + x6*x7*x8", 9)
    fam = ResidualFamily.from_poly(P)
    checks.append(("disjoint cubics at m=9 weigh 148", general_weight(fam) == 148 == evaluate(P).weight()))
    checks.append(("normalized weight 37/16", str(sigma(fam)) == "37/16"))
    checks.append(("RM(1,3) spectrum", full_weight_distribution(reed_muller(1, 3)).entries == {0: 1, 4: 14, 8: 1}))
    checks.append(("RM(1,3) minimum-weight count 14", minimum_weight_count(reed_muller(1, 3)).total_count == 14))
    checks.append(("orbit of x1*x3 at m=4 has 32 elements",
                   orbit(Monomial(0b1010, 4), with_elements=False).size == 32))
    ok = True
    for _ in range(20):
        m = rng.randint(1, 7)
        terms = {rng.randrange(1 << m) for _ in range(rng.randint(1, 5))}
        Q = parse_poly(" + ".join(str(Monomial(t, m)) for t in terms), m)
        if Q.is_zero():
            continue
        ok &= general_weight(ResidualFamily.from_poly(Q)) == weight_by_points(Q)
    checks.append(("random weights agree with pointwise evaluation", ok))
    return checks


def cmd_selftest(args) -> int:
    checks = _selftest_checks(random.Random(args.seed))
    emit({"checks": {name: ok for name, ok in checks}, "passed": all(ok for _, ok in checks)},
         args, [["check", "passed"]] + [[n, ok] for n, ok in checks])
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_MISMATCH


# parser -----------------------------------------------------------------------

def _common(suppress: bool) -> argparse.ArgumentParser:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=["json", "csv"], default=d("json"))
    p.add_argument("--seed", type=int, default=d(0), help="seed for randomized runs, echoed in output")
    p.add_argument("--cap-m", type=int, default=d(None), help="orbit computation cap on m")
    p.add_argument("--cap-dim", type=int, default=d(None), help="code dimension cap for exhaustive runs")
    p.add_argument("--verify", action=argparse.BooleanOptionalAction, default=d(True),
                   help="compare with brute-force oracles (default on)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monospectrum", description=__doc__.splitlines()[0],
                                     parents=[_common(False)])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_common(True)]

    p = sub.add_parser("weight", parents=common, help="weight of a polynomial from its support structure")
    p.add_argument("poly")
    p.add_argument("--m", type=int)
    p.set_defaults(func=cmd_weight)

    p = sub.add_parser("dyadic", parents=common, help="binary digits of the normalized weight")
    p.add_argument("poly")
    p.add_argument("--m", type=int)
    p.set_defaults(func=cmd_dyadic)

    p = sub.add_parser("template", parents=common, help="build a template from a JSON spec")
    p.add_argument("spec", help='inline JSON or path, {"kind": ..., "m": ..., "params": {...}}')
    p.set_defaults(func=cmd_template)

    p = sub.add_parser("code", parents=common, help="decreasing code utilities")
    p.add_argument("action", choices=["validate", "closure", "matrix"])
    p.add_argument("spec", help='{"rm": [r, m]} or {"m": ..., "monomials": [...]}; for closure also "x0*x1,x2"')
    p.add_argument("--m", type=int)
    p.add_argument("--hex", action="store_true")
    p.set_defaults(func=cmd_code)

    p = sub.add_parser("enumerate", parents=common, help="orbit-sum codeword counts")
    p.add_argument("spec")
    p.add_argument("--kind", choices=["min_weight", "disjoint_k_sum", "nested_degree_drop"], default="min_weight")
    p.add_argument("--r", type=int)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--ordered", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("spectrum", parents=common, help="exhaustive weight distribution")
    p.add_argument("spec")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("orbit", parents=common, help="explicit LTA(m,2) orbit size")
    p.add_argument("poly")
    p.add_argument("--m", type=int)
    p.add_argument("--head-fix", help="restrict to the stabilizer of this monomial")
    p.add_argument("--master", action="store_true", help="also evaluate the head/kernel orbit formula")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("selftest", parents=common, help="quick identity checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def _apply_caps(args):
    caps = default_caps().with_overrides(orbit_m=args.cap_m, dim=args.cap_dim)
    os.environ[ENV_VAR] = f"eval_m={caps.eval_m},orbit_m={caps.orbit_m},dim={caps.dim}"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    saved = os.environ.get(ENV_VAR)
    try:
        _apply_caps(args)
        return args.func(args)
    except Refusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    finally:
        if saved is None:
            os.environ.pop(ENV_VAR, None)
        else:
            os.environ[ENV_VAR] = saved


if __name__ == "__main__":
    sys.exit(main())
