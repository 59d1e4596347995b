"""Command-line interface.

Every subcommand produces one or more ExperimentReports. Exit status is 0
when nothing failed, 1 if any verdict is fail and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from . import __version__, cache, config
from .errors import NumericalFailure, PreconditionError
from .report import ExperimentReport, FAIL, Table, format_csv, format_text

REFERENCE_PF = 3.674643966011328
REFERENCE_NF = 2.9423403000531483


def _floats(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t.strip()]


# ---- commands ----------------------------------------------------------

def cmd_constants(args, settings) -> List[ExperimentReport]:
    from .averages import NfConvention, average_nf, average_pf

    pf = average_pf(min(args.tol, 1e-12))
    nf = average_nf(args.tol)
    prod = average_nf(args.tol, NfConvention.PRODUCT)
    return [
        ExperimentReport("avg_pf", {"tol": args.tol, "terms": pf.terms_used, "tail_bound": pf.tail_bound},
                         pf.value, REFERENCE_PF, abs(pf.value - REFERENCE_PF), args.tol),
        ExperimentReport("avg_nf", {"tol": args.tol, "terms": nf.terms_used, "tail_bound": nf.tail_bound,
                                    "convention": "target"},
                         nf.value, REFERENCE_NF, abs(nf.value - REFERENCE_NF), args.tol),
        ExperimentReport("avg_nf_product", {"tol": args.tol, "terms": prod.terms_used,
                                            "tail_bound": prod.tail_bound, "convention": "product"},
                         prod.value),
    ]


def cmd_measure(args, settings) -> List[ExperimentReport]:
    from .measures import AngleInterval, MeasureSpec, measure_mass, measure_mass_quadrature

    if args.kind == "plancherel" and args.p is None:
        raise PreconditionError("--p is required for the plancherel measure")
    spec = MeasureSpec.sato_tate() if args.kind == "st" else MeasureSpec.plancherel(args.p)
    interval = AngleInterval(args.lo, args.hi)
    closed = measure_mass(spec, interval)
    quad = measure_mass_quadrature(spec, interval)
    return [ExperimentReport("measure", {"kind": args.kind, "p": args.p, "lo": args.lo, "hi": args.hi},
                             closed, quad, abs(closed - quad), 1e-10, "expected = adaptive quadrature")]


def cmd_intervals(args, settings) -> List[ExperimentReport]:
    from .intervals import constraint_system
    from .primes import PrimePower

    system = constraint_system(PrimePower.parse(args.target))
    rows = [(r["p"], r["kind"], r["lo"], r["hi"]) for r in system.rows()]
    return [ExperimentReport("intervals", {"target": str(system.target)},
                             Table.of(["p", "kind", "lo", "hi"], rows))]


def cmd_forms(args, settings) -> List[ExperimentReport]:
    from .forms import RESIDUAL_TOL, eigenforms

    prec = args.prec or settings.prec
    records = eigenforms(args.k, prec)
    rows = [(f.index, f.lam[2], f.lam[3], f.p_f, f.n_f, f.residual) for f in records]
    worst = max((f.residual for f in records), default=0.0)
    return [ExperimentReport("forms", {"k": args.k, "prec": prec, "forms": len(records)},
                             Table.of(["index", "lambda(2)", "lambda(3)", "p_f", "n_f", "residual"], rows),
                             None, worst, RESIDUAL_TOL)]


def cmd_census(args, settings) -> List[ExperimentReport]:
    from .experiments import census, census_report, weight_range

    c = census(weight_range(args.kmin, args.kmax), prec=settings.prec, workers=settings.threads)
    return [census_report(c)]


def cmd_experiment(args, settings) -> List[ExperimentReport]:
    from . import experiments as ex

    ws = ex.weight_range(args.kmin, args.kmax)
    common = {"prec": settings.prec}
    if args.id == "sign-fraction":
        return [ex.empirical_sign_fraction(args.p, ws, args.tol or 0.1, workers=settings.threads, **common)]
    if args.id == "angle-distribution":
        return [ex.empirical_angle_distribution(args.p, ws, args.bins, args.tol or 0.1, args.measure,
                                                workers=settings.threads, **common)]
    if args.id == "average":
        return [ex.empirical_average(args.kind, ws, args.tol, workers=settings.threads, **common)]
    if args.id == "positive-patterns":
        return [ex.positive_pattern_count(args.P, ws, args.tol, workers=settings.threads, **common)]
    if args.id == "trace-limit":
        return [ex.trace_limit_experiment(args.n, ws, args.tol or 0.05, **common)]
    if args.id == "petersson-ratio":
        return [ex.petersson_experiment(args.k, args.bound, args.tol or 1e-6)]
    if args.id == "curly-j-bound":
        return [ex.curly_j_experiment()]
    raise PreconditionError(f"unknown experiment {args.id}")


def cmd_sieve(args, settings) -> List[ExperimentReport]:
    from . import sieve

    if args.what == "kloosterman":
        s = sieve.kloosterman(args.m, args.n, args.c)
        w = sieve.weil_bound(args.m, args.n, args.c)
        # pass iff the Weil bound holds
        return [ExperimentReport("kloosterman", {"m": args.m, "n": args.n, "c": args.c}, s, w,
                                 max(0.0, abs(s) - w), 1e-9, "expected = Weil bound")]
    if args.what == "tail":
        t = sieve.petersson_tail(args.m, args.n, args.k, args.N, args.c_max)
        return [ExperimentReport("petersson-tail", {"m": args.m, "n": args.n, "k": args.k, "N": args.N,
                                                    "c_max": t.c_max, "truncation_bound": t.truncation_bound},
                                 t.value, note=t.warning)]
    if args.what == "bounds":
        params = sieve.SieveParams(args.k, args.N, args.M, args.alpha)
        out = []
        if params.constraint:
            out.append(ExperimentReport("delta-bound", {"k": args.k, "N": args.N, "M": args.M,
                                                        "alpha": args.alpha}, sieve.delta_bound(params)))
        out.append(ExperimentReport("complete-sieve-bound", {"k": args.k, "N": args.N, "M": args.M,
                                                             "epsilon": args.epsilon},
                                    sieve.complete_sieve_bound(args.M, args.N, args.k, args.epsilon)))
        return out
    if args.what == "h-sum":
        value = sieve.sieve_H(args.M, args.beta, args.N, args.delta, _floats(args.alphas))
        return [ExperimentReport("h-sum", {"M": args.M, "beta": args.beta, "N": args.N, "delta": args.delta,
                                           "alphas": args.alphas}, value)]
    raise PreconditionError(f"unknown sieve evaluator {args.what}")


# ---- parser ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heckesign", description="First sign changes of Hecke eigenvalues.", allow_abbrev=False
    )
    parser.add_argument("--version", action="version", version=__version__)
    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="one JSON object per result")
    fmt.add_argument("--csv", action="store_true", help="CSV tables")
    parser.add_argument("--config", help="key=value settings file (default $%s)" % config.ENV_VAR)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", allow_abbrev=False, help="limiting averages of p_f and n_f")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("measure", allow_abbrev=False, help="mass of an angle interval")
    p.add_argument("--kind", choices=["st", "plancherel"], required=True)
    p.add_argument("--p", type=int)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("intervals", allow_abbrev=False, help="angle constraints for a target prime power")
    p.add_argument("--target", required=True, help="e.g. 9 or 3^2")
    p.set_defaults(func=cmd_intervals)

    p = sub.add_parser("forms", allow_abbrev=False, help="eigenforms of one weight")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--prec", type=int)
    p.set_defaults(func=cmd_forms)

    p = sub.add_parser("census", allow_abbrev=False, help="p_f and n_f for every form up to a weight")
    p.add_argument("--kmax", type=int, default=300)
    p.add_argument("--kmin", type=int, default=12)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("experiment", allow_abbrev=False, help="run one empirical experiment")
    p.add_argument("id", choices=["sign-fraction", "angle-distribution", "average", "positive-patterns",
                                  "trace-limit", "petersson-ratio", "curly-j-bound"])
    p.add_argument("--kmin", type=int, default=12)
    p.add_argument("--kmax", type=int, default=300)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--P", type=int, default=2)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--k", type=int, default=12)
    p.add_argument("--bins", type=int, default=4)
    p.add_argument("--bound", type=int, default=10)
    p.add_argument("--kind", choices=["p_f", "n_f"], default="n_f")
    p.add_argument("--measure", choices=["plancherel", "st"], default="plancherel")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("sieve", allow_abbrev=False, help="analytic evaluators")
    p.add_argument("what", choices=["kloosterman", "tail", "bounds", "h-sum"])
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--c", type=int, default=1)
    p.add_argument("--k", type=int, default=12)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--M", type=float, default=10)
    p.add_argument("--c-max", type=int)
    p.add_argument("--alpha", type=float, default=0.6)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=3)
    p.add_argument("--delta", type=float, default=0.25)
    p.add_argument("--alphas", default="0.5,0.25", help="comma-separated coefficients")
    p.set_defaults(func=cmd_sieve)
    return parser


def emit(reports: List[ExperimentReport], args, out=None) -> None:
    out = out or sys.stdout
    if args.json:
        for r in reports:
            print(r.to_json(), file=out)
    elif args.csv:
        out.write(format_csv(reports))
    else:
        print("\n\n".join(format_text(r) for r in reports), file=out)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        settings = config.load(args.config)
    except (OSError, ValueError) as exc:
        print(f"heckesign: bad config: {exc}", file=sys.stderr)
        return 2
    if settings.cache_dir:
        cache.set_cache_dir(settings.cache_dir)
    if args.command == "sieve" and args.what == "h-sum" and args.M != int(args.M):
        parser.error("--M must be an integer for h-sum")
    if args.command == "sieve" and args.what == "h-sum":
        args.M = int(args.M)
    try:
        reports = args.func(args, settings)
    except ValueError as exc:  # precondition and domain errors included
        print(f"heckesign: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"heckesign: numerical failure: {exc}", file=sys.stderr)
        return 1
    emit(reports, args)
    return 1 if any(r.verdict == FAIL for r in reports) else 0


if __name__ == "__main__":
    sys.exit(main())
