"""Empirical statistics over the level-1 eigenforms of a weight range."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import averages
from .errors import DomainError, PreconditionError
from .forms import DEFAULT_PREC, EigenformRecord, eigenforms_range, required_prec, trace_tn_star
from .measures import AngleInterval, MeasureSpec, measure_mass
from .primes import as_prime_power, is_prime, primes_up_to
from .qexp import dim_cusp
from .report import ExperimentReport, Table

DEFAULT_WEIGHTS = tuple(range(12, 302, 2))


def weight_range(kmin: int = 12, kmax: int = 300) -> Tuple[int, ...]:
    if kmin % 2:
        kmin += 1
    return tuple(range(kmin, kmax + 1, 2))


@lru_cache(maxsize=4)
def _forms_cached(weights: Tuple[int, ...], prec: int, workers: int) -> Dict[int, Tuple[EigenformRecord, ...]]:
    got = eigenforms_range(weights, prec, workers)
    return {k: tuple(v) for k, v in got.items()}


def forms_for(weights: Iterable[int], prec: int = DEFAULT_PREC, workers: int = 1) -> List[EigenformRecord]:
    """Every eigenform with weight in `weights`, in weight then embedding order (memoised)."""
    weights = tuple(sorted(set(weights)))
    if any(k < 12 or k % 2 for k in weights):
        raise PreconditionError("weights must be even and >= 12")
    by_k = _forms_cached(weights, prec, workers)
    return [f for k in weights for f in by_k.get(k, ())]


def _params(weights: Sequence[int], **extra) -> dict:
    ws = sorted(set(weights))
    out = {"kmin": ws[0], "kmax": ws[-1], "weights": len(ws)} if ws else {"weights": 0}
    out.update(extra)
    return out


# ---- census ------------------------------------------------------------

@dataclass(frozen=True)
class CensusEntry:
    k: int
    index: int
    p_f: Optional[int]
    n_f: Optional[int]
    signs: Tuple[int, ...]


@dataclass(frozen=True)
class SignCensus:
    weights: Tuple[int, ...]
    sign_bound: int
    entries: Tuple[CensusEntry, ...]

    def violations(self) -> List[str]:
        """Forms whose n_f is not a prime power or exceeds p_f."""
        bad = []
        for e in self.entries:
            if e.n_f is None or e.p_f is None:
                bad.append(f"k={e.k} #{e.index}: no sign change found")
            elif as_prime_power(e.n_f) is None:
                bad.append(f"k={e.k} #{e.index}: n_f={e.n_f} is not a prime power")
            elif e.n_f > e.p_f:
                bad.append(f"k={e.k} #{e.index}: n_f={e.n_f} > p_f={e.p_f}")
        return bad

    def table(self) -> Table:
        return Table.of(["k", "index", "p_f", "n_f"], [(e.k, e.index, e.p_f, e.n_f) for e in self.entries])


def census(weights: Iterable[int] = DEFAULT_WEIGHTS, sign_bound: int = 200, prec: int = DEFAULT_PREC,
           workers: int = 1) -> SignCensus:
    weights = tuple(sorted(set(weights)))
    if sign_bound > prec:
        raise PreconditionError("sign_bound must not exceed prec")
    entries = tuple(
        CensusEntry(f.k, f.index, f.p_f, f.n_f, f.signs(sign_bound)) for f in forms_for(weights, prec, workers)
    )
    return SignCensus(weights, sign_bound, entries)


def census_report(c: SignCensus) -> ExperimentReport:
    bad = c.violations()
    return ExperimentReport(
        "census",
        _params(c.weights, forms=len(c.entries)),
        observed=c.table(),
        deviation=float(len(bad)),
        tolerance=0.0,
        note="; ".join(bad[:5]) or None,
    )


# ---- experiments -------------------------------------------------------

def empirical_sign_fraction(p: int, weights: Iterable[int] = DEFAULT_WEIGHTS, tolerance: float = 0.1,
                            prec: int = DEFAULT_PREC, workers: int = 1) -> ExperimentReport:
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    weights = tuple(weights)
    forms = forms_for(weights, prec, workers)
    if not forms:
        raise DomainError("no eigenforms in the weight range")
    frac = sum(1 for f in forms if f.lam[p] > 0) / len(forms)
    return ExperimentReport(
        "sign-fraction", _params(weights, p=p, forms=len(forms)), frac, 0.5, abs(frac - 0.5), tolerance
    )


def empirical_angle_distribution(p: int, weights: Iterable[int] = DEFAULT_WEIGHTS, bins: int = 4,
                                 tolerance: float = 0.1, measure: str = "plancherel",
                                 prec: int = DEFAULT_PREC, workers: int = 1) -> ExperimentReport:
    """Histogram of theta_f(p) in equal bins of [0, pi] against the bin masses of mu_p (or mu_ST)."""
    if bins < 1:
        raise PreconditionError("bins must be >= 1")
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    weights = tuple(weights)
    forms = forms_for(weights, prec, workers)
    if not forms:
        raise DomainError("no eigenforms in the weight range")
    spec = MeasureSpec.plancherel(p) if measure == "plancherel" else MeasureSpec.sato_tate()
    counts = [0] * bins
    width = math.pi / bins
    for f in forms:
        counts[min(int(f.theta(p) / width), bins - 1)] += 1
    rows, worst = [], 0.0
    for i in range(bins):
        lo, hi = i * width, math.pi if i == bins - 1 else (i + 1) * width
        emp = counts[i] / len(forms)
        mass = measure_mass(spec, AngleInterval(lo, hi))
        worst = max(worst, abs(emp - mass))
        rows.append((lo, hi, counts[i], emp, mass))
    table = Table.of(["lo", "hi", "count", "empirical", "measure"], rows)
    return ExperimentReport(
        "angle-distribution", _params(weights, p=p, bins=bins, measure=spec.kind.value, forms=len(forms)),
        table, None, worst, tolerance,
    )


def empirical_average(kind: str, weights: Iterable[int] = DEFAULT_WEIGHTS, tolerance: Optional[float] = None,
                      prec: int = DEFAULT_PREC, workers: int = 1) -> ExperimentReport:
    """Mean of p_f or n_f over the range against the limiting average.

    The bands (0.35 for p_f, 0.25 for n_f by default) are sanity checks; no
    finite-weight convergence rate is known.
    """
    if kind not in ("p_f", "n_f"):
        raise PreconditionError("kind must be 'p_f' or 'n_f'")
    weights = tuple(weights)
    forms = forms_for(weights, prec, workers)
    if not forms:
        raise DomainError("no eigenforms in the weight range")
    values = [getattr(f, kind) for f in forms]
    if any(v is None for v in values):
        raise DomainError(f"some form has no sign change below {prec}; raise prec")
    mean = sum(values) / len(values)
    note = None
    if kind == "p_f":
        expected = averages.average_pf().value
        tolerance = 0.35 if tolerance is None else tolerance
    else:
        expected = averages.average_nf().value
        product = averages.average_nf(convention=averages.NfConvention.PRODUCT).value
        tolerance = 0.25 if tolerance is None else tolerance
        note = f"product-measure constant {product!r}, distance {abs(mean - product)!r}"
    return ExperimentReport(
        f"average-{kind.replace('_', '')}", _params(weights, forms=len(forms)), mean, expected,
        abs(mean - expected), tolerance, note,
    )


def positive_pattern_count(P: int, weights: Iterable[int] = DEFAULT_WEIGHTS, tolerance: Optional[float] = None,
                           prec: int = DEFAULT_PREC, workers: int = 1) -> ExperimentReport:
    """Forms with lambda_f(p) > 0 for every p <= P, against total / 2^pi(P)."""
    if P < 2:
        raise PreconditionError("P must be >= 2")
    weights = tuple(weights)
    forms = forms_for(weights, prec, workers)
    primes = primes_up_to(P)
    rows = []
    for j in range(1, len(primes) + 1):
        cnt = sum(1 for f in forms if all(f.lam[p] > 0 for p in primes[:j]))
        rows.append((primes[j - 1], cnt, len(forms) / 2**j))
    count = rows[-1][1]
    expected = len(forms) / 2 ** len(primes)
    dev = abs(count - expected) / len(forms) if forms else 0.0
    return ExperimentReport(
        "positive-patterns", _params(weights, P=P, forms=len(forms), count=count),
        Table.of(["p", "count", "total/2^j"], rows), expected, dev, tolerance,
    )


def trace_limit_experiment(n: int, weights: Iterable[int] = DEFAULT_WEIGHTS, tolerance: float = 0.05,
                           prec: int = DEFAULT_PREC) -> ExperimentReport:
    """Tr(T_n)/(n^((k-1)/2) dim) along the range; the limit is n^-1/2 for square n and 0 otherwise."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    weights = tuple(k for k in weights if dim_cusp(k) > 0)
    if not weights:
        raise DomainError("no cusp forms in the weight range")
    rows = []
    for k in weights:
        d = dim_cusp(k)
        # share the cached basis whenever it is long enough
        t = trace_tn_star(n, k, max(required_prec(n, k), prec))
        rows.append((k, d, t / d))
    r = math.isqrt(n)
    expected = 1 / r if r * r == n else 0.0
    final = rows[-1][2]
    return ExperimentReport(
        "trace-limit", _params(weights, n=n, final=final), Table.of(["k", "dim", "normalized_trace"], rows),
        expected, abs(final - expected), tolerance,
    )


def petersson_experiment(k: int = 12, bound: int = 10, tolerance: float = 1e-6) -> ExperimentReport:
    from .sieve import petersson_ratio_check

    rep = petersson_ratio_check(k, bound, tolerance)
    rows = [(m, n, r, e) for m, n, r, e in rep.failures]
    return ExperimentReport(
        "petersson-ratio", {"k": k, "bound": bound, "r11": rep.omega},
        Table.of(["m", "n", "ratio", "expected"], rows) if rows else rep.max_error, 0.0, rep.max_error, tolerance,
    )


def curly_j_experiment() -> ExperimentReport:
    from .sieve import curly_j_bound_check

    rep = curly_j_bound_check()
    note = None
    if rep.failures:
        note = "; ".join(f"k={k} alpha={a} x={x:.4g} ratio={r:.4g}" for k, a, x, r in rep.failures[:5])
    return ExperimentReport(
        "curly-j-bound", {"points": rep.checked, "worst": list(rep.worst) if rep.worst else None},
        rep.max_ratio, None, rep.max_ratio, rep.constant, note,
    )
