"""Tail-bounded evaluation of the limiting averages of p_f and n_f."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List

from .errors import PreconditionError
from .intervals import constraint_system
from .measures import plancherel_mass
from .primes import PrimePower, nth_prime_upper_bound, prime_powers_up_to, primes_up_to


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    tail_bound: float

    def as_dict(self) -> dict:
        return {"value": self.value, "terms_used": self.terms_used, "tail_bound": self.tail_bound}


class NfConvention(str, enum.Enum):
    """Which Plancherel measure weights the factor at p_j in the n_f series.

    PRODUCT uses mu_{p_j} at p_j (the product measure), so the event
    probabilities sum to 1. TARGET weights every factor with mu_q, q the
    prime of the target q^n; this gives the reference constant 2.9423403000531483.
    """

    TARGET = "target"
    PRODUCT = "product"


# ---- p_f ---------------------------------------------------------------

def _pf_tail_bound(I: int) -> float:
    """Upper bound for sum_{i>I} p_i/2^i using p_i < i(ln i + ln ln i), I >= 5."""
    f = nth_prime_upper_bound
    first = I + 1
    # i -> f(i+1)/f(i) is decreasing for i >= 6, so the tail is dominated
    # by a geometric series with ratio f(first+1)/(2 f(first)).
    ratio = f(first + 1) / (2.0 * f(first))
    return math.ldexp(f(first), -first) / (1.0 - ratio)


def pf_partial_sums(count: int) -> List[Fraction]:
    """Exact partial sums sum_{i <= I} p_i / 2^i for I = 1..count."""
    primes = _first_primes(count)
    out, acc = [], Fraction(0)
    for i, p in enumerate(primes, start=1):
        acc += Fraction(p, 2**i)
        out.append(acc)
    return out


def _first_primes(count: int) -> List[int]:
    x = max(16, int(count * (math.log(count + 2) + math.log(math.log(count + 3)))) + 16)
    primes = primes_up_to(x)
    while len(primes) < count:
        x *= 2
        primes = primes_up_to(x)
    return primes[:count]


def average_pf(tol: float = 1e-12) -> SeriesResult:
    """sum_i p_i / 2^i, stopped once the rigorous tail bound is below tol."""
    if not 1e-15 <= tol <= 1e-3:
        raise PreconditionError("tol must lie in [1e-15, 1e-3]")
    I = 6
    while _pf_tail_bound(I) >= tol:
        I += 1
    acc = Fraction(0)
    for i, p in enumerate(_first_primes(I), start=1):
        acc += Fraction(p, 2**i)
    return SeriesResult(float(acc), I, _pf_tail_bound(I))


# ---- n_f ---------------------------------------------------------------

def nf_term(m: PrimePower, convention: NfConvention = NfConvention.TARGET) -> float:
    """m * P(n_f = m) under the chosen convention."""
    convention = NfConvention(convention)
    prod = 1.0
    for p, interval in constraint_system(m):
        weight_prime = m.q if convention is NfConvention.TARGET else p
        prod *= plancherel_mass(weight_prime, interval.lo, interval.hi)
    return m.value * prod


def nf_probability(m: PrimePower, convention: NfConvention = NfConvention.TARGET) -> float:
    return nf_term(m, convention) / m.value


def _nf_tail_bound(M: int) -> float:
    """Bound for sum over prime powers m > M of m * 2^(1 - pi(m)).

    Every non-target factor is a mass of [0, pi/(a+1)] within [0, pi/2], so
    at most 1/2. Blocks (2^j M, 2^(j+1) M] contribute at most
    (2^j M)(2^(j+1) M) 2^(1 - pi(2^j M)).
    """
    limit = 64 * M
    primes = primes_up_to(limit)
    total_log2 = []
    lo, j = M, 0
    while True:
        if lo <= limit:
            pi_lo = _count_le(primes, lo)
        else:
            pi_lo = lo / math.log(lo)  # Rosser: pi(x) > x / ln x for x >= 17
        log2_block = math.log2(lo) + math.log2(2 * lo) + 1 - pi_lo
        total_log2.append(log2_block)
        # blocks shrink super-geometrically; stop once one is negligible
        # against both 2^-1074 and its predecessor
        if j > 0 and log2_block < total_log2[-2] - 1 and log2_block < -1100:
            break
        lo *= 2
        j += 1
    # the last block bounds all later ones (each at most half the previous)
    total_log2.append(total_log2[-1])
    return sum(2.0**t for t in total_log2)


def _count_le(sorted_vals: List[int], x: float) -> int:
    import bisect

    return bisect.bisect_right(sorted_vals, x)


def nf_terms(M: int, convention: NfConvention = NfConvention.TARGET) -> List[tuple[PrimePower, float]]:
    """(m, m * P(n_f = m)) for every prime power m <= M, ascending."""
    return [(m, nf_term(m, convention)) for m in prime_powers_up_to(M)]


def average_nf(tol: float = 1e-9, convention: NfConvention = NfConvention.TARGET) -> SeriesResult:
    """sum over prime powers m of m * P(n_f = m), truncated with a rigorous tail bound."""
    if not 1e-13 <= tol <= 1e-3:
        raise PreconditionError("tol must lie in [1e-13, 1e-3]")
    M = 8
    while _nf_tail_bound(M) >= tol:
        M += 8
    terms = nf_terms(M, convention)
    # summed in ascending m for bit-stable output
    value = math.fsum(t for _, t in terms)
    return SeriesResult(value, len(terms), _nf_tail_bound(M))
