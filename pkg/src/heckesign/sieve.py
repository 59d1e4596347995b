"""Kloosterman sums, the J-Bessel power series, the Petersson tail and sieve-bound evaluators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from .errors import DomainError, NumericalFailure, PreconditionError
from .primes import SmoothSpec, divisor_count, factorize, squarefree_smooth_numbers

ACCURACY_WARNING = 1e-12
CURLY_J_C = 64.0  # test-suite calibration constant, not a claim about the true constant


# ---- parameters --------------------------------------------------------

@dataclass(frozen=True)
class SieveParams:
    """Parameters of the large-sieve evaluator.

    alpha is only meaningful for k >= 4 and may be omitted at k = 2.
    """

    k: int
    N: int
    M: float
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.k < 2 or self.k % 2:
            raise PreconditionError("k must be even and >= 2")
        if self.N < 1:
            raise PreconditionError("N must be >= 1")
        if self.M <= 0:
            raise PreconditionError("M must be positive")
        if self.k > 2:
            if self.alpha is None:
                raise PreconditionError("alpha is required for k >= 4")
            if self.alpha <= 0.5:
                raise DomainError("alpha <= 1/2 is not covered by the bound")
            if self.alpha >= 1:
                raise PreconditionError("alpha must be < 1")

    @property
    def n_param(self) -> float:
        return 1.0 if self.k == 2 else math.exp(self.k / (self.k - 3))

    @property
    def eta(self) -> float:
        if self.k == 2:
            raise DomainError("eta is not defined for k = 2")
        return self.k * (1 - self.alpha) - self.k ** (2 * self.alpha - 1) / 2

    @property
    def conductor(self) -> int:
        return self.k * self.k * self.N

    @property
    def constraint(self) -> bool:
        """N k^alpha >= 2 pi M n; always true at k = 2 where the log M branch applies."""
        if self.k == 2:
            return True
        return self.N * self.k**self.alpha >= 2 * math.pi * self.M * self.n_param


def delta_bound(params: SieveParams) -> float:
    k, N, M = params.k, params.N, params.M
    if k == 2:
        return 1 + M * math.log(M) / N
    if not params.constraint:
        raise DomainError(
            f"N k^alpha < 2 pi M n for {params}; use complete_sieve_bound (the unconstrained bound) instead"
        )
    return 1 + M / (N * k**params.eta)


def complete_sieve_bound(M: float, N: int, k: int, epsilon: float) -> float:
    if not 0 < epsilon < 1:
        raise PreconditionError("epsilon must lie in (0, 1)")
    if k < 2 or k % 2:
        raise PreconditionError("k must be even and >= 2")
    if k == 2:
        return 1 + M * math.log(M) / N
    return 1 + M / (N * k ** (1 - epsilon))


# ---- Kloosterman -------------------------------------------------------

@dataclass(frozen=True)
class KloostermanQuery:
    m: int
    n: int
    c: int

    def __post_init__(self):
        if self.c < 1:
            raise PreconditionError("modulus c must be >= 1")

    def value(self) -> float:
        return kloosterman(self.m, self.n, self.c)

    def weil_bound(self) -> float:
        return weil_bound(self.m, self.n, self.c)


@lru_cache(maxsize=4096)
def _units(c: int) -> Tuple[np.ndarray, np.ndarray]:
    """Units x mod c and their inverses, as int64 arrays."""
    xs = [x for x in range(1, c) if math.gcd(x, c) == 1]
    return np.array(xs, dtype=np.int64), np.array([pow(x, -1, c) for x in xs], dtype=np.int64)


@lru_cache(maxsize=100_000)
def kloosterman(m: int, n: int, c: int) -> float:
    """S(m, n; c) = sum over units x mod c of e((m x + n x^-1) / c)."""
    if c < 1:
        raise PreconditionError("modulus c must be >= 1")
    if c == 1:
        return 1.0
    x, inv = _units(c)
    # reduce the phase exactly before going to floating point
    r = ((m % c) * x + (n % c) * inv) % c
    t = (2 * math.pi / c) * r
    imag = math.fsum(np.sin(t))
    if abs(imag) >= 1e-10:
        raise NumericalFailure(f"S({m},{n};{c}) has imaginary part {imag}", estimate=imag)
    return math.fsum(np.cos(t))


def weil_bound(m: int, n: int, c: int) -> float:
    return math.sqrt(math.gcd(math.gcd(m, n), c)) * math.sqrt(c) * divisor_count(c)


# ---- Bessel series -----------------------------------------------------

@dataclass(frozen=True)
class SeriesValue:
    value: float
    remainder: float
    terms: int
    warning: Optional[str] = None


def _series_dps(x: float) -> int:
    # the largest term is about e^(2x); keep 30 digits beyond it
    return 30 + int(0.87 * x) + 1


def _bessel_terms(order: int, x, terms: int):
    """Magnitudes x^(order+2l) / (l! (order+l)!) for l = 0..terms (one extra for the remainder)."""
    t = x**order / mpmath.factorial(order)
    x2 = x * x
    out = [t]
    for l in range(1, terms + 1):
        t = t * x2 / (l * (order + l))
        out.append(t)
    return out


def bessel_j(order: int, x: float, terms: Optional[int] = None) -> SeriesValue:
    """Partial sum of sum_l (-1)^l x^(order+2l) / (l! (order+l)!), which is J_order(2x).

    With terms=None the series is run until the first omitted term is below
    1e-30 of the running scale.
    """
    if order < 1:
        raise PreconditionError("order must be >= 1")
    if x < 0:
        raise PreconditionError("x must be >= 0")
    if terms is not None and terms < 1:
        raise PreconditionError("terms must be >= 1")
    if x == 0:
        return SeriesValue(0.0, 0.0, terms or 1)
    with mpmath.workdps(_series_dps(x)):
        X = mpmath.mpf(x)
        if terms is None:
            terms = _adaptive_terms(order, X)
        mags = _bessel_terms(order, X, terms)
        value = mpmath.fsum((-1) ** l * mags[l] for l in range(terms))
        remainder = mags[terms]
        return _finish(value, remainder, terms)


def _adaptive_terms(order: int, X) -> int:
    t = X**order / mpmath.factorial(order)
    l, peak = 0, t
    while True:
        l += 1
        t = t * X * X / (l * (order + l))
        peak = max(peak, t)
        if t < mpmath.mpf(10) ** -30 * min(peak, 1) and l > X:
            return l


def _finish(value, remainder, terms: int) -> SeriesValue:
    warning = None
    if remainder > ACCURACY_WARNING * abs(value):
        warning = f"remainder {float(remainder):.3e} exceeds 1e-12 of the value"
    return SeriesValue(float(value), float(remainder), terms, warning)


def curly_j(order: int, x: float, terms: Optional[int] = None) -> SeriesValue:
    """sum_l (x^(order+2l) / (l! (order+l)!))^2: the Bessel-series terms squared, all positive."""
    if order < 1:
        raise PreconditionError("order must be >= 1")
    if x < 0:
        raise PreconditionError("x must be >= 0")
    if x == 0:
        return SeriesValue(0.0, 0.0, terms or 1)
    with mpmath.workdps(_series_dps(x)):
        X = mpmath.mpf(x)
        if terms is None:
            terms = _adaptive_terms(order, X)
        mags = _bessel_terms(order, X, terms)
        value = mpmath.fsum(t * t for t in mags[:terms])
        return _finish(value, mags[terms] ** 2, terms)


def curly_j_partial_sums(order: int, x: float, terms: int) -> List[float]:
    with mpmath.workdps(_series_dps(x)):
        mags = _bessel_terms(order, mpmath.mpf(x), terms)
        out, acc = [], mpmath.mpf(0)
        for t in mags[:terms]:
            acc += t * t
            out.append(float(acc))
        return out


def curly_j_envelope(k: int, alpha: float, x: float) -> float:
    """x^4 (k^(k(alpha-1) - 2 alpha + k^(2 alpha - 1)/2))^2, the shape of the curly-J bound."""
    e = k * (alpha - 1) - 2 * alpha + k ** (2 * alpha - 1) / 2
    return x**4 * k ** (2 * e)


@dataclass(frozen=True)
class BoundReport:
    constant: float
    max_ratio: float
    worst: Optional[Tuple[int, float, float]]
    checked: int
    failures: Tuple[Tuple[int, float, float, float], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures


CURLY_J_WEIGHTS = tuple(range(4, 41, 2))
CURLY_J_ALPHAS = (0.55, 0.6, 0.75)


def curly_j_bound_check(
    weights: Sequence[int] = CURLY_J_WEIGHTS,
    alphas: Sequence[float] = CURLY_J_ALPHAS,
    points: int = 16,
    xs: Optional[Sequence[float]] = None,
    constant: float = CURLY_J_C,
) -> BoundReport:
    """Max of curly_j(x) / envelope over x in (0, k^alpha / n]; failures list offending (k, alpha, x, ratio).

    By default x runs over `points` equally spaced values up to k^alpha / n.
    An explicit ``xs`` is checked against the same constraint.
    """
    max_ratio, worst, failures, checked = 0.0, None, [], 0
    for k in weights:
        if k < 4 or k % 2:
            raise PreconditionError("weights must be even and >= 4")
        n = math.exp(k / (k - 3))
        for alpha in alphas:
            if not 0.5 < alpha <= 1:
                raise DomainError("alpha must lie in (1/2, 1]")
            xmax = k**alpha / n
            grid = [xmax * i / points for i in range(1, points + 1)] if xs is None else list(xs)
            for x in grid:
                if x > xmax * (1 + 1e-12):
                    raise PreconditionError(f"x = {x} exceeds k^alpha/n = {xmax} at k={k}, alpha={alpha}")
                checked += 1
                if x == 0:
                    continue
                ratio = curly_j(k - 1, x).value / curly_j_envelope(k, alpha, x)
                if ratio > max_ratio:
                    max_ratio, worst = ratio, (k, alpha, x)
                if ratio > constant:
                    failures.append((k, alpha, x, ratio))
    return BoundReport(constant, max_ratio, worst, checked, tuple(failures))


# ---- Petersson tail ----------------------------------------------------

@dataclass(frozen=True)
class TailResult:
    value: float
    c_max: int
    truncation_bound: float
    warning: Optional[str] = None


def petersson_truncation_bound(m: int, n: int, k: int, c_max: int) -> float:
    """Overestimate of the omitted terms c > c_max.

    Each term is at most 2 pi c^-1 |S| |J_{k-1}(4 pi sqrt(mn)/c)|; with
    |S| <= sqrt(gcd) sqrt(c) tau(c), tau(c) <= 2 sqrt(c) and
    |J_v(2y)| <= y^v / v! this is 4 pi sqrt(gcd) A c^(1-k), A = (2 pi sqrt(mn))^(k-1)/(k-1)!,
    and sum_{c > C} c^(1-k) <= C^(2-k)/(k-2).
    """
    g = math.gcd(m, n)
    log_a = (k - 1) * math.log(2 * math.pi * math.sqrt(m * n)) - math.lgamma(k)
    log_tail = math.log(4 * math.pi * math.sqrt(g)) + log_a + (2 - k) * math.log(c_max) - math.log(k - 2)
    return math.exp(log_tail)


def default_c_max(m: int, n: int, k: int, N: int = 1, tol: float = 1e-10) -> int:
    """Smallest multiple of N whose truncation overestimate is below tol."""
    c = N
    while petersson_truncation_bound(m, n, k, c) >= tol:
        c += N
    return c


def petersson_tail(
    m: int, n: int, k: int, N: int = 1, c_max: Optional[int] = None, tol: float = 1e-10
) -> TailResult:
    """2 pi i^-k sum_{c = 0 mod N, c <= c_max} S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c)."""
    if k < 4 or k % 2:
        raise PreconditionError("k must be even and >= 4")
    if min(m, n, N) < 1:
        raise PreconditionError("m, n, N must be >= 1")
    sign = (-1) ** (k // 2)  # i^-k for even k
    assert sign in (1, -1)
    if c_max is None:
        c_max = default_c_max(m, n, k, N, tol)
    if c_max < N:
        raise PreconditionError("c_max must be >= N")
    root = math.sqrt(m * n)
    terms = []
    for c in range(N, c_max + 1, N):
        S = kloosterman(m, n, c)
        if S == 0.0:
            continue
        J = _bessel_cached(k - 1, 2 * math.pi * root / c)
        terms.append(S * J / c)
    value = 2 * math.pi * sign * math.fsum(terms)
    bound = petersson_truncation_bound(m, n, k, c_max)
    warning = None
    if bound > tol:
        warning = f"truncation bound {bound:.3e} exceeds tolerance {tol:.1e}"
    return TailResult(value, c_max, bound, warning)


@lru_cache(maxsize=100_000)
def _bessel_cached(order: int, x: float) -> float:
    return bessel_j(order, x).value


@dataclass(frozen=True)
class RatioReport:
    k: int
    max_error: float
    tolerance: float
    failures: Tuple[Tuple[int, int, float, float], ...]
    omega: float

    @property
    def ok(self) -> bool:
        return not self.failures


def petersson_ratio_check(k: int = 12, bound: int = 10, tolerance: float = 1e-6) -> RatioReport:
    """Check (delta(m,n) + tail(m,n)) / (1 + tail(1,1)) against lambda(m) lambda(n).

    Valid only in dimension one, where the orthonormal basis is a single
    eigenform and the common factor is its harmonic weight.
    """
    from .forms import eigenforms
    from .qexp import dim_cusp

    if dim_cusp(k) != 1:
        raise PreconditionError(f"dim S_{k}(1) = {dim_cusp(k)}, need 1")
    (form,) = eigenforms(k, prec=max(40, 4 * bound))
    r11 = 1 + petersson_tail(1, 1, k).value
    failures, worst = [], 0.0
    for m in range(1, bound + 1):
        for n in range(1, bound + 1):
            r = (m == n) + petersson_tail(m, n, k).value
            ratio = r / r11
            expected = form.lam_direct[m] * form.lam_direct[n]
            err = abs(ratio - expected)
            worst = max(worst, err)
            if err > tolerance:
                failures.append((m, n, ratio, expected))
    return RatioReport(k, worst, tolerance, tuple(failures), r11)


# ---- amplifier sum -----------------------------------------------------

PerPrime = Union[float, Mapping[int, float]]
PerPrimeList = Union[Sequence[float], Mapping[int, Sequence[float]]]


def _at(value, p):
    return value[p] if isinstance(value, Mapping) else value


def sieve_H(M: int, beta: float, N: int, deltas: PerPrime, alphas: PerPrimeList) -> float:
    """sum over squarefree beta-smooth m <= M coprime to N of prod_{p | m} delta_p^2 / sum_i alpha_p(i)^2.

    deltas and alphas are either one value for every prime or maps keyed by prime.
    """
    total = []
    for m in squarefree_smooth_numbers(SmoothSpec(M, beta, N)):
        prod = 1.0
        for p in factorize(m):
            d = _at(deltas, p)
            coeffs = list(_at(alphas, p))
            if d <= 0:
                raise PreconditionError(f"delta_{p} must be positive")
            norm = math.fsum(a * a for a in coeffs)
            if not coeffs or norm == 0:
                raise DomainError(f"empty coefficient list at p = {p}")
            prod *= d * d / norm
        total.append(prod)
    return math.fsum(total)
