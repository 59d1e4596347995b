"""Hecke operators on S_k(1) and numerically embedded eigenforms.

Everything up to the Hecke matrices is exact integer arithmetic. The only
floating-point step is the diagonalisation of T_2, done with mpmath on the
diagonally balanced matrix D^-1 T_2^t D / 2^((k-1)/2), D = diag(i^((k-1)/2)),
whose eigenvalues are the normalised lambda_f(2) in [-2, 2].
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath

from .errors import DegenerateSpectrumError, NumericalFailure, PreconditionError
from .primes import primes_up_to
from .qexp import QExpansion, cuspform_basis, dim_cusp

log = logging.getLogger(__name__)

DEFAULT_PREC = 200
SEPARATION = 1e-6
RESIDUAL_TOL = 1e-8
_RESIDUAL_OPERATORS = (2, 3, 4, 5)


@dataclass(frozen=True)
class HeckeMatrix:
    """T_n on the echelon basis of S_k(1), row convention: T_n f_i = sum_j entries[i][j] f_j.

    Entries are exact integers (the echelon basis is integral).
    """

    n: int
    k: int
    entries: Tuple[Tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __matmul__(self, other: "HeckeMatrix") -> Tuple[Tuple[int, ...], ...]:
        d = self.dim
        B = other.entries
        return tuple(
            tuple(sum(self.entries[i][l] * B[l][j] for l in range(d)) for j in range(d)) for i in range(d)
        )

    def trace(self) -> int:
        return sum(self.entries[i][i] for i in range(self.dim))

    def as_fractions(self) -> List[List[Fraction]]:
        return [[Fraction(x) for x in row] for row in self.entries]


def _tn_coefficient(f: QExpansion, n: int, m: int, k: int) -> int:
    """m-th coefficient of T_n f: sum over e | (m, n) of e^(k-1) a(mn/e^2)."""
    g = math.gcd(m, n)
    total = 0
    for e in range(1, g + 1):
        if g % e == 0:
            total += e ** (k - 1) * f[m * n // (e * e)]
    return total


def required_prec(n: int, k: int) -> int:
    return n * (dim_cusp(k) + 2)


def hecke_matrix(n: int, k: int, prec: Optional[int] = None) -> HeckeMatrix:
    if n < 1:
        raise PreconditionError("n must be >= 1")
    need = required_prec(n, k)
    prec = need if prec is None else prec
    if prec < need:
        raise PreconditionError(f"prec {prec} < n*(dim+2) = {need} for T_{n} at weight {k}")
    basis = cuspform_basis(k, prec)
    d = len(basis)
    rows = tuple(tuple(_tn_coefficient(f, n, j, k) for j in range(1, d + 1)) for f in basis)
    return HeckeMatrix(n, k, rows)


def trace_tn(n: int, k: int, prec: Optional[int] = None) -> int:
    """Exact trace of T_n on S_k(1)."""
    if dim_cusp(k) == 0:
        return 0
    return hecke_matrix(n, k, prec).trace()


def trace_tn_star(n: int, k: int, prec: Optional[int] = None) -> float:
    """Tr(T_n) / n^((k-1)/2) = sum_f lambda_f(n)."""
    t = trace_tn(n, k, prec)
    if t == 0:
        return 0.0
    # (k-1)/2 = (k-2)/2 + 1/2 for even k keeps the big division exact
    return float(Fraction(t, n ** ((k - 2) // 2))) / math.sqrt(n)


def hecke_identity_rhs(m: int, n: int, k: int, prec: int) -> Tuple[Tuple[int, ...], ...]:
    """sum_{d | (m,n)} d^(k-1) T_{mn/d^2}, as an exact matrix."""
    g = math.gcd(m, n)
    d_ = dim_cusp(k)
    acc = [[0] * d_ for _ in range(d_)]
    for e in range(1, g + 1):
        if g % e:
            continue
        T = hecke_matrix(m * n // (e * e), k, prec).entries
        w = e ** (k - 1)
        for i in range(d_):
            for j in range(d_):
                acc[i][j] += w * T[i][j]
    return tuple(tuple(r) for r in acc)


@dataclass(frozen=True)
class EigenformRecord:
    """One normalised Hecke eigenform of level 1.

    ``lam[n]`` is lambda_f(n) for 1 <= n <= prec, built from lambda_f(p) by the
    Hecke recursion at prime powers and multiplicativity; ``lam_direct[n]`` is
    read straight off the q-expansion. Index 0 of both is an unused 0.0 slot.
    """

    k: int
    index: int
    lam: Tuple[float, ...]
    lam_direct: Tuple[float, ...]
    residual: float
    p_f: Optional[int]
    n_f: Optional[int]

    @property
    def prec(self) -> int:
        return len(self.lam) - 1

    def theta(self, p: int) -> float:
        """theta_f(p) in [0, pi] with lambda_f(p) = 2 cos theta_f(p)."""
        return math.acos(max(-1.0, min(1.0, self.lam[p] / 2.0)))

    def signs(self, P: int) -> Tuple[int, ...]:
        return tuple(1 if self.lam[p] > 0 else -1 for p in primes_up_to(P))

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "index": self.index,
            "p_f": self.p_f,
            "n_f": self.n_f,
            "residual": self.residual,
            "lambda": {n: self.lam[n] for n in range(1, self.prec + 1)},
        }


def first_negative(values: Sequence[float], candidates: Iterable[int]) -> Optional[int]:
    for n in candidates:
        if values[n] < 0:
            return n
    return None


@lru_cache(maxsize=8)
def _smallest_prime_factor(limit: int) -> Tuple[int, ...]:
    spf = list(range(limit + 1))
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == p:
            for m in range(p * p, limit + 1, p):
                if spf[m] == m:
                    spf[m] = p
    return tuple(spf)


def extend_multiplicatively(lam_p: Dict[int, float], prec: int) -> List[float]:
    """lambda(n) for n <= prec from lambda(p): Hecke recursion on p^r, then multiplicativity."""
    lam = [0.0] * (prec + 1)
    if prec >= 1:
        lam[1] = 1.0
    for p in primes_up_to(prec):
        prev, cur = 1.0, lam_p[p]
        q = p
        while q <= prec:
            lam[q] = cur
            prev, cur = cur, lam_p[p] * cur - prev
            q *= p
    spf = _smallest_prime_factor(prec)
    for n in range(2, prec + 1):
        p = spf[n]
        q = p
        while n % (q * p) == 0:
            q *= p
        if q != n:
            lam[n] = lam[q] * lam[n // q]
    return lam


def _balanced_t2(k: int, prec: int):
    T2 = hecke_matrix(2, k, prec).entries
    d = len(T2)
    h = mpmath.mpf(k - 1) / 2
    scale = [mpmath.mpf(i + 1) ** h for i in range(d)]
    norm = mpmath.mpf(2) ** h
    A = mpmath.matrix(d, d)
    for i in range(d):
        for j in range(d):
            A[i, j] = mpmath.mpf(T2[j][i]) * scale[j] / (scale[i] * norm)
    return A


def _real(x, what: str) -> mpmath.mpf:
    if isinstance(x, mpmath.mpc):
        if abs(x.imag) > mpmath.mpf(10) ** (-mpmath.mp.dps // 2):
            raise NumericalFailure(f"{what} has imaginary part {x.imag}")
        return x.real
    return x


def eigenforms(k: int, prec: int = DEFAULT_PREC, dps: int = 30) -> List[EigenformRecord]:
    """Every normalised eigenform of S_k(1), ordered by lambda_f(2)."""
    d = dim_cusp(k)
    if d == 0:
        return []
    if prec < required_prec(2, k):
        raise PreconditionError(f"prec {prec} too small for weight {k}; need >= {required_prec(2, k)}")
    for attempt in range(3):
        with mpmath.workdps(dps):
            records = _eigenforms_at(k, prec, d)
        worst = max(r.residual for r in records)
        if worst <= RESIDUAL_TOL:
            return records
        log.info("weight %d: residual %.2e at dps %d, retrying", k, worst, dps)
        dps *= 2
    raise NumericalFailure(f"weight {k}: eigen residual {worst:.2e} above {RESIDUAL_TOL}", estimate=worst)


def _eigenforms_at(k: int, prec: int, d: int) -> List[EigenformRecord]:
    basis = cuspform_basis(k, prec)
    h = mpmath.mpf(k - 1) / 2
    if d == 1:
        eigvals = [mpmath.mpf(basis[0][2]) / mpmath.mpf(2) ** h]
        vecs = [[mpmath.mpf(1)]]
    else:
        A = _balanced_t2(k, prec)
        E, ER = mpmath.eig(A)
        eigvals = [_real(e, "T_2 eigenvalue") for e in E]
        # eigenvectors come back with an arbitrary complex phase; fixing the
        # first coordinate to 1 (a_f(1) = 1) makes them real
        vecs = []
        for c in range(d):
            x0 = ER[0, c]
            vecs.append([_real(ER[i, c] / x0, "eigenvector") for i in range(d)])
    order = sorted(range(d), key=lambda c: eigvals[c])
    ev_sorted = [eigvals[c] for c in order]
    for a, b in zip(ev_sorted, ev_sorted[1:]):
        if b - a < SEPARATION:
            raise DegenerateSpectrumError(f"weight {k}: T_2 eigenvalues {float(a)} and {float(b)} not separated")

    # residual operators that fit in the available precision
    ops = [n for n in _RESIDUAL_OPERATORS if required_prec(n, k) <= prec]
    mats = {n: hecke_matrix(n, k, prec).entries for n in ops}
    # powers i^h and n^h as mpf
    pow_h = [mpmath.mpf(0)] + [mpmath.mpf(n) ** h for n in range(1, prec + 1)]

    records = []
    for index, c in enumerate(order):
        x = vecs[c]
        # w_i = c_i / i^h with c = coefficient vector in the echelon basis, c_1 = 1
        w = [xi / x[0] for xi in x]
        cvec = [w[i] * pow_h[i + 1] for i in range(d)]
        direct = [0.0] * (prec + 1)
        for n in range(1, prec + 1):
            s = mpmath.fsum(cvec[i] * basis[i][n] for i in range(d))
            direct[n] = float(s / pow_h[n])
        residual = 0.0
        wmax = max(abs(v) for v in w)
        for n, T in mats.items():
            a_n = direct[n]
            for j in range(d):
                lhs = mpmath.fsum(cvec[i] * T[i][j] for i in range(d)) / (pow_h[n] * pow_h[j + 1])
                r = abs(lhs - a_n * w[j]) / wmax
                residual = max(residual, float(r))
        lam_p = {p: direct[p] for p in primes_up_to(prec)}
        lam = extend_multiplicatively(lam_p, prec)
        p_f = first_negative(lam, primes_up_to(prec))
        n_f = first_negative(lam, range(2, prec + 1))
        records.append(
            EigenformRecord(k, index, tuple(lam), tuple(direct), residual, p_f, n_f)
        )
    return records


def _eigenforms_job(args):
    k, prec = args
    return k, eigenforms(k, prec)


def eigenforms_range(
    weights: Iterable[int], prec: int = DEFAULT_PREC, workers: int = 1
) -> Dict[int, List[EigenformRecord]]:
    """Eigenforms for several weights; workers > 1 fans out over processes."""
    weights = [k for k in weights if dim_cusp(k) > 0]
    if workers <= 1 or len(weights) < 2:
        return {k: eigenforms(k, prec) for k in weights}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = dict(pool.map(_eigenforms_job, [(k, prec) for k in weights]))
    return {k: results[k] for k in weights}
