"""Exact integer q-expansions for level 1: E_4, E_6, Delta and cusp-form bases."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    _mpz = int

from . import cache
from .errors import DomainError, PreconditionError


@dataclass(frozen=True)
class QExpansion:
    """sum_{n <= prec} coeffs[n] q^n with exact integer coefficients."""

    weight: int
    coeffs: Tuple[int, ...]

    @property
    def prec(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n]

    def truncate(self, prec: int) -> "QExpansion":
        return QExpansion(self.weight, self.coeffs[: prec + 1])

    def __add__(self, other: "QExpansion") -> "QExpansion":
        n = min(len(self.coeffs), len(other.coeffs))
        return QExpansion(self.weight, tuple(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])))

    def __sub__(self, other: "QExpansion") -> "QExpansion":
        n = min(len(self.coeffs), len(other.coeffs))
        return QExpansion(self.weight, tuple(a - b for a, b in zip(self.coeffs[:n], other.coeffs[:n])))

    def scale(self, c: int) -> "QExpansion":
        return QExpansion(self.weight, tuple(c * a for a in self.coeffs))

    def __mul__(self, other: "QExpansion") -> "QExpansion":
        prec = min(self.prec, other.prec)
        return QExpansion(self.weight + other.weight, tuple(mul_trunc(self.coeffs, other.coeffs, prec)))

    def __pow__(self, e: int) -> "QExpansion":
        out = QExpansion(0, (1,) + (0,) * self.prec)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out


def _pack(coeffs: Sequence[int], nbytes: int) -> int:
    # digits are stored with an offset of 2^(8 nbytes - 1) so they are all >= 0
    half = 1 << (8 * nbytes - 1)
    buf = b"".join((c + half).to_bytes(nbytes, "little") for c in coeffs)
    offset = int.from_bytes(half.to_bytes(nbytes, "little") * len(coeffs), "little")
    return int.from_bytes(buf, "little") - offset


def _unpack(x: int, nbytes: int, count: int) -> List[int]:
    half = 1 << (8 * nbytes - 1)
    offset = int.from_bytes(half.to_bytes(nbytes, "little") * count, "little")
    mask = (1 << (8 * nbytes * count)) - 1
    buf = ((x + offset) & mask).to_bytes(nbytes * count, "little")
    return [int.from_bytes(buf[i : i + nbytes], "little") - half for i in range(0, nbytes * count, nbytes)]


def mul_trunc(a: Sequence[int], b: Sequence[int], prec: int) -> List[int]:
    """Product of two integer polynomials mod q^(prec+1), via Kronecker substitution."""
    a = a[: prec + 1]
    b = b[: prec + 1]
    ma = max((abs(c) for c in a), default=0)
    mb = max((abs(c) for c in b), default=0)
    if ma == 0 or mb == 0:
        return [0] * (prec + 1)
    bits = ma.bit_length() + mb.bit_length() + max(len(a), len(b)).bit_length() + 2
    nbytes = (bits + 7) // 8
    prod = int(_mpz(_pack(a, nbytes)) * _mpz(_pack(b, nbytes)))
    # the product has len(a)+len(b)-1 digits; everything above prec is discarded
    return _unpack(prod, nbytes, prec + 1)


def sigma(n: int, r: int) -> int:
    s, d = 0, 1
    while d * d <= n:
        if n % d == 0:
            s += d**r
            e = n // d
            if e != d:
                s += e**r
        d += 1
    return s


def _sigma_table(prec: int, r: int) -> List[int]:
    table = [0] * (prec + 1)
    for d in range(1, prec + 1):
        dr = d**r
        for m in range(d, prec + 1, d):
            table[m] += dr
    return table


@lru_cache(maxsize=64)
def eisenstein(weight: int, prec: int) -> QExpansion:
    """E_4 = 1 + 240 sum sigma_3(n) q^n, E_6 = 1 - 504 sum sigma_5(n) q^n."""
    if prec < 0:
        raise PreconditionError("prec must be >= 0")
    if weight == 4:
        scale, r = 240, 3
    elif weight == 6:
        scale, r = -504, 5
    else:
        raise DomainError(f"only E_4 and E_6 are provided, got weight {weight}")
    cached = cache.load(f"eisenstein{weight}", weight, prec)
    if cached is not None:
        return QExpansion(weight, tuple(cached))
    table = _sigma_table(prec, r)
    coeffs = (1,) + tuple(scale * s for s in table[1:])
    cache.store(f"eisenstein{weight}", weight, prec, coeffs)
    return QExpansion(weight, coeffs)


@lru_cache(maxsize=64)
def delta(prec: int) -> QExpansion:
    """Delta = (E_4^3 - E_6^2) / 1728 = q - 24 q^2 + 252 q^3 - ..."""
    e4, e6 = eisenstein(4, prec), eisenstein(6, prec)
    num = e4 * e4 * e4 - e6 * e6
    coeffs = tuple(c // 1728 for c in num.coeffs)
    return QExpansion(12, coeffs)


def ramanujan_tau(n: int) -> int:
    return delta(max(n, 1))[n]


def dim_cusp(k: int) -> int:
    """dim S_k(SL_2(Z)) for even k."""
    if k % 2 or k < 0:
        return 0
    if k == 2:
        return 0
    d = k // 12
    return d - 1 if k % 12 == 2 else d


@lru_cache(maxsize=512)
def _e4_power(a: int, prec: int) -> QExpansion:
    if a == 0:
        return QExpansion(0, (1,) + (0,) * prec)
    if a == 1:
        return eisenstein(4, prec)
    return _e4_power(a - 1, prec) * eisenstein(4, prec)


@lru_cache(maxsize=512)
def _delta_power(j: int, prec: int) -> QExpansion:
    if j == 1:
        return delta(prec)
    return _delta_power(j - 1, prec) * delta(prec)


def _monomial(w: int, prec: int) -> QExpansion:
    """A weight-w form E_4^a E_6^b with constant term 1 (w != 2)."""
    if w % 4 == 0:
        return _e4_power(w // 4, prec)
    return _e4_power((w - 6) // 4, prec) * eisenstein(6, prec)


def cuspform_basis(k: int, prec: int) -> List[QExpansion]:
    """Reduced echelon basis of S_k(1): basis[i] has a(j) = delta_{i+1, j} for 1 <= j <= dim."""
    return list(_cuspform_basis(k, prec))


@lru_cache(maxsize=1024)
def _cuspform_basis(k: int, prec: int) -> Tuple[QExpansion, ...]:
    d = dim_cusp(k)
    if d == 0:
        return ()
    if k % 2 or k < 12:
        raise DomainError(f"no cusp forms of weight {k}")
    if prec < d + 2:
        raise PreconditionError(f"prec {prec} too small for dim {d}; need >= {d + 2}")
    cached = cache.load("basis", k, prec)
    if cached is not None:
        n = prec + 1
        return tuple(QExpansion(k, tuple(cached[i * n : (i + 1) * n])) for i in range(len(cached) // n))

    rows = []
    for j in range(1, d + 1):
        g = _delta_power(j, prec) * _monomial(k - 12 * j, prec)
        rows.append(np.array(g.coeffs, dtype=object))
    # rows[j] = q^(j+1) + ...; clear the pivots above the diagonal bottom-up
    for i in range(d - 1, -1, -1):
        for j in range(i + 1, d):
            c = rows[i][j + 1]
            if c:
                rows[i] = rows[i] - c * rows[j]
    basis = [QExpansion(k, tuple(int(c) for c in r)) for r in rows]
    cache.store("basis", k, prec, [c for f in basis for c in f.coeffs])
    return tuple(basis)
