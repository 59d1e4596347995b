"""Prime sieving, prime powers, smooth squarefree counts and psi*."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List

_SEGMENT = 1 << 16


@dataclass(frozen=True, order=True)
class PrimePower:
    """q**n with q prime and n >= 1. Orders by value."""

    value: int
    q: int
    n: int

    @classmethod
    def of(cls, q: int, n: int = 1) -> "PrimePower":
        if n < 1:
            raise ValueError(f"exponent must be >= 1, got {n}")
        if not is_prime(q):
            raise ValueError(f"{q} is not prime")
        return cls(q**n, q, n)

    @classmethod
    def parse(cls, text: str) -> "PrimePower":
        """Accept '9', '3^2' or '3**2'."""
        text = text.strip().replace("**", "^")
        if "^" in text:
            q, n = (int(t) for t in text.split("^"))
            return cls.of(q, n)
        pp = as_prime_power(int(text))
        if pp is None:
            raise ValueError(f"{text} is not a prime power")
        return pp

    def __str__(self) -> str:
        return f"{self.q}^{self.n}" if self.n > 1 else str(self.q)


@dataclass(frozen=True)
class SmoothSpec:
    bound: int
    smoothness: float
    modulus: int = 1

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError("bound M must be >= 1")
        if not self.smoothness > 1:
            raise ValueError("smoothness y must be > 1")
        if self.modulus < 1:
            raise ValueError("modulus N must be >= 1")


def _small_primes(limit: int) -> List[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytes(len(range(i * i, limit + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def _segments(x: int) -> Iterator[List[int]]:
    root = math.isqrt(x)
    base = _small_primes(root)
    yield base
    lo = root + 1
    while lo <= x:
        hi = min(lo + _SEGMENT - 1, x)
        seg = bytearray([1]) * (hi - lo + 1)
        for p in base:
            start = max(p * p, (lo + p - 1) // p * p)
            if start > hi:
                continue
            seg[start - lo :: p] = bytes(len(range(start, hi + 1, p)))
        yield [lo + i for i, flag in enumerate(seg) if flag]
        lo = hi + 1


def primes_up_to(x: int) -> List[int]:
    """All primes <= x in increasing order (segmented Eratosthenes)."""
    if x < 2:
        return []
    out: List[int] = []
    for chunk in _segments(x):
        out.extend(chunk)
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    i = 17
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial division; fine for n up to ~1e12."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def as_prime_power(m: int) -> PrimePower | None:
    if m < 2:
        return None
    f = factorize(m)
    if len(f) != 1:
        return None
    (q, n), = f.items()
    return PrimePower(m, q, n)


def prime_powers_up_to(x: int) -> List[PrimePower]:
    """Every q**n <= x (n >= 1), sorted by value."""
    out = []
    for q in primes_up_to(x):
        v, n = q, 1
        while v <= x:
            out.append(PrimePower(v, q, n))
            v *= q
            n += 1
    out.sort()
    return out


def squarefree_smooth_count(spec: SmoothSpec) -> int:
    """#{m <= M squarefree, y-smooth, gcd(m, N) = 1}, counting m = 1."""
    return len(squarefree_smooth_numbers(spec))


def squarefree_smooth_numbers(spec: SmoothSpec) -> List[int]:
    M, N = spec.bound, spec.modulus
    plist = [p for p in primes_up_to(min(M, int(math.floor(spec.smoothness)))) if N % p]
    out = []

    def walk(start: int, m: int):
        out.append(m)
        for i in range(start, len(plist)):
            nxt = m * plist[i]
            if nxt > M:
                break
            walk(i + 1, nxt)

    walk(0, 1)
    out.sort()
    return out


def _psi_star_prime_power(p: int, a: int) -> int:
    if a == 0:
        return 1
    if a == 1:
        return p - 1
    if a == 2:
        return p * p - p - 1
    return p**a - p ** (a - 1) - p ** (a - 2) + p ** (a - 3)


def psi_star(N: int) -> int:
    """Multiplicative psi* with the prime-power table used in Serre's trace asymptotic."""
    if N < 1:
        raise ValueError("psi_star needs N >= 1")
    out = 1
    for p, a in factorize(N).items():
        out *= _psi_star_prime_power(p, a)
    return out


def totient(N: int) -> int:
    out = N
    for p in factorize(N):
        out -= out // p
    return out


def divisor_count(n: int) -> int:
    out = 1
    for a in factorize(n).values():
        out *= a + 1
    return out


def nth_prime_upper_bound(i: int) -> float:
    """Rosser-Schoenfeld: p_i < i (ln i + ln ln i) for i >= 6."""
    if i < 6:
        raise ValueError("bound only valid for i >= 6")
    return i * (math.log(i) + math.log(math.log(i)))
