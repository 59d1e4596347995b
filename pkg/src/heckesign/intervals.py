"""Chebyshev polynomials X_n and the angle intervals that pin down n_f.

If n_f = q^n then theta_f(q) lies in (pi/(n+1), pi/n) and, for every other
prime p < q^n, theta_f(p) lies in [0, pi/(a+1)] where p^a < q^n <= p^(a+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .errors import DomainError, PreconditionError
from .measures import AngleInterval
from .primes import PrimePower, primes_up_to


def chebyshev_U(n: int, theta: float) -> float:
    """X_n(theta) = sin((n+1) theta) / sin(theta), with the limits at 0 and pi."""
    if n < 0:
        raise PreconditionError("n must be >= 0")
    if not 0.0 <= theta <= math.pi:
        raise PreconditionError(f"theta must lie in [0, pi], got {theta}")
    s = math.sin(theta)
    if abs(s) < 1e-8:
        # near the endpoints the quotient loses digits; the recurrence does not
        return chebyshev_U_recurrence(n, theta)
    return math.sin((n + 1) * theta) / s


def chebyshev_U_recurrence(n: int, theta: float) -> float:
    """Three-term recurrence X_{j+1} = 2 cos(theta) X_j - X_{j-1}."""
    x = 2.0 * math.cos(theta)
    prev, cur = 0.0, 1.0
    for _ in range(n):
        prev, cur = cur, x * cur - prev
    return cur


def a_exponent(m: PrimePower, p: int) -> int:
    """Largest a with p**a < m.value, by exact integer comparison."""
    if p == m.q:
        raise DomainError(f"a_exponent undefined at the target prime {p}")
    if p < 2:
        raise PreconditionError("p must be prime")
    a, power = 0, p
    while power < m.value:
        a += 1
        power *= p
    return a


def first_negative_interval(n: int) -> AngleInterval:
    """Closure of B_n^*: theta(q) such that lambda(q^n) is the first negative one."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    return AngleInterval(math.pi / (n + 1), math.pi / n)


def nonnegative_interval(a: int) -> AngleInterval:
    """A_a^* = [0, pi/(a+1)]: lambda(p^j) >= 0 for j = 1..a."""
    if a < 1:
        raise PreconditionError("a must be >= 1")
    return AngleInterval(0.0, math.pi / (a + 1))


def in_A(j: int, theta: float) -> bool:
    """theta in A_j, i.e. X_j(theta) >= 0 (closed, so boundary zeros count)."""
    return chebyshev_U(j, theta) >= -1e-12


@dataclass(frozen=True)
class ConstraintSystem:
    target: PrimePower
    constraints: Tuple[Tuple[int, AngleInterval], ...]

    def __iter__(self):
        return iter(self.constraints)

    def __len__(self):
        return len(self.constraints)

    def interval_for(self, p: int) -> AngleInterval:
        for q, I in self.constraints:
            if q == p:
                return I
        raise KeyError(p)

    def rows(self) -> List[dict]:
        out = []
        for p, I in self.constraints:
            kind = "first-negative" if p == self.target.q else "nonnegative"
            out.append({"p": p, "kind": kind, "lo": I.lo, "hi": I.hi})
        return out


def constraint_system(m: PrimePower) -> ConstraintSystem:
    """One interval per prime p <= m.value, in increasing p."""
    if m.value < 2:
        raise PreconditionError("target must be >= 2")
    rows = []
    for p in primes_up_to(m.value):
        if p == m.q:
            rows.append((p, first_negative_interval(m.n)))
        else:
            rows.append((p, nonnegative_interval(a_exponent(m, p))))
    return ConstraintSystem(m, tuple(rows))


# Amplifier F = -3/4 X_0 + 1/2 X_1 + 1/4 X_2 and its reflection F(pi - theta).
# X_i(pi - theta) = (-1)^i X_i(theta), so only the X_1 sign flips.
_F = (-0.75, 0.5, 0.25)
_F_REFLECTED = (-0.75, -0.5, 0.25)


def amplifier_poly(sign: int) -> Tuple[float, float, float]:
    if sign == 1:
        return _F
    if sign == -1:
        return _F_REFLECTED
    raise PreconditionError("sign must be +1 or -1")


def chebyshev_series(coeffs: Sequence[float], theta: float) -> float:
    return sum(c * chebyshev_U(i, theta) for i, c in enumerate(coeffs))
