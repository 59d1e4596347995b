"""Sato-Tate and p-adic Plancherel measures on [0, pi].

Masses come from closed-form antiderivatives; ``measure_mass_quadrature``
is an independent adaptive Gauss-Kronrod evaluation kept for cross-checks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericalFailure, PreconditionError
from .primes import is_prime


class Kind(str, enum.Enum):
    SATO_TATE = "st"
    PLANCHEREL = "plancherel"


@dataclass(frozen=True)
class AngleInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi <= math.pi):
            raise PreconditionError(f"need 0 <= lo <= hi <= pi, got [{self.lo}, {self.hi}]")

    def __contains__(self, theta: float) -> bool:
        return self.lo <= theta <= self.hi

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def __str__(self) -> str:
        return f"[{self.lo:.6f}, {self.hi:.6f}]"


@dataclass(frozen=True)
class MeasureSpec:
    kind: Kind
    p: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.PLANCHEREL:
            if self.p is None or not is_prime(self.p):
                raise PreconditionError(f"Plancherel measure needs a prime p, got {self.p}")
        elif self.p is not None:
            raise PreconditionError("Sato-Tate measure takes no prime")

    @classmethod
    def sato_tate(cls) -> "MeasureSpec":
        return cls(Kind.SATO_TATE)

    @classmethod
    def plancherel(cls, p: int) -> "MeasureSpec":
        return cls(Kind.PLANCHEREL, p)

    def density(self, theta):
        """Density w.r.t. d(theta); accepts floats or numpy arrays."""
        s2 = np.sin(theta) ** 2
        if self.kind is Kind.SATO_TATE:
            return (2.0 / math.pi) * s2
        p = self.p
        return (2.0 / math.pi) * (1.0 + 1.0 / p) * s2 / ((1.0 - 1.0 / p) ** 2 + (4.0 / p) * s2)

    def cdf(self, theta: float) -> float:
        """mu([0, theta])."""
        if self.kind is Kind.SATO_TATE:
            return theta / math.pi - math.sin(2.0 * theta) / (2.0 * math.pi)
        return _plancherel_cdf(self.p, theta)

    def __str__(self) -> str:
        return "mu_ST" if self.kind is Kind.SATO_TATE else f"mu_{self.p}"


def _plancherel_cdf(p: int, theta: float) -> float:
    # With c = (1-1/p)^2, d = 4/p, r = sqrt((c+d)/c) the antiderivative is
    #   (2/pi)(1+1/p)/d * (theta - atan2(r sin, cos)/r).
    # psi = atan2(r sin, cos) - theta is taken as a single atan2 so that the
    # bracket (r-1)theta - psi has no cancellation for large p; x > 0 keeps
    # psi on the principal branch, so the result is continuous through pi/2.
    c = (1.0 - 1.0 / p) ** 2
    d = 4.0 / p
    u = d / c
    r_minus_1 = u / (math.sqrt(1.0 + u) + 1.0)
    r = 1.0 + r_minus_1
    s, co = math.sin(theta), math.cos(theta)
    psi = math.atan2(r_minus_1 * s * co, co * co + r * s * s)
    return (2.0 / math.pi) * (1.0 + 1.0 / p) / d * (r_minus_1 * theta - psi) / r


def measure_mass(spec: MeasureSpec, interval: AngleInterval) -> float:
    """mu(I) from the closed-form antiderivative."""
    if interval.lo == interval.hi:
        return 0.0
    return spec.cdf(interval.hi) - spec.cdf(interval.lo)


def plancherel_mass(p: int, lo: float, hi: float) -> float:
    """Shortcut for measure_mass(MeasureSpec.plancherel(p), [lo, hi]) without validation."""
    if lo == hi:
        return 0.0
    return _plancherel_cdf(p, hi) - _plancherel_cdf(p, lo)


# Gauss-Kronrod 7/15 on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod abscissae
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f: Callable, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _NODES
    fx = f(x)
    k = half * float(np.dot(_KWEIGHTS, fx))
    g = half * float(np.dot(_GWEIGHTS, fx))
    return k, abs(k - g)


def adaptive_quad(f: Callable, a: float, b: float, tol: float, max_depth: int = 40) -> float:
    """Adaptive GK15 with local tolerance splitting; raises NumericalFailure at max_depth."""
    total = 0.0
    stack = [(a, b, tol, 0)]
    while stack:
        lo, hi, t, depth = stack.pop()
        val, err = _gk15(f, lo, hi)
        if err <= t or hi - lo < 1e-15:
            total += val
            continue
        if depth >= max_depth:
            raise NumericalFailure(f"quadrature did not converge on [{lo}, {hi}]", estimate=total + val)
        mid = 0.5 * (lo + hi)
        stack.append((lo, mid, 0.5 * t, depth + 1))
        stack.append((mid, hi, 0.5 * t, depth + 1))
    return total


def measure_mass_quadrature(spec: MeasureSpec, interval: AngleInterval, tol: float = 1e-12) -> float:
    if tol < 1e-14:
        raise PreconditionError("tol must be >= 1e-14")
    if interval.lo == interval.hi:
        return 0.0
    return adaptive_quad(spec.density, interval.lo, interval.hi, tol)


def chebyshev_moment(m: int, p: int) -> float:
    """<X_m, mu_p>: p^(-m/2) for even m, 0 for odd m."""
    if m < 0:
        raise PreconditionError("m must be >= 0")
    if m % 2:
        return 0.0
    return float(p) ** (-m / 2)
