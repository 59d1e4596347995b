import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st
from scipy.special import jv

from heckesign.errors import DomainError, PreconditionError
from heckesign.sieve import (
    CURLY_J_C,
    KloostermanQuery,
    SieveParams,
    bessel_j,
    complete_sieve_bound,
    curly_j,
    curly_j_bound_check,
    curly_j_partial_sums,
    default_c_max,
    delta_bound,
    kloosterman,
    petersson_ratio_check,
    petersson_tail,
    petersson_truncation_bound,
    sieve_H,
    weil_bound,
)

from oracles import bessel_series_terms, kloosterman_complex

# Petersson norm of Delta (standard literature value), independent of the trace formula
DELTA_NORM = 1.035362056804320922e-6


def test_kloosterman_examples():
    assert kloosterman(1, 1, 1) == 1
    assert kloosterman(1, 1, 2) == pytest.approx(1, abs=1e-12)
    assert kloosterman(1, 1, 3) == pytest.approx(-1, abs=1e-12)
    assert kloosterman(1, 1, 4) == pytest.approx(-2, abs=1e-12)
    assert KloostermanQuery(1, 1, 4).value() == kloosterman(1, 1, 4)
    with pytest.raises(PreconditionError):
        KloostermanQuery(1, 1, 0)


@given(st.integers(1, 50), st.integers(1, 50), st.integers(1, 200))
def test_kloosterman_against_complex_enumeration(m, n, c):
    ref = kloosterman_complex(m, n, c)
    assert abs(ref.imag) < 1e-9
    assert kloosterman(m, n, c) == pytest.approx(ref.real, abs=1e-9)


def test_weil_bound_grid():
    for c in range(1, 501):
        for m in range(1, 21):
            for n in range(m, 21):
                assert abs(kloosterman(m, n, c)) <= weil_bound(m, n, c) + 1e-9


@given(st.integers(1, 100), st.integers(1, 100), st.integers(1, 300))
def test_kloosterman_symmetry(m, n, c):
    assert kloosterman(m, n, c) == pytest.approx(kloosterman(n, m, c), abs=1e-9)


def test_kloosterman_twisted_multiplicativity():
    for c1 in range(2, 101):
        for c2 in range(2, 101 // c1 + 1):
            if math.gcd(c1, c2) != 1 or c1 * c2 > 100:
                continue
            i1, i2 = pow(c1, -1, c2), pow(c2, -1, c1)
            for m, n in [(1, 1), (2, 3), (5, 7), (4, 6)]:
                lhs = kloosterman(m, n, c1 * c2)
                rhs = kloosterman(m * i2 * i2 % c1, n, c1) * kloosterman(m * i1 * i1 % c2, n, c2)
                assert lhs == pytest.approx(rhs, abs=1e-9)


def test_bessel_examples():
    assert bessel_j(11, 0, 5).value == 0
    r = bessel_j(1, 1, 30)
    ref = float(sum(bessel_series_terms(1, 1, 30)))
    assert abs(r.value - ref) < 1e-12
    r = bessel_j(11, 2, 40)
    assert r.value > 0 and r.warning is None
    # the series is J_11(4) = 3.66e-5, so the stated "< 1e-5" cannot hold; check the value instead
    assert r.value == pytest.approx(jv(11, 4.0), rel=1e-12)


@given(st.integers(1, 40), st.floats(0.01, 60))
def test_bessel_series_is_j_of_twice_x(order, x):
    r = bessel_j(order, x)
    ref = float(mpmath.besselj(order, 2 * x))
    assert r.value == pytest.approx(ref, rel=1e-10, abs=1e-14)


def test_bessel_warns_on_short_series():
    r = bessel_j(1, 5, 3)
    assert r.warning is not None
    assert r.remainder == pytest.approx(float(abs(bessel_series_terms(1, 5, 4)[3])), rel=1e-12)


def test_bessel_preconditions():
    with pytest.raises(PreconditionError):
        bessel_j(0, 1)
    with pytest.raises(PreconditionError):
        bessel_j(3, -1)
    with pytest.raises(PreconditionError):
        bessel_j(3, 1, 0)


def test_curly_j_examples():
    assert curly_j(11, 0).value == 0
    brute = sum(t * t for t in bessel_series_terms(11, 1, 30))
    assert curly_j(11, 1, 30).value == pytest.approx(float(brute), rel=1e-14)


@given(st.integers(1, 40), st.floats(0.01, 20), st.integers(1, 40))
def test_curly_j_partial_sums_monotone(order, x, terms):
    sums = curly_j_partial_sums(order, x, terms)
    assert all(s > 0 for s in sums)
    assert all(a <= b for a, b in zip(sums, sums[1:]))
    r = curly_j(order, x, terms)
    nxt = float(bessel_series_terms(order, Fraction(x), terms + 1)[terms] ** 2)
    assert r.remainder >= nxt * (1 - 1e-12)


def test_curly_j_bound_grid():
    rep = curly_j_bound_check()
    assert rep.ok, rep.failures
    assert rep.max_ratio <= CURLY_J_C
    assert rep.checked == len(range(4, 41, 2)) * 3 * 16


def test_curly_j_bound_examples():
    assert curly_j_bound_check([4], [0.55], xs=[0.0]).max_ratio == 0
    k, alpha = 12, 0.6
    xmax = k**alpha / math.exp(k / (k - 3))
    assert curly_j_bound_check([k], [alpha], xs=[xmax]).ok
    assert curly_j_bound_check([40], [0.75], xs=[1.0]).ok


def test_curly_j_bound_reports_offenders():
    rep = curly_j_bound_check([12], [0.6], points=4, constant=1e-30)
    assert not rep.ok
    assert all(f[0] == 12 and f[1] == 0.6 for f in rep.failures)
    with pytest.raises(PreconditionError):
        curly_j_bound_check([12], [0.6], xs=[100.0])


def test_delta_bound_examples():
    p = SieveParams(12, 10**6, 10, 0.6)
    eta = 12 * 0.4 - 12**0.2 / 2
    assert p.eta == pytest.approx(eta)
    assert delta_bound(p) == pytest.approx(1 + 10 / (10**6 * 12**eta), rel=1e-15)
    assert delta_bound(SieveParams(12, 10**6, 1e-12, 0.6)) == pytest.approx(1, abs=1e-15)
    assert delta_bound(SieveParams(2, 100, 50)) == pytest.approx(1 + 50 * math.log(50) / 100)
    assert SieveParams(12, 1, 10, 0.6).n_param == pytest.approx(math.exp(12 / 9))
    assert SieveParams(20, 3, 10, 0.6).conductor == 1200


def test_delta_bound_errors():
    with pytest.raises(DomainError, match="complete_sieve_bound"):
        delta_bound(SieveParams(12, 1, 10**6, 0.6))
    with pytest.raises(DomainError):
        SieveParams(12, 10, 10, 0.5)
    with pytest.raises(PreconditionError):
        SieveParams(12, 10, 10, 1.0)
    with pytest.raises(PreconditionError):
        SieveParams(12, 10, 10)
    with pytest.raises(PreconditionError):
        SieveParams(7, 10, 10, 0.6)


def test_delta_bound_monotonicity():
    for alpha in (0.55, 0.6, 0.75):
        for k in (12, 24, 48):
            vals = [delta_bound(SieveParams(k, 10**9, M, alpha)) for M in (1, 2, 5, 10, 50)]
            assert vals == sorted(vals)
            vals = [delta_bound(SieveParams(k, N, 10, alpha)) for N in (10**6, 10**7, 10**9)]
            assert vals == sorted(vals, reverse=True)
        vals = [delta_bound(SieveParams(k, 10**9, 10, alpha)) for k in range(12, 80, 2)]
        assert vals == sorted(vals, reverse=True)


def test_complete_sieve_bound():
    assert complete_sieve_bound(1e-12, 10, 12, 0.5) == pytest.approx(1, abs=1e-12)
    assert complete_sieve_bound(10 * 12**0.7, 10, 12, 0.3) == pytest.approx(2)
    assert complete_sieve_bound(math.e, 1, 2, 0.5) == pytest.approx(1 + math.e)
    for bad in (0, 1, -0.2):
        with pytest.raises(PreconditionError):
            complete_sieve_bound(10, 1, 12, bad)
    Ms = [complete_sieve_bound(M, 5, 12, 0.5) for M in (1, 10, 100)]
    assert Ms == sorted(Ms)
    Ns = [complete_sieve_bound(10, N, 12, 0.5) for N in (1, 10, 100)]
    assert Ns == sorted(Ns, reverse=True)


def test_petersson_tail_normalisation():
    r11 = 1 + petersson_tail(1, 1, 12).value
    assert r11 == pytest.approx(math.gamma(11) / ((4 * math.pi) ** 11 * DELTA_NORM), rel=1e-9)


def test_petersson_tail_examples():
    assert abs(petersson_tail(1, 2, 40).value) < 1e-6
    for N in (13, 17, 30):
        t = petersson_tail(1, 1, 12, N)
        first = 2 * math.pi * weil_bound(1, 1, N) / N * (2 * math.pi / N) ** 11 / math.factorial(11)
        assert abs(t.value) < first


def test_petersson_default_c_max():
    for m, n in [(1, 1), (3, 7), (10, 10)]:
        c = default_c_max(m, n, 12)
        assert petersson_truncation_bound(m, n, 12, c) < 1e-10
        assert c == 1 or petersson_truncation_bound(m, n, 12, c - 1) >= 1e-10
        assert petersson_tail(m, n, 12).c_max == c
    assert default_c_max(1, 1, 12, N=7) % 7 == 0


def test_petersson_truncation_bound_dominates():
    full = petersson_tail(5, 7, 12, c_max=2000).value
    for c_max in (20, 60, 150):
        t = petersson_tail(5, 7, 12, c_max=c_max)
        assert abs(full - t.value) <= t.truncation_bound


def test_petersson_tail_warns_when_truncated_early():
    assert petersson_tail(10, 10, 12, c_max=3).warning is not None
    with pytest.raises(PreconditionError):
        petersson_tail(1, 1, 12, N=5, c_max=2)
    with pytest.raises(PreconditionError):
        petersson_tail(1, 1, 2)


def test_petersson_ratio_examples():
    rep = petersson_ratio_check(12, 3)
    assert rep.ok
    r11 = 1 + petersson_tail(1, 1, 12).value
    assert (1 + petersson_tail(2, 2, 12).value) / r11 == pytest.approx(0.28125, abs=1e-9)
    lam2, lam3 = -24 / 2**5.5, 252 / 3**5.5
    assert petersson_tail(2, 3, 12).value / r11 == pytest.approx(lam2 * lam3, abs=1e-9)
    with pytest.raises(PreconditionError):
        petersson_ratio_check(24)


def test_sieve_H_examples():
    assert sieve_H(10, 3, 1, 0.25, [0.5, 0.25]) == pytest.approx(1.44, abs=1e-15)
    assert sieve_H(1, 3, 1, 0.25, [0.5, 0.25]) == 1
    assert sieve_H(10, 3, 6, 0.25, [0.5, 0.25]) == 1
    per_prime = sieve_H(10, 3, 1, {2: 0.5, 3: 0.25}, {2: [1.0], 3: [0.5]})
    assert per_prime == pytest.approx(1 + 0.25 + 0.25 + 0.0625)


def test_sieve_H_errors():
    with pytest.raises(DomainError):
        sieve_H(10, 3, 1, 0.25, [])
    with pytest.raises(DomainError):
        sieve_H(10, 3, 1, 0.25, [0.0])
    with pytest.raises(PreconditionError):
        sieve_H(10, 3, 1, 0.0, [0.5])
