import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from heckesign.errors import NumericalFailure, PreconditionError
from heckesign.intervals import chebyshev_U
from heckesign.measures import (
    AngleInterval,
    MeasureSpec,
    adaptive_quad,
    chebyshev_moment,
    measure_mass,
    measure_mass_quadrature,
    plancherel_mass,
)

PI = math.pi
angles = st.floats(0, PI, allow_nan=False)
primes = st.sampled_from([2, 3, 5, 7, 11, 53, 101, 997])


def spec_for(p):
    return MeasureSpec.sato_tate() if p is None else MeasureSpec.plancherel(p)


@pytest.mark.parametrize("p", [2, 3, 5, 53, 10007])
def test_total_and_half_mass(p):
    mu = MeasureSpec.plancherel(p)
    assert measure_mass(mu, AngleInterval(0, PI)) == pytest.approx(1, abs=1e-13)
    assert measure_mass(mu, AngleInterval(0, PI / 2)) == pytest.approx(0.5, abs=1e-13)


def test_sato_tate_example():
    v = measure_mass(MeasureSpec.sato_tate(), AngleInterval(0, PI / 3))
    assert v == pytest.approx(1 / 3 - math.sqrt(3) / (4 * PI), abs=1e-15)
    assert round(v, 6) == 0.195501


def test_mu2_example_between_zero_and_half():
    v = measure_mass(MeasureSpec.plancherel(2), AngleInterval(PI / 3, PI / 2))
    assert 0 < v < 0.5


def test_degenerate_interval_is_exactly_zero():
    assert measure_mass(MeasureSpec.plancherel(3), AngleInterval(1.0, 1.0)) == 0.0
    assert measure_mass_quadrature(MeasureSpec.sato_tate(), AngleInterval(2.0, 2.0)) == 0.0


def test_invalid_inputs():
    with pytest.raises(PreconditionError):
        AngleInterval(1.0, 0.5)
    with pytest.raises(PreconditionError):
        AngleInterval(-0.1, 1)
    with pytest.raises(PreconditionError):
        AngleInterval(0, 4)
    with pytest.raises(PreconditionError):
        MeasureSpec.plancherel(4)
    with pytest.raises(PreconditionError):
        measure_mass_quadrature(MeasureSpec.sato_tate(), AngleInterval(0, 1), tol=1e-15)


def test_quadrature_examples():
    assert measure_mass_quadrature(MeasureSpec.plancherel(3), AngleInterval(0, PI), 1e-12) == pytest.approx(1, abs=1e-12)
    assert measure_mass_quadrature(MeasureSpec.sato_tate(), AngleInterval(0, PI / 2), 1e-12) == pytest.approx(
        0.5, abs=1e-12
    )
    I = AngleInterval(0.3, 1.1)
    mu = MeasureSpec.plancherel(2)
    assert abs(measure_mass_quadrature(mu, I, 1e-12) - measure_mass(mu, I)) < 1e-10


def test_quadrature_failure_carries_estimate():
    with pytest.raises(NumericalFailure) as info:
        adaptive_quad(lambda x: (x > 1 / 3) * 1.0, 0.0, 1.0, 1e-14, max_depth=3)
    assert info.value.estimate is not None


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@given(angles, angles, st.one_of(st.none(), primes))
def test_closed_form_matches_scipy(a, b, p):
    lo, hi = sorted((a, b))
    mu = spec_for(p)
    ref, _ = quad(mu.density, lo, hi, epsabs=1e-14, epsrel=1e-14, limit=200)
    assert measure_mass(mu, AngleInterval(lo, hi)) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("p", [10007, 99991])
def test_large_p_against_mpmath(p):
    # high-precision reference for the cancellation-prone regime
    with mpmath.workdps(40):
        dens = lambda t: 2 / mpmath.pi * (1 + mpmath.mpf(1) / p) * mpmath.sin(t) ** 2 / (
            (1 - mpmath.mpf(1) / p) ** 2 + 4 * mpmath.sin(t) ** 2 / p)
        for lo, hi in [(0.1, 0.4), (1.2, 2.0), (0.0, 1.5707963267948966)]:
            ref = float(mpmath.quad(dens, [lo, hi]))
            assert measure_mass(MeasureSpec.plancherel(p), AngleInterval(lo, hi)) == pytest.approx(ref, abs=1e-14)


@given(angles, angles, angles, st.one_of(st.none(), primes))
def test_additivity(a, b, c, p):
    a, b, c = sorted((a, b, c))
    mu = spec_for(p)
    left = measure_mass(mu, AngleInterval(a, b)) + measure_mass(mu, AngleInterval(b, c))
    assert left == pytest.approx(measure_mass(mu, AngleInterval(a, c)), abs=1e-12)


@given(angles, angles, st.one_of(st.none(), primes))
def test_reflection_symmetry(a, b, p):
    lo, hi = sorted((a, b))
    mu = spec_for(p)
    reflected = AngleInterval(max(0.0, PI - hi), min(PI, PI - lo))
    assert measure_mass(mu, AngleInterval(lo, hi)) == pytest.approx(measure_mass(mu, reflected), abs=1e-12)


@given(angles, primes)
def test_cdf_is_monotone(theta, p):
    mu = MeasureSpec.plancherel(p)
    eps = 1e-3
    if theta + eps <= PI:
        assert mu.cdf(theta + eps) >= mu.cdf(theta)


def test_cdf_continuous_at_half_pi():
    for p in (2, 3, 53, 10007):
        mu = MeasureSpec.plancherel(p)
        assert abs(mu.cdf(PI / 2 + 1e-12) - mu.cdf(PI / 2 - 1e-12)) < 1e-11


def test_plancherel_mass_shortcut():
    assert plancherel_mass(5, 0.2, 1.3) == measure_mass(MeasureSpec.plancherel(5), AngleInterval(0.2, 1.3))


def test_chebyshev_moment_examples():
    assert chebyshev_moment(0, 7) == 1
    assert chebyshev_moment(1, 5) == 0
    assert chebyshev_moment(2, 2) == 0.5
    with pytest.raises(PreconditionError):
        chebyshev_moment(-1, 2)


@pytest.mark.parametrize("p", [2, 3, 5, 53])
def test_moment_consistency(p):
    mu = MeasureSpec.plancherel(p)
    for m in range(11):
        f = lambda t, m=m: np.array([chebyshev_U(m, float(x)) for x in t]) * mu.density(t)
        val = adaptive_quad(f, 0.0, PI, 1e-12)
        assert abs(val - chebyshev_moment(m, p)) < 1e-10


def test_plancherel_tends_to_sato_tate():
    grid = [(0.0, 0.5), (0.3, 1.1), (1.0, 2.5), (0.0, PI / 2), (2.0, PI)]
    ps = [2, 3, 5, 7, 11, 53, 101, 1009, 10007]
    for lo, hi in grid:
        I = AngleInterval(lo, hi)
        st_mass = measure_mass(MeasureSpec.sato_tate(), I)
        devs = [abs(measure_mass(MeasureSpec.plancherel(p), I) - st_mass) for p in ps]
        for p, d in zip(ps, devs):
            assert d < 10 / p
        assert all(x >= y - 1e-15 for x, y in zip(devs, devs[1:]))
