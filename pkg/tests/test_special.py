import math

import mpmath
import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from quantsine.special import (
    LANDAU_C,
    SeriesControl,
    bessel_j,
    g_closed,
    g_derivative,
    g_gray,
    g_min_envelope,
    g_series,
    riemann_zeta_4_3,
    schlomilch_odd,
    zeta,
)


def test_bessel_trivial():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0


def test_bessel_j1_of_one_mpmath():
    mpmath.mp.dps = 30
    assert abs(bessel_j(1, 1.0) - float(mpmath.besselj(1, 1))) < 1e-15


@pytest.mark.parametrize("n", [0, 1, 2, 3, 5, 10, 25, 50])
def test_bessel_against_scipy(n):
    x = np.concatenate([np.linspace(0, 60, 3001), np.geomspace(60, 5e4, 500)])
    ours = bessel_j(n, x)
    ref = sp.jv(n, x)
    assert np.all(np.abs(ours - ref) <= 1e-12 * np.maximum(1, np.abs(ref)))


def test_bessel_negative_argument_parity():
    assert bessel_j(3, -2.5) == pytest.approx(-bessel_j(3, 2.5))
    assert bessel_j(2, -2.5) == pytest.approx(bessel_j(2, 2.5))
    with pytest.raises(ValueError):
        bessel_j(-1, 1.0)


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0, 100.0])
def test_landau_bound_on_j1(x):
    assert abs(bessel_j(1, x)) <= LANDAU_C / x ** (1 / 3)


@pytest.mark.parametrize("x", [1.0, 5.0, 20.0])
def test_neumann_sum(x):
    s = bessel_j(0, x) ** 2 + 2 * sum(bessel_j(k, x) ** 2 for k in range(1, 80))
    assert abs(s - 1) < 1e-10


def test_zeta():
    assert zeta(2.0) == pytest.approx(math.pi**2 / 6, abs=1e-15)
    mpmath.mp.dps = 30
    assert abs(riemann_zeta_4_3() - float(mpmath.zeta(mpmath.mpf(4) / 3))) < 1e-12


def test_zeta_bracketing():
    K = 10**6
    head = math.fsum(np.arange(1, K + 1, dtype=float) ** (-4 / 3))
    # integral bounds for the tail Σ_{k>K} k^{-4/3}
    lo = head + 3 * (K + 1) ** (-1 / 3)
    hi = head + 3 * K ** (-1 / 3)
    assert lo <= riemann_zeta_4_3() <= hi


def test_g_subbin_forms():
    d = 0.1
    A = d / 4
    assert g_closed(A, d) == -A / 2
    assert g_gray(A, d) == pytest.approx(-A / 2, abs=1e-16)
    assert g_series(A, d).value == pytest.approx(-A / 2, abs=1e-9)
    assert g_series(1e-9, d).value == pytest.approx(0, abs=1e-9)


def test_g_at_half_step():
    assert g_closed(0.05, 0.1) == pytest.approx(-0.025, abs=1e-17)


def test_g_cross_forms_examples():
    d = 2 / 2**10
    assert abs(g_series(10.93 * d, d).value - g_closed(10.93 * d, d)) < 1e-9
    assert abs(g_gray(10.93 * d, d) - g_closed(10.93 * d, d)) < 1e-12
    assert abs(g_gray(1.5 * d, d) - g_closed(1.5 * d, d)) < 1e-12
    d6 = 2 / 2**6
    assert abs(g_gray(0.7, d6) - g_closed(0.7, d6)) < 1e-12


def test_g_series_reports_truncation():
    r = g_series(3.3, 1.0, SeriesControl(max_terms=1000))
    assert r.terms_used == 1000 and not r.converged and r.tail_estimate > 0
    r = g_series(3.3, 1.0, SeriesControl(max_terms=400_000, tail_bound_mode="abel", rel_tol=1e-6))
    assert r.converged and abs(r.value - g_closed(3.3, 1.0)) < 1e-8


def test_g_against_mpmath_series_definition():
    # direct mpmath summation with Euler-type acceleration of the alternating sum
    mpmath.mp.dps = 25
    gamma = 2.37
    s = mpmath.nsum(lambda k: (-1) ** k / k * mpmath.besselj(1, 2 * mpmath.pi * gamma * k), [1, mpmath.inf])
    assert abs(float(s / mpmath.pi) - g_closed(gamma, 1.0)) < 1e-10


def test_g_derivative_cases():
    d = 0.1
    assert g_derivative(0.02, d) == -0.5
    assert g_derivative(0.05 + 1e-6 * d, d) > 50
    with pytest.raises(ZeroDivisionError):
        g_derivative(0.05, d)
    A, h = 2.3 * d, 1e-6 * d
    fd = (g_closed(A + h, d) - g_closed(A - h, d)) / (2 * h)
    assert g_derivative(A, d) == pytest.approx(fd, rel=1e-6)


def test_envelope_examples():
    d = 2 / 2**8
    assert g_min_envelope(0, d) == d / 4
    assert g_min_envelope(1, d) == -d / 4
    assert g_min_envelope(7, d) == pytest.approx(g_closed(6.5 * d, d), abs=1e-15)


def test_local_minima():
    d = 2 / 2**8
    for p in range(1, 51):
        a = (p - 0.5) * d
        g0 = g_closed(a, d)
        assert g0 <= g_closed(a + 1e-3 * d, d) and g0 <= g_closed(a - 1e-3 * d, d)
        assert abs(g_min_envelope(p, d) - g0) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 500), st.integers(2, 16))
def test_gray_equals_closed(ratio, b):
    d = 2 / 2**b
    assert abs(g_gray(ratio * d, d) - g_closed(ratio * d, d)) <= 1e-11


@settings(max_examples=200, deadline=None)
@given(st.floats(0.001, 1.0), st.integers(2, 16))
def test_landau_bound_on_g(A, b):
    d = 2 / 2**b
    bound = d ** (4 / 3) * riemann_zeta_4_3() * LANDAU_C / (math.pi * (2 * math.pi * A) ** (1 / 3))
    assert abs(g_closed(A, d)) <= bound


def test_schlomilch_odd_against_direct_sum():
    # Σ (-1)^k/k J_m(2πγk) for m = 3, 5: compare with a brute sum + Abel-type averaging
    gamma = 1.7
    k = np.arange(1, 400_001, dtype=float)
    for m in (1, 3, 5):
        terms = (-1) ** k / k * sp.jv(m, 2 * np.pi * gamma * k)
        partial = np.cumsum(terms)
        approx = partial[-100_000:].mean()  # averaging kills the oscillating tail
        assert schlomilch_odd(m, gamma) == pytest.approx(approx, abs=2e-6)
    assert schlomilch_odd(1, gamma) == pytest.approx(math.pi * g_closed(gamma, 1.0), abs=1e-13)
    with pytest.raises(ValueError):
        schlomilch_odd(2, gamma)
