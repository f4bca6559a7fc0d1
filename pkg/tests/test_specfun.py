import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, strategies as st

from markovflight.specfun import (
    ConvergenceError,
    bessel_j,
    bessel_j_scaled,
    double_factorial,
    gamma_half_integer,
    gauss_2f1,
    pochhammer,
)


def test_pochhammer_examples():
    assert pochhammer(Fraction(1, 2), 0) == 1
    assert pochhammer(Fraction(1, 2), 2) == Fraction(3, 4)
    for r in range(10):
        assert pochhammer(1, r) == math.factorial(r)


@given(
    st.fractions(min_value=-20, max_value=20, max_denominator=50),
    st.integers(min_value=0, max_value=30),
)
def test_pochhammer_step(a, n):
    assert pochhammer(a, n + 1) == pochhammer(a, n) * (a + n)


def test_pochhammer_rejects_negative_n():
    with pytest.raises(ValueError):
        pochhammer(1, -1)


@pytest.mark.parametrize("n, expected", [(-1, 1), (0, 1), (1, 1), (5, 15), (6, 48), (7, 105)])
def test_double_factorial(n, expected):
    assert double_factorial(n) == expected


def test_double_factorial_rejects():
    with pytest.raises(ValueError):
        double_factorial(-2)


def test_gamma_half_integer():
    assert gamma_half_integer(1) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma_half_integer(3) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-15)
    assert gamma_half_integer(5) == pytest.approx(3 * math.sqrt(math.pi) / 4, rel=1e-15)
    assert gamma_half_integer(4) == 1.0
    for k2 in range(1, 60):
        assert gamma_half_integer(k2) == pytest.approx(math.gamma(k2 / 2), rel=1e-14)
    with pytest.raises(ValueError):
        gamma_half_integer(0)


def test_gauss_2f1_trivial():
    assert gauss_2f1(0.3, 1.7, 2.5, 0.0) == 1.0
    for z in (-0.9, -0.3, 0.4, 0.95):
        assert gauss_2f1(0.5, 0.0, 1.5, z) == 1.0


def test_gauss_2f1_arcsin():
    # z F(1/2, 1/2; 3/2; z^2) = arcsin z; oracle in 30 digits
    mpmath.mp.dps = 30
    expected = float(2 * mpmath.asin(mpmath.mpf(1) / 2))
    assert abs(gauss_2f1(0.5, 0.5, 1.5, 0.25) - expected) < 1e-12
    assert abs(expected - math.pi / 3) < 1e-15


@pytest.mark.parametrize("m", [3, 4, 5, 7, 10])
@pytest.mark.parametrize("z", [-0.8, 0.1, 0.5, 0.9, 0.97])
def test_gauss_2f1_against_mpmath(m, z):
    expected = float(mpmath.hyp2f1(0.5, (m - 2) / 2, m / 2, z))
    assert gauss_2f1(0.5, (m - 2) / 2, m / 2, z) == pytest.approx(expected, rel=1e-11)


def test_gauss_2f1_partial_sums_monotone_and_tail():
    # positive coefficients: more terms never decrease the sum; result is above all partial sums
    a, b, c, z = 0.5, 1.5, 2.5, 0.9
    value = gauss_2f1(a, b, c, z, tol=1e-13)
    partial, term = 1.0, 1.0
    for n in range(200):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        assert partial + term >= partial
        partial += term
    assert partial <= value + 1e-13
    assert value - float(mpmath.hyp2f1(a, b, c, z)) == pytest.approx(0, abs=1e-11)


def test_gauss_2f1_rejects():
    with pytest.raises(ValueError):
        gauss_2f1(0.5, 0.5, 1.5, 1.0)
    with pytest.raises(ValueError):
        gauss_2f1(0.5, 0.5, -2, 0.3)


def test_gauss_2f1_divergence_signalled(monkeypatch):
    import markovflight.specfun as specfun

    monkeypatch.setattr(specfun, "HYP2F1_TERM_CAP", 20)
    with pytest.raises(ConvergenceError):
        specfun.gauss_2f1(0.5, 0.5, 1.0, 0.999)


def test_bessel_examples():
    assert bessel_j(0, 0.0) == 1.0
    assert abs(bessel_j(0.5, math.pi)) < 1e-15
    mpmath.mp.dps = 30
    one = mpmath.mpf(1)
    expected = float(mpmath.sqrt(2 / mpmath.pi) * (mpmath.sin(one) - mpmath.cos(one)))
    assert abs(bessel_j(1.5, 1.0) - expected) < 1e-14
    assert abs(expected - 0.2402978391) < 1e-10


def test_bessel_half_integer_closed_forms():
    for z in np.linspace(0.01, 20, 401):
        root = math.sqrt(2 / (math.pi * z))
        assert abs(bessel_j(0.5, z) - root * math.sin(z)) <= 1e-12
        assert abs(bessel_j(1.5, z) - root * (math.sin(z) / z - math.cos(z))) <= 1e-12


def test_bessel_recurrence():
    orders = [1 + k / 2 for k in range(19)]  # 1, 3/2, ..., 10
    for nu in orders:
        for z in np.linspace(0.5, 20, 40):
            lhs = bessel_j(nu - 1, z) + bessel_j(nu + 1, z)
            rhs = 2 * nu / z * bessel_j(nu, z)
            assert abs(lhs - rhs) <= 1e-10 * max(abs(rhs), 1e-300) or abs(lhs - rhs) < 1e-15


@pytest.mark.parametrize("nu", [0, 0.5, 1, 2.5, 7, 19.5, 40, 80.5, 120])
@pytest.mark.parametrize("z", [1e-3, 0.7, 3.0, 12.5, 31.0, 50.0])
def test_bessel_against_scipy(nu, z):
    assert abs(bessel_j(nu, z) - sp.jv(nu, z)) <= 1e-12


def test_bessel_scaled_against_mpmath():
    mpmath.mp.dps = 40
    for nu in (0, 0.5, 3, 10.5, 60):
        for z in (0.1, 5.0, 25.0, 50.0):
            expected = mpmath.gamma(nu + 1) * (2 / mpmath.mpf(z)) ** nu * mpmath.besselj(nu, z)
            assert bessel_j_scaled(nu, z) == pytest.approx(float(expected), abs=1e-12)


def test_bessel_range():
    with pytest.raises(ValueError, match="supports"):
        bessel_j(121, 1.0)
    with pytest.raises(ValueError, match="supports"):
        bessel_j(1, 50.5)
    with pytest.raises(ValueError):
        bessel_j(-0.5, 1.0)
