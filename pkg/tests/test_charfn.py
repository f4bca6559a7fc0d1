import itertools
import math

import numpy as np
import pytest
import scipy.integrate as si
import scipy.special as sp

from markovflight.charfn import (
    EvalPoint,
    adaptive_simpson,
    bessel_series_terms,
    cf_bessel_partial_5,
    cf_bessel_series,
    cf_time_partial_5,
    cf_time_series,
    laplace_cf_closed,
    laplace_numeric_roundtrip,
    laplace_series_A,
    time_series_terms,
)
from markovflight.coeffs import FlightParams, Kind, derived_by_recurrence, xi_bessel
from markovflight.specfun import ConvergenceError, gauss_2f1


def literal_bessel_partial(params, pt, n_terms):
    """Bessel series written literally with scipy's J and math.gamma."""
    m, lam, c = params.m, params.lam, params.c
    ca = c * pt.a
    zeta = derived_by_recurrence(Kind.BESSEL, m, n_terms).derived
    total = 0.0
    for n in range(1, n_terms + 1):
        nu = (n - 1) / 2
        total += (
            math.sqrt(math.pi) * zeta[n].eval(lam, ca * ca) / math.gamma(n / 2)
            * (pt.t / (2 * ca)) ** nu * sp.jv(nu, ca * pt.t)
        )
    return math.exp(-lam * pt.t) * total


def quotient_from_2f1(params, a, s):
    """A = zF / (1 - lam z F), z = 1/sqrt(s^2 + v), straight from 2F1."""
    m, lam, c = params.m, params.lam, params.c
    v = (c * a) ** 2
    z = 1 / math.sqrt(s * s + v)
    f = gauss_2f1(0.5, (m - 2) / 2, m / 2, v * z * z)
    return z * f / (1 - lam * z * f)


@pytest.mark.parametrize("m, lam, c, t", [(3, 1.0, 1.0, 0.7), (5, 2.0, 3.0, 1.5), (6, 0.0, 2.0, 0.2)])
def test_origin_is_one(m, lam, c, t):
    params, pt = FlightParams(m, lam, c), EvalPoint(0.0, t)
    assert cf_bessel_series(params, pt).value == pytest.approx(1.0, abs=1e-13)
    assert cf_time_series(params, pt).value == pytest.approx(1.0, abs=1e-13)


@pytest.mark.parametrize("a, t", list(itertools.product([0.1, 1.0, 5.0], [0.5, 1.0, 2.0])))
def test_no_switching_is_uniform_sphere(a, t):
    params = FlightParams(3, 0.0, 1.0)
    expected = math.sin(a * t) / (a * t)
    pt = EvalPoint(a, t)
    assert abs(cf_bessel_series(params, pt).value - expected) <= 1e-10
    assert abs(cf_time_series(params, pt).value - expected) <= 1e-10


@pytest.mark.parametrize(
    "m, lam, c, a, t", [(3, 1.0, 1.0, 1.0, 1.0), (4, 2.0, 1.0, 2.0, 0.5), (6, 0.5, 2.5, 0.8, 1.2)]
)
def test_cross_representation(m, lam, c, a, t):
    params, pt = FlightParams(m, lam, c), EvalPoint(a, t)
    b, ts = cf_bessel_series(params, pt), cf_time_series(params, pt)
    assert abs(b.value - ts.value) <= 1e-8
    assert b.representation == "bessel" and ts.representation == "time"
    assert b.tail_estimate >= 0 and ts.tail_estimate >= 0


def test_bessel_series_against_literal_form():
    params, pt = FlightParams(4, 1.5, 2.0), EvalPoint(0.9, 0.8)
    assert cf_bessel_series(params, pt).value == pytest.approx(literal_bessel_partial(params, pt, 60), abs=1e-12)


def test_five_term_bessel_form():
    params, pt = FlightParams(3, 1.0, 1.0), EvalPoint(1.0, 0.1)
    terms = list(itertools.islice(bessel_series_terms(params, pt), 5))
    damp = math.exp(-params.lam * pt.t)
    assert abs(cf_bessel_partial_5(params, pt) - damp * sum(terms)) <= 1e-12
    z = params.c * pt.t * pt.a
    assert terms[0] == pytest.approx(sp.j0(z), abs=1e-14)
    assert terms[1] == pytest.approx(params.lam * math.sin(z) / (params.c * pt.a), abs=1e-14)
    assert abs(literal_bessel_partial(params, pt, 5) - damp * sum(terms)) <= 1e-12


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_five_term_time_form(m):
    params, pt = FlightParams(m, 5.0, 3.0), EvalPoint(0.05, 0.3)
    terms = list(itertools.islice(time_series_terms(params, pt), 40))
    damp = math.exp(-params.lam * pt.t)
    five = cf_time_partial_5(params, pt)
    assert abs(five - damp * sum(terms[:5])) <= 1e-12
    full = cf_time_series(params, pt).value
    tail_bound = damp * sum(abs(x) for x in terms[5:])
    assert abs(full - five) <= tail_bound + 1e-12


def test_characteristic_function_bounds_and_small_t():
    for m, lam, a in itertools.product((3, 4, 5, 6), (0.5, 1.0, 2.0), (0.1, 0.5, 1.0, 2.0, 5.0)):
        params = FlightParams(m, lam, 1.0)
        for t in (0.25, 0.5, 1.0, 2.0):
            ev = cf_time_series(params, EvalPoint(a, t))
            assert abs(ev.value) <= 1 + ev.tail_estimate + 1e-12
        h0 = cf_bessel_series(params, EvalPoint(a, 1e-6)).value
        assert abs(h0 - 1) <= 1e-4


def test_series_cap_reports_non_convergence():
    params = FlightParams(3, 2.0, 1.0)
    with pytest.raises(ConvergenceError, match="no convergence"):
        cf_time_series(params, EvalPoint(5.0, 2.0), max_terms=10)
    with pytest.raises(ConvergenceError):
        cf_bessel_series(params, EvalPoint(5.0, 2.0), max_terms=10)


def test_laplace_closed_examples():
    for m, lam, s in [(3, 0.0, 1.0), (5, 2.0, 0.3), (4, 1.0, 7.0)]:
        assert laplace_cf_closed(FlightParams(m, lam, 1.0), 0.0, s) == pytest.approx(1 / s, rel=1e-14)
    # no switching, m = 3: Laplace transform of sin(t)/t
    oracle, _ = si.quad(lambda t: math.exp(-t) * np.sinc(t / math.pi), 0, math.inf, epsabs=1e-13)
    assert oracle == pytest.approx(math.pi / 4, abs=1e-12)
    assert laplace_cf_closed(FlightParams(3, 0.0, 1.0), 1.0, 1.0) == pytest.approx(oracle, abs=1e-11)
    with pytest.raises(ValueError):
        laplace_cf_closed(FlightParams(3, 1.0, 1.0), 1.0, 0.0)


@pytest.mark.parametrize("m, lam, a, s", [(3, 1.0, 1.0, 2.0), (5, 2.0, 0.5, 3.0)])
def test_laplace_roundtrip(m, lam, a, s):
    params = FlightParams(m, lam, 1.0)
    assert abs(laplace_numeric_roundtrip(params, a, s) - laplace_cf_closed(params, a, s)) <= 1e-6


def test_laplace_roundtrip_origin():
    assert laplace_numeric_roundtrip(FlightParams(3, 1.0, 1.0), 0.0, 1.0) == pytest.approx(1.0, abs=1e-8)


def test_laplace_series():
    params = FlightParams(3, 1.0, 1.0)
    a, s = 1.0, 5.0
    value = laplace_series_A(params, a, s, 200)
    assert value == pytest.approx(quotient_from_2f1(params, a, s), abs=1e-9)
    assert value == pytest.approx(laplace_cf_closed(params, a, s - params.lam), abs=1e-9)
    # leading term
    assert laplace_series_A(params, a, s, 1) == pytest.approx(1 / math.sqrt(s * s + a * a), rel=1e-15)
    # no switching: only the xi_n survive
    free = FlightParams(4, 0.0, 1.0)
    expected = sum(xi_bessel(n, 4).eval(0.0, 1.0) * (s * s + 1) ** (-n / 2) for n in range(1, 41))
    assert laplace_series_A(free, 1.0, s, 40) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(ValueError):
        laplace_series_A(params, a, 1.5, 10)


def test_adaptive_simpson():
    assert adaptive_simpson(math.sin, 0.0, math.pi, 1e-10) == pytest.approx(2.0, abs=1e-10)
    assert adaptive_simpson(lambda x: x**3, 0.0, 2.0, 1e-12) == pytest.approx(4.0, abs=1e-12)


def test_eval_point_validation():
    with pytest.raises(ValueError):
        EvalPoint(-1.0, 1.0)
    with pytest.raises(ValueError):
        EvalPoint(1.0, 0.0)
