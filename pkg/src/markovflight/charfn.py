"""Numerical evaluation of the characteristic function H(alpha, t).

Two series are available: the Bessel-function expansion, with coefficients
``zeta_n``, and the power series in t, with coefficients ``gamma_n``. The
closed-form Laplace transform and its series in ``(s^2 + v)^(-1/2)`` are
provided for round-trip checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .coeffs import FlightParams, Kind, numeric_derived
from .specfun import (
    DEFAULT_TOL,
    ConvergenceError,
    bessel_j,
    bessel_j_scaled,
    gauss_2f1,
)

MAX_TERMS = 400
SMALL_ARG = 1e-6
_STOP_RUN = 4
_CHUNK = 64


@dataclass(frozen=True)
class EvalPoint:
    """Norm ``a = |alpha|`` of the inversion vector and time ``t``."""

    a: float
    t: float

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError(f"|alpha| must be >= 0, got {self.a!r}")
        if not self.t > 0:
            raise ValueError(f"t must be > 0, got {self.t!r}")


@dataclass(frozen=True)
class CfEvaluation:
    value: float
    terms_used: int
    tail_estimate: float
    representation: str  # "bessel" or "time"


@lru_cache(maxsize=4096)
def _coefficients(kind: Kind, m: int, lam: float, v: float, n_max: int) -> tuple[float, ...]:
    return tuple(numeric_derived(kind, m, lam, v, n_max))


def _coefficient_stream(kind: Kind, m: int, lam: float, v: float, cap: int):
    """Yield derived_1, derived_2, ... computing them in growing batches."""
    n_max = _CHUNK
    n = 1
    while n <= cap:
        coeffs = _coefficients(kind, m, lam, v, min(n_max, cap))
        while n < len(coeffs):
            yield coeffs[n]
            n += 1
        n_max *= 2


def _sum_series(terms, tol: float, cap: int, what: str) -> tuple[float, int, float]:
    """Sum until ``_STOP_RUN`` consecutive terms are below tol * max(1, |S|)."""
    total = 0.0
    recent: list[float] = []
    small = 0
    used = 0
    for term in terms:
        if not math.isfinite(term):
            raise ConvergenceError(f"{what}: non-finite term at n={used + 1}")
        total += term
        used += 1
        recent.append(abs(term))
        if len(recent) > _STOP_RUN:
            recent.pop(0)
        small = small + 1 if abs(term) < tol * max(1.0, abs(total)) else 0
        if small >= _STOP_RUN:
            return total, used, sum(recent)
        if used >= cap:
            break
    raise ConvergenceError(
        f"{what}: no convergence after {used} terms (last term magnitude "
        f"{recent[-1] if recent else float('nan'):.3e})"
    )


def bessel_series_terms(params: FlightParams, pt: EvalPoint, tol: float = DEFAULT_TOL, cap: int = 241):
    """Terms n = 1, 2, ... of the Bessel series bracket (before e^{-lam t}).

    The n-th term of

        sqrt(pi) sum_{n>=1} zeta_n / Gamma(n/2) * (t / (2ca))^{(n-1)/2} J_{(n-1)/2}(cta)

    is produced as ``zeta_n * t^(n-1)/(n-1)! * Gamma(nu+1) (2/z)^nu J_nu(z)``
    with nu = (n-1)/2 and z = cta: the Gamma prefactors merge by the
    duplication formula. The normalized Bessel factor tends to 1 as z -> 0,
    which is used verbatim below ``SMALL_ARG``.
    """
    m, lam, c = params.m, params.lam, params.c
    z = c * pt.t * pt.a
    v = (c * pt.a) ** 2
    tiny = z < SMALL_ARG
    weight = 1.0  # t^(n-1)/(n-1)!
    for n, zeta in enumerate(_coefficient_stream(Kind.BESSEL, m, lam, v, min(cap, 241)), start=1):
        if n > 1:
            weight *= pt.t / (n - 1)
        scaled = 1.0 if tiny else bessel_j_scaled((n - 1) / 2, z, tol)
        yield zeta * weight * scaled


def time_series_terms(params: FlightParams, pt: EvalPoint, cap: int = MAX_TERMS):
    """Terms gamma_{n+1} t^n / n!, n = 0, 1, ..., of the time-series bracket."""
    v = (params.c * pt.a) ** 2
    weight = 1.0
    for n, gamma in enumerate(_coefficient_stream(Kind.TIME, params.m, params.lam, v, cap + 1)):
        if n:
            weight *= pt.t / n
        yield gamma * weight


def cf_bessel_series(
    params: FlightParams, pt: EvalPoint, tol: float = DEFAULT_TOL, max_terms: int = MAX_TERMS
) -> CfEvaluation:
    """H(alpha, t) from the Bessel-function series; see ``bessel_series_terms``."""
    cap = min(max_terms, 241)  # order (n-1)/2 <= 120
    terms = bessel_series_terms(params, pt, tol, cap)
    total, used, tail = _sum_series(terms, tol, cap, "Bessel series")
    damp = math.exp(-params.lam * pt.t)
    return CfEvaluation(damp * total, used, damp * tail, "bessel")


def cf_time_series(
    params: FlightParams, pt: EvalPoint, tol: float = DEFAULT_TOL, max_terms: int = MAX_TERMS
) -> CfEvaluation:
    """H(alpha, t) = e^{-lam t} sum_{n>=0} gamma_{n+1}(lam, v) t^n / n!."""
    terms = time_series_terms(params, pt, max_terms)
    total, used, tail = _sum_series(terms, tol, max_terms, "time series")
    damp = math.exp(-params.lam * pt.t)
    return CfEvaluation(damp * total, used, damp * tail, "time")


def cf_bessel_partial_5(params: FlightParams, pt: EvalPoint) -> float:
    """The first five Bessel-series terms written out with elementary forms."""
    m, lam, c = params.m, params.lam, params.c
    a, t = pt.a, pt.t
    if a <= 0:
        raise ValueError("the explicit five-term form needs |alpha| > 0")
    ca = c * a
    z = ca * t
    v = ca * ca
    k = (m - 2) / m
    bracket = (
        bessel_j(0, z)
        + lam * math.sin(z) / ca
        + (lam**2 + k / 2 * v) * t / ca * bessel_j(1, z)
        + (lam**3 + lam * k * v) * t / (2 * v) * (math.sin(z) / z - math.cos(z))
        + (lam**4 + 1.5 * lam**2 * k * v + 3 / 8 * (m - 2) / (m + 2) * v * v)
        * t**2
        / (3 * v)
        * bessel_j(2, z)
    )
    return math.exp(-lam * t) * bracket


def cf_time_partial_5(params: FlightParams, pt: EvalPoint) -> float:
    """The first five time-series terms (through t^4) written out."""
    m, lam, c = params.m, params.lam, params.c
    t = pt.t
    v = (c * pt.a) ** 2
    bracket = (
        1
        + lam * t
        + (lam**2 - v / m) * t**2 / 2
        + (lam**3 - lam * 2 / m * v) * t**3 / 6
        + (lam**4 - lam**2 * 3 / m * v + 3 / (m * (m + 2)) * v * v) * t**4 / 24
    )
    return math.exp(-lam * t) * bracket


# -- Laplace domain -----------------------------------------------------------------


def laplace_cf_closed(params: FlightParams, a: float, s: float, tol: float = DEFAULT_TOL) -> float:
    """Closed-form Laplace transform of H in t, real s > 0."""
    if not s > 0:
        raise ValueError(f"s must be > 0, got {s!r}")
    m, lam, c = params.m, params.lam, params.c
    v = (c * a) ** 2
    shifted = (s + lam) ** 2 + v
    f = gauss_2f1(0.5, (m - 2) / 2, m / 2, v / shifted, tol)
    den = math.sqrt(shifted) - lam * f
    if abs(den) < 1e-10:
        raise ZeroDivisionError(f"Laplace transform singular at s={s}, a={a}")
    return f / den


def laplace_series_A(params: FlightParams, a: float, s: float, N: int) -> float:
    """Partial sum ``sum_{n=1}^{N} zeta_n / (s^2 + v)^(n/2)``.

    This is the bracketed quotient before the e^{-lam t} shift, so it equals
    ``laplace_cf_closed(params, a, s - lam)``. Requires s > lam + c*a.
    """
    m, lam, c = params.m, params.lam, params.c
    if not s > lam + c * a:
        raise ValueError(f"series guard needs s > lam + c*a = {lam + c * a}, got s={s}")
    if N < 1:
        raise ValueError("N must be >= 1")
    v = (c * a) ** 2
    q = 1.0 / math.sqrt(s * s + v)
    zeta = numeric_derived(Kind.BESSEL, m, lam, v, N)
    total = 0.0
    power = 1.0
    growing = 0
    previous = math.inf
    for n in range(1, N + 1):
        power *= q
        term = zeta[n] * power
        total += term
        if term != 0.0:
            growing = growing + 1 if abs(term) > previous else 0
            previous = abs(term)
        if growing >= 5:
            raise ConvergenceError(f"Laplace series terms grew for 5 consecutive orders (n={n})")
    return total


def adaptive_simpson(f, lo: float, hi: float, tol: float, max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature with Richardson correction."""

    def simpson(fa, fm, fb, h):
        return h / 6 * (fa + 4 * fm + fb)

    fa, fb = f(lo), f(hi)
    mid = (lo + hi) / 2
    fm = f(mid)
    stack = [(lo, hi, fa, fm, fb, simpson(fa, fm, fb, hi - lo), tol, 0)]
    total = 0.0
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = (a + b) / 2
        lm, rm = (a + m) / 2, (m + b) / 2
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        delta = left + right - whole
        if abs(delta) <= 15 * eps:
            total += left + right + delta / 15
        elif depth >= max_depth:
            raise ConvergenceError(f"adaptive Simpson hit depth {max_depth} on [{a}, {b}]")
        else:
            stack.append((a, m, fa, flm, fm, left, eps / 2, depth + 1))
            stack.append((m, b, fm, frm, fb, right, eps / 2, depth + 1))
    return total


def laplace_numeric_roundtrip(
    params: FlightParams,
    a: float,
    s: float,
    T_max: float | None = None,
    tol: float = 1e-8,
    evaluator=None,
) -> float:
    """Integrate e^{-st} H(a, t) over [0, T_max] with the time series as H.

    ``evaluator(params, EvalPoint) -> float`` replaces the time series when given.
    """
    if evaluator is None:
        evaluator = lambda p, pt: cf_time_series(p, pt).value  # noqa: E731
    if not s > 0:
        raise ValueError(f"s must be > 0, got {s!r}")
    if T_max is None:
        T_max = max(40 / s, 40 / (s + params.lam), -math.log(tol) / s)

    def integrand(t: float) -> float:
        if t == 0.0:
            return 1.0
        return math.exp(-s * t) * evaluator(params, EvalPoint(a, t))

    return adaptive_simpson(integrand, 0.0, T_max, tol / 10)
