"""Mixed moments of the flight from the time-series coefficients.

A moment is a derivative of H at alpha = 0. Because every gamma_n depends on
alpha only through |alpha|^2, the operator d^{2m}/(d alpha_1^2 ... d alpha_m^2)
at 0 keeps just the |alpha|^{2m} part of each gamma_n, scaled by (2m)!!.

Coefficients live in v = (c|alpha|)^2, so the v^m coefficient already carries
the factor c^{2m}; this module tracks that power of c explicitly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .coeffs import EXACT_CAP, Kind, _check_m, derived_by_recurrence
from .specfun import double_factorial


@dataclass(frozen=True)
class MomentTerm:
    """``coeff * lam^deg_lambda * c^deg_c * t^n`` inside the e^{-lam t} bracket."""

    n: int
    coeff: Fraction
    deg_lambda: int
    deg_c: int


@dataclass(frozen=True)
class MomentSeries:
    m: int
    q: tuple[int, ...]
    terms: tuple[MomentTerm, ...]
    truncation_order: int
    extension: bool = False  # True where the result goes beyond m = 3

    def coefficient(self, n: int) -> MomentTerm | None:
        for term in self.terms:
            if term.n == n:
                return term
        return None

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "q": list(self.q),
            "terms": [
                {
                    "n": term.n,
                    "coeff_num": term.coeff.numerator,
                    "coeff_den": term.coeff.denominator,
                    "deg_lambda": term.deg_lambda,
                    "deg_c": term.deg_c,
                }
                for term in self.terms
            ],
            "truncation_order": self.truncation_order,
            "extension": self.extension,
        }


def d_operator_monomial(m: int, n: int) -> int:
    """d^{2m}/(d a_1^2 ... d a_m^2) (a_1^2 + ... + a_m^2)^n at a = 0."""
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return double_factorial(2 * m) if n == m else 0


def mixed_moment_all_ones(m: int) -> MomentSeries:
    """E[X_1 ... X_m] vanishes: H is even in each alpha_j."""
    _check_m(m)
    return MomentSeries(m, (1,) * m, (), truncation_order=0, extension=m != 3)


def mixed_moment_all_twos_series(m: int, N: int) -> MomentSeries:
    """Power series in t of E[X_1^2 ... X_m^2] through t^N (exact).

    The t^n coefficient inside the bracket is

        (-1)^m (2m)!! [v^m] gamma_{n+1} / n!   times  c^{2m},

    with (-i)^{2m} = (-1)^m from the moment formula; [v^m] gamma_{n+1} is a
    single monomial in lambda of degree n - 2m.
    """
    _check_m(m)
    if not 0 <= N <= EXACT_CAP - 1:
        raise ValueError(f"order N must satisfy 0 <= N <= {EXACT_CAP - 1}, got {N}")
    gammas = derived_by_recurrence(Kind.TIME, m, N + 1).derived
    d_factor = d_operator_monomial(m, m)
    sign = (-1) ** m
    terms = []
    for n in range(N + 1):
        for deg_lambda, c_v in sorted(gammas[n + 1].coeff_of_v(m).items()):
            coeff = sign * d_factor * c_v / math.factorial(n)
            terms.append(MomentTerm(n, coeff, deg_lambda, 2 * m))
    return MomentSeries(m, (2,) * m, tuple(terms), truncation_order=N, extension=m != 3)


def eval_moment_series(series: MomentSeries, lam: float, c: float, t: float) -> float:
    """e^{-lam t} * sum coeff * lam^deg_lambda * c^deg_c * t^n."""
    if not t > 0:
        raise ValueError(f"t must be > 0, got {t!r}")
    total = math.fsum(
        float(term.coeff) * lam**term.deg_lambda * c**term.deg_c * t**term.n for term in series.terms
    )
    return math.exp(-lam * t) * total
