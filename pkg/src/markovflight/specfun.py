"""Special-function kernel: Pochhammer symbols, double factorials, Gamma at
half-integers, a truncated Gauss hypergeometric series and Bessel functions of
the first kind of real nonnegative order.

Everything here is a pure function of its arguments.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

DEFAULT_TOL = 1e-12

BESSEL_MAX_ORDER = 120
BESSEL_MAX_ARG = 50.0
BESSEL_TERM_CAP = 500
HYP2F1_TERM_CAP = 10_000

_SQRT_PI = math.sqrt(math.pi)


class ConvergenceError(ArithmeticError):
    """A series failed to meet its tolerance within the term cap."""


def pochhammer(a, n: int):
    """Rising factorial ``a (a+1) ... (a+n-1)``; exact for rational ``a``."""
    if n < 0:
        raise ValueError(f"pochhammer needs n >= 0, got {n}")
    if isinstance(a, Rational):
        a = Fraction(a)
    result = Fraction(1) if isinstance(a, Fraction) else 1.0
    for k in range(n):
        result *= a + k
    return result


def double_factorial(n: int) -> int:
    """n!! with the convention 0!! = (-1)!! = 1."""
    if n < -1:
        raise ValueError(f"double factorial is defined for n >= -1, got {n}")
    result = 1
    for k in range(n, 0, -2):
        result *= k
    return result


def gamma_half_integer(k2: int) -> float:
    """Gamma(k2 / 2) for a positive integer ``k2``.

    Integer arguments go through the factorial, half-integers through
    Gamma(k + 1/2) = (2k-1)!! sqrt(pi) / 2^k. The integer part is exact and
    converted to float once.
    """
    if k2 < 1:
        raise ValueError(f"k2 must be a positive integer, got {k2}")
    if k2 % 2 == 0:
        return float(math.factorial(k2 // 2 - 1))
    k = (k2 - 1) // 2
    return float(Fraction(double_factorial(2 * k - 1), 2**k)) * _SQRT_PI


def gauss_2f1(a: float, b: float, c: float, z: float, tol: float = DEFAULT_TOL) -> float:
    """Partial sum of the Gauss hypergeometric series 2F1(a, b; c; z), |z| < 1.

    Summation stops once three consecutive terms fall below ``tol * |S|`` and
    the geometric tail bound built from the current term ratio is below
    ``tol``. Terminating series (a or b a nonpositive integer) stop exactly.
    """
    if not abs(z) < 1.0:
        raise ValueError(f"gauss_2f1 requires |z| < 1, got z={z!r}")
    if c <= 0 and float(c).is_integer():
        raise ValueError(f"c must not be a nonpositive integer, got c={c!r}")
    total = 1.0
    term = 1.0
    small = 0
    for n in range(HYP2F1_TERM_CAP):
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        term *= ratio
        if term == 0.0:
            return total
        total += term
        if abs(term) < tol * abs(total):
            small += 1
        else:
            small = 0
        if small >= 3:
            r = abs((a + n + 1) * (b + n + 1) / ((c + n + 1) * (n + 2)) * z)
            if r < 1.0 and abs(term) * r / (1.0 - r) <= tol * max(1.0, abs(total)):
                return total
    raise ConvergenceError(
        f"2F1({a}, {b}; {c}; {z}) did not converge in {HYP2F1_TERM_CAP} terms "
        f"(last term {term:.3e})"
    )


def _check_bessel_range(nu, z) -> None:
    if nu < 0 or z < 0:
        raise ValueError(f"bessel_j needs nu >= 0 and z >= 0, got nu={nu}, z={z}")
    if nu > BESSEL_MAX_ORDER or z > BESSEL_MAX_ARG:
        raise ValueError(
            f"bessel_j supports 0 <= nu <= {BESSEL_MAX_ORDER} and "
            f"0 <= z <= {BESSEL_MAX_ARG}; got nu={nu}, z={z}"
        )


def bessel_j_scaled(nu, z: float, tol: float = DEFAULT_TOL) -> float:
    """Gamma(nu+1) (2/z)^nu J_nu(z), i.e. 0F1(; nu+1; -z^2/4).

    The normalized form stays O(1) for every order, so callers that multiply
    by (t / 2a)^nu never meet overflow or denormals. The ascending series is
    summed in fixed-point integer arithmetic with enough guard bits to absorb
    the cancellation at large z.
    """
    _check_bessel_range(nu, z)
    if z == 0:
        return 1.0
    nu_q = Fraction(nu)
    nu_num, nu_den = nu_q.numerator, nu_q.denominator
    x = Fraction(z) ** 2 / 4
    x_num, x_den = x.numerator, x.denominator
    # the series is bounded by I_0(z) <= e^z, so this many bits cover the peak
    prec = 64 + int(math.ceil(z * 1.4426950408889634)) + 16
    one = 1 << prec
    # absolute accuracy survives the (z/2)^nu / Gamma(nu+1) <= e^(z/2) prefactor
    cutoff = max(1, int(one * tol * 1e-4 * math.exp(-z)))
    term = one
    total = one
    peak_k = math.sqrt(float(x))
    for k in range(1, BESSEL_TERM_CAP + 1):
        term = -(term * x_num * nu_den) // (x_den * k * (nu_num + k * nu_den))
        total += term
        if k > peak_k and abs(term) < cutoff:
            return total / one
    raise ConvergenceError(f"J_{nu}({z}) series did not converge in {BESSEL_TERM_CAP} terms")


def bessel_j(nu, z: float, tol: float = DEFAULT_TOL) -> float:
    """Bessel function of the first kind J_nu(z), 0 <= nu <= 120, 0 <= z <= 50."""
    _check_bessel_range(nu, z)
    if z == 0:
        return 1.0 if nu == 0 else 0.0
    nu_q = Fraction(nu)
    if nu_q.denominator <= 2:
        gamma = gamma_half_integer(int(2 * nu_q) + 2)
    else:
        gamma = math.gamma(float(nu) + 1)
    return (z / 2) ** float(nu) / gamma * bessel_j_scaled(nu, z, tol)
