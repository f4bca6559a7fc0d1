"""Coefficient sequences of the two series for the flight's characteristic
function.

Both series come from the same power-series quotient

    A(z) = sum(base_n z^n) / sum(dual_n z^n),   dual_0 = 1, dual_n = -lambda * base_n,

with ``base`` the odd-only expansion of ``z * 2F1(a, b; c; b0 z^2)``:

* Bessel kind: ``base = xi``, a = 1/2, b = (m-2)/2, c = m/2, b0 = v.
  The quotient coefficients are ``zeta_n``.
* Time kind: ``base = theta``, a = 1/2, b = 1, c = m/2, b0 = -v.
  The quotient coefficients are ``gamma_n``.

Coefficients are exact ``BivariatePoly`` values in lambda and ``v = (c|alpha|)^2``.
Two independent constructions are provided (recurrence, Hessenberg
determinant) plus the even/odd split of the time-kind recurrence.
"""
from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from .exactpoly import LAMBDA, ONE, V, ZERO, BivariatePoly
from .specfun import double_factorial, pochhammer

EXACT_CAP = 60
DETERMINANT_CAP = 40


class Kind(str, enum.Enum):
    BESSEL = "bessel"
    TIME = "time"


@dataclass(frozen=True)
class FlightParams:
    """Dimension ``m``, switching rate ``lam`` and speed ``c`` of the flight."""

    m: int
    lam: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 3:
            raise ValueError(f"dimension m must be an integer >= 3, got {self.m!r}")
        if not self.lam >= 0:
            raise ValueError(f"switching rate must be >= 0, got {self.lam!r}")
        if not self.c > 0:
            raise ValueError(f"speed c must be > 0, got {self.c!r}")


@dataclass(frozen=True)
class CoefficientTable:
    kind: Kind
    m: int
    base: tuple[BivariatePoly, ...]
    dual: tuple[BivariatePoly, ...]
    derived: tuple[BivariatePoly, ...]

    @property
    def max_order(self) -> int:
        return len(self.derived) - 1


def _check_m(m: int) -> None:
    if int(m) != m or m < 3:
        raise ValueError(f"dimension m must be an integer >= 3, got {m!r}")


# -- generic decomposition ------------------------------------------------------


def lemma1_xi(a, b, c, b0, n: int):
    """Coefficient of z^n in ``z * 2F1(a, b; c; b0 z^2)``.

    ``b0`` may be a number or a ``BivariatePoly``; the result has its type.
    """
    if n % 2 == 0:
        return b0 * 0
    r = (n - 1) // 2
    scale = pochhammer(Fraction(a), r) * pochhammer(Fraction(b), r)
    scale /= pochhammer(Fraction(c), r) * math.factorial(r)
    return b0**r * scale


def lemma1_eta(a, b, c, b0, lam, n: int):
    """Coefficient of z^n in ``1 - lam * z * 2F1(a, b; c; b0 z^2)``."""
    if n == 0:
        return b0**0
    return -(lam * lemma1_xi(a, b, c, b0, n))


# -- closed forms of the two base sequences --------------------------------------


def xi_bessel(n: int, m: int) -> BivariatePoly:
    """((2r-1)!!/(2r)!!) * ((m-2)/(2r+m-2)) * v^r for n = 2r+1, else 0."""
    _check_m(m)
    if n < 0:
        raise ValueError("n must be >= 0")
    if n % 2 == 0:
        return ZERO
    r = (n - 1) // 2
    coeff = Fraction(double_factorial(2 * r - 1), double_factorial(2 * r))
    coeff *= Fraction(m - 2, 2 * r + m - 2)
    return BivariatePoly.monomial(coeff, 0, r)


def theta_time(n: int, m: int) -> BivariatePoly:
    """(-1)^r (1/2)_r / (m/2)_r * v^r for n = 2r+1, else 0."""
    _check_m(m)
    if n < 0:
        raise ValueError("n must be >= 0")
    if n % 2 == 0:
        return ZERO
    r = (n - 1) // 2
    coeff = (-1) ** r * pochhammer(Fraction(1, 2), r) / pochhammer(Fraction(m, 2), r)
    return BivariatePoly.monomial(coeff, 0, r)


def base_coeff(kind: Kind, n: int, m: int) -> BivariatePoly:
    return xi_bessel(n, m) if Kind(kind) is Kind.BESSEL else theta_time(n, m)


def dual_coeff(kind: Kind, n: int, m: int) -> BivariatePoly:
    if n == 0:
        return ONE
    return -(LAMBDA * base_coeff(kind, n, m))


# -- recurrence -------------------------------------------------------------------

_cache_lock = threading.Lock()
_derived_cache: dict[tuple[Kind, int], list[BivariatePoly]] = {}


def _derived_upto(kind: Kind, m: int, N: int) -> list[BivariatePoly]:
    kind = Kind(kind)
    with _cache_lock:
        seq = _derived_cache.setdefault((kind, m), [ZERO, ONE])
        while len(seq) <= N:
            n = len(seq)
            acc = ZERO
            for k in range(1, n, 2):  # base_k vanishes for even k
                acc = acc + seq[n - k] * base_coeff(kind, k, m)
            seq.append(base_coeff(kind, n, m) + LAMBDA * acc)
        return seq[: N + 1]


def derived_by_recurrence(kind: Kind, m: int, N: int) -> CoefficientTable:
    """Quotient coefficients 0..N from
    ``derived_n = base_n + lambda * sum_{k=1}^{n-1} derived_{n-k} base_k``."""
    _check_m(m)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    kind = Kind(kind)
    derived = _derived_upto(kind, m, N)
    base = tuple(base_coeff(kind, n, m) for n in range(N + 1))
    dual = tuple(dual_coeff(kind, n, m) for n in range(N + 1))
    return CoefficientTable(kind, m, base, dual, tuple(derived))


# -- determinant ------------------------------------------------------------------


def determinant_matrix(kind: Kind, m: int, n: int) -> list[list[BivariatePoly]]:
    """n x n lower-Hessenberg matrix with column 1 = base_i and
    entry (i, j>=2) = dual_{i-j+1} (1-based), dual_0 = 1 on the superdiagonal."""
    base = [base_coeff(kind, i, m) for i in range(n + 1)]
    dual = [dual_coeff(kind, i, m) for i in range(n + 1)]
    rows = []
    for i in range(1, n + 1):
        row = [base[i]]
        for j in range(2, n + 1):
            k = i - j + 1
            row.append(dual[k] if k >= 0 else ZERO)
        rows.append(row)
    return rows


def derived_by_determinant(kind: Kind, m: int, n: int) -> BivariatePoly:
    """(-1)^(n+1) det(M) for the Hessenberg matrix of ``determinant_matrix``.

    Division-free elimination: the unit superdiagonal entry of row i serves as
    pivot to clear the rest of that row by column operations. Afterwards each
    row i < n holds a lone 1 in column i+1, the determinant is
    (-1)^(n-1) M[n][1], and the sign cancels against (-1)^(n+1).
    """
    _check_m(m)
    if not 2 <= n <= DETERMINANT_CAP:
        raise ValueError(f"determinant order must satisfy 2 <= n <= {DETERMINANT_CAP}, got {n}")
    a = determinant_matrix(kind, m, n)
    for i in range(n - 1):
        pivot_col = i + 1
        for k in range(pivot_col):
            f = a[i][k]
            if not f:
                continue
            for r in range(i, n):
                g = a[r][pivot_col]
                if g:
                    a[r][k] = a[r][k] - f * g
    return a[n - 1][0]


# -- even/odd split of the time-kind recurrence -------------------------------------


def gamma_even_odd_split(m: int, N: int) -> CoefficientTable:
    """gamma_n from the parity-split form of the time-kind recurrence:

    gamma_2n   = lambda * sum_{k=0}^{n-1} gamma_{2n-2k-1} theta_{2k+1}
    gamma_2n+1 = theta_{2n+1} + lambda * sum_{k=0}^{n-1} gamma_{2n-2k} theta_{2k+1}
    """
    _check_m(m)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    theta = [theta_time(i, m) for i in range(N + 1)]
    gamma = [ZERO, ONE] + [ZERO] * (N - 1)
    for idx in range(2, N + 1):
        n = idx // 2
        acc = ZERO
        if idx % 2 == 0:
            for k in range(n):
                acc = acc + gamma[2 * n - 2 * k - 1] * theta[2 * k + 1]
            gamma[idx] = LAMBDA * acc
        else:
            for k in range(n):
                acc = acc + gamma[2 * n - 2 * k] * theta[2 * k + 1]
            gamma[idx] = theta[idx] + LAMBDA * acc
    dual = tuple(dual_coeff(Kind.TIME, i, m) for i in range(N + 1))
    return CoefficientTable(Kind.TIME, m, tuple(theta), dual, tuple(gamma))


# -- numeric coefficients -----------------------------------------------------------


def _base_numeric(kind: Kind, n: int, m: int, v: float) -> float:
    if n % 2 == 0:
        return 0.0
    r = (n - 1) // 2
    if kind is Kind.BESSEL:
        # ((2r-1)!!/(2r)!!) is prod_{k=1}^{r} (2k-1)/(2k)
        coeff = 1.0
        for k in range(1, r + 1):
            coeff *= (2 * k - 1) / (2 * k)
        return coeff * (m - 2) / (2 * r + m - 2) * v**r
    coeff = 1.0
    for k in range(r):
        coeff *= -(0.5 + k) / (m / 2 + k)
    return coeff * v**r


def numeric_derived(kind: Kind, m: int, lam: float, v: float, N: int) -> list[float]:
    """Float values of derived_0..derived_N at (lam, v).

    Orders up to EXACT_CAP come from the exact polynomials; higher orders
    continue the recurrence in floating point.
    """
    kind = Kind(kind)
    exact = _derived_upto(kind, m, min(N, EXACT_CAP))
    out = [p.eval(lam, v) for p in exact]
    if N > EXACT_CAP:
        base = [_base_numeric(kind, k, m, v) for k in range(N + 1)]
        for n in range(EXACT_CAP + 1, N + 1):
            acc = sum(out[n - k] * base[k] for k in range(1, n, 2))
            out.append(base[n] + lam * acc)
    return out


def to_json(kind: Kind, m: int, n: int, poly: BivariatePoly) -> dict:
    """Wire form ``{kind, m, n, poly: [{dl, dv, num, den}]}``."""
    return {
        "kind": Kind(kind).value,
        "m": m,
        "n": n,
        "poly": [
            {"dl": i, "dv": j, "num": c.numerator, "den": c.denominator}
            for i, j, c in poly.sorted_terms()
        ],
        "text": poly.render(),
    }


def from_json(obj: dict) -> BivariatePoly:
    return BivariatePoly({(t["dl"], t["dv"]): Fraction(t["num"], t["den"]) for t in obj["poly"]})


__all__ = [
    "Kind", "FlightParams", "CoefficientTable", "EXACT_CAP", "DETERMINANT_CAP",
    "lemma1_xi", "lemma1_eta", "xi_bessel", "theta_time", "base_coeff", "dual_coeff",
    "derived_by_recurrence", "derived_by_determinant", "determinant_matrix",
    "gamma_even_odd_split", "numeric_derived", "to_json", "from_json", "V",
]
