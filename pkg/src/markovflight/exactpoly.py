"""Exact polynomials over the rationals in two symbols: the switching rate
``l`` (lambda) and ``v = (c * |alpha|)^2``.

Every series coefficient of the flight's characteristic function is such a
polynomial; keeping them exact lets tables be compared against printed forms
with zero tolerance.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

Monomial = tuple[int, int]  # (deg_lambda, deg_v)


class BivariatePoly:
    """Immutable sparse polynomial ``sum c_ij * l^i * v^j`` with Fraction c_ij."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean: dict[Monomial, Fraction] = {}
        for (i, j), coeff in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in monomial {(i, j)}")
            q = Fraction(coeff)
            if q:
                clean[(int(i), int(j))] = q
        self._terms = clean
        self._hash = None

    @classmethod
    def constant(cls, value) -> BivariatePoly:
        return cls({(0, 0): value})

    @classmethod
    def monomial(cls, coeff, deg_lambda: int = 0, deg_v: int = 0) -> BivariatePoly:
        return cls({(deg_lambda, deg_v): coeff})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BivariatePoly):
            try:
                other = BivariatePoly.constant(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    @staticmethod
    def _coerce(other) -> BivariatePoly:
        if isinstance(other, BivariatePoly):
            return other
        return BivariatePoly.constant(other)

    def __add__(self, other) -> BivariatePoly:
        other = self._coerce(other)
        out = dict(self._terms)
        for mono, coeff in other._terms.items():
            out[mono] = out.get(mono, 0) + coeff
        return BivariatePoly(out)

    __radd__ = __add__

    def __neg__(self) -> BivariatePoly:
        return BivariatePoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> BivariatePoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> BivariatePoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> BivariatePoly:
        if not isinstance(other, BivariatePoly):
            q = Fraction(other)
            return BivariatePoly({k: c * q for k, c in self._terms.items()})
        out: dict[Monomial, Fraction] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + c1 * c2
        return BivariatePoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> BivariatePoly:
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = BivariatePoly.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def deg_lambda(self) -> int:
        """Largest power of lambda; -1 for the zero polynomial."""
        return max((i for i, _ in self._terms), default=-1)

    def deg_v(self) -> int:
        """Largest power of v; -1 for the zero polynomial."""
        return max((j for _, j in self._terms), default=-1)

    def eval(self, lam: float, v: float) -> float:
        """Numeric value, Horner in v over lambda-Horner coefficients."""
        return poly_eval(self, lam, v)

    def coeff_of_v(self, k: int) -> dict[int, Fraction]:
        return coeff_of_v(self, k)

    def sorted_terms(self) -> list[tuple[int, int, Fraction]]:
        """Terms ordered by (deg_lambda desc, deg_v asc)."""
        return [
            (i, j, c)
            for (i, j), c in sorted(self._terms.items(), key=lambda kv: (-kv[0][0], kv[0][1]))
        ]

    def render(self) -> str:
        """Canonical text form, e.g. ``l^7 - 2*l^5*v + 22/15*l^3*v^2``."""
        if not self._terms:
            return "0"
        parts: list[str] = []
        for i, j, c in self.sorted_terms():
            factors = []
            if i:
                factors.append("l" if i == 1 else f"l^{i}")
            if j:
                factors.append("v" if j == 1 else f"v^{j}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            sign = "-" if c < 0 else "+"
            if not parts:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f"{sign} {body}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"BivariatePoly({self.render()!r})"


ZERO = BivariatePoly()
ONE = BivariatePoly.constant(1)
LAMBDA = BivariatePoly.monomial(1, 1, 0)
V = BivariatePoly.monomial(1, 0, 1)


def poly_add(p: BivariatePoly, q: BivariatePoly) -> BivariatePoly:
    return p + q


def poly_mul(p: BivariatePoly, q: BivariatePoly) -> BivariatePoly:
    return p * q


def poly_eval(p: BivariatePoly, lam: float, v: float) -> float:
    if not p:
        return 0.0
    by_v: dict[int, dict[int, Fraction]] = {}
    for (i, j), c in p.items():
        by_v.setdefault(j, {})[i] = c
    result = 0.0
    for j in range(p.deg_v(), -1, -1):
        row = by_v.get(j, {})
        inner = 0.0
        for i in range(max(row, default=-1), -1, -1):
            inner = inner * lam + float(row.get(i, 0))
        result = result * v + inner
    return result


def coeff_of_v(p: BivariatePoly, k: int) -> dict[int, Fraction]:
    """Slice of ``p`` at v^k as a map deg_lambda -> coefficient."""
    return {i: c for (i, j), c in p.items() if j == k}
