"""Gaussian rationals: exact numbers of the form x + y*i with x, y rational.

Rationals are gmpy2 ``mpq`` values, which are already kept in lowest terms
with a positive denominator. ``GaussRational`` pairs two of them.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _AbstractRational

import gmpy2
from gmpy2 import mpq

Rational = type(mpq(0))

_ZERO = mpq(0)
_ONE = mpq(1)


def to_rational(value) -> Rational:
    """Coerce an int, Fraction or string such as ``"-3/4"`` to mpq."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        return mpq(int(value))
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        return mpq(value.strip())
    if isinstance(value, _AbstractRational):
        return mpq(value.numerator, value.denominator)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rational_sqrt(q: Rational) -> Rational | None:
    """Return the nonnegative rational square root of ``q``, or None."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    if not (gmpy2.is_square(num) and gmpy2.is_square(den)):
        return None
    return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))


def format_rational(q: Rational) -> str:
    return f"{q.numerator}/{q.denominator}"


class GaussRational:
    """An element of Q(i). Immutable; equality and hashing are exact."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", to_rational(re))
        object.__setattr__(self, "im", to_rational(im))

    @classmethod
    def _raw(cls, re: Rational, im: Rational) -> "GaussRational":
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("GaussRational is immutable")

    # -- coercion -------------------------------------------------------
    @staticmethod
    def coerce(value) -> "GaussRational":
        if isinstance(value, GaussRational):
            return value
        return GaussRational._raw(to_rational(value), _ZERO)

    # -- predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def is_integer(self) -> bool:
        return (
            self.re.denominator == 1 and self.im.denominator == 1
        )

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        if isinstance(other, GaussRational):
            return GaussRational._raw(self.re + other.re, self.im + other.im)
        try:
            o = to_rational(other)
        except TypeError:
            return NotImplemented
        return GaussRational._raw(self.re + o, self.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, GaussRational):
            return GaussRational._raw(self.re - other.re, self.im - other.im)
        try:
            o = to_rational(other)
        except TypeError:
            return NotImplemented
        return GaussRational._raw(self.re - o, self.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GaussRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b:
                if not d:
                    return GaussRational._raw(a * c, _ZERO)
                return GaussRational._raw(a * c, a * d)
            if not d:
                return GaussRational._raw(a * c, b * c)
            return GaussRational._raw(a * c - b * d, a * d + b * c)
        try:
            o = to_rational(other)
        except TypeError:
            return NotImplemented
        return GaussRational._raw(self.re * o, self.im * o)

    __rmul__ = __mul__

    def norm(self) -> Rational:
        """The field norm x^2 + y^2."""
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GaussRational":
        return GaussRational._raw(self.re, -self.im)

    def inverse(self) -> "GaussRational":
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(i)")
        if not self.im:
            return GaussRational._raw(1 / self.re, _ZERO)
        n = self.norm()
        return GaussRational._raw(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, GaussRational):
            return self * other.inverse()
        try:
            o = to_rational(other)
        except TypeError:
            return NotImplemented
        if not o:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussRational._raw(self.re / o, self.im / o)

    def __rtruediv__(self, other):
        return GaussRational.coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inverse()
        result = ONE
        e = abs(exponent)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def sqrt(self) -> "GaussRational | None":
        """An exact square root in Q(i) if one exists, else None.

        The root returned has positive real part, or zero real part and
        nonnegative imaginary part, so the choice is canonical.
        """
        a, b = self.re, self.im
        if not b:
            r = rational_sqrt(a)
            if r is not None:
                return GaussRational._raw(r, _ZERO)
            r = rational_sqrt(-a)
            if r is not None:
                return GaussRational._raw(_ZERO, r)
            return None
        modulus = rational_sqrt(a * a + b * b)
        if modulus is None:
            return None
        x = rational_sqrt((a + modulus) / 2)
        if x is None or not x:
            return None
        return GaussRational._raw(x, b / (2 * x))

    # -- comparison and hashing ------------------------------------------
    def __eq__(self, other):
        if isinstance(other, GaussRational):
            return self.re == other.re and self.im == other.im
        try:
            o = to_rational(other)
        except TypeError:
            return NotImplemented
        return not self.im and self.re == o

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    # -- conversion -------------------------------------------------------
    def to_json(self):
        if not self.im:
            return format_rational(self.re)
        return {"re": format_rational(self.re), "im": format_rational(self.im)}

    @classmethod
    def from_json(cls, data) -> "GaussRational":
        if isinstance(data, dict):
            return cls(data.get("re", 0), data.get("im", 0))
        if isinstance(data, (int, str)) and not isinstance(data, bool):
            return cls(data)
        raise ValueError(f"not a serialized scalar: {data!r}")

    def as_int(self) -> int:
        if self.im or self.re.denominator != 1:
            raise ValueError(f"{self} is not a rational integer")
        return int(self.re)

    def __repr__(self):
        return f"GaussRational({self})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


ZERO = GaussRational._raw(_ZERO, _ZERO)
ONE = GaussRational._raw(_ONE, _ZERO)
I = GaussRational._raw(_ZERO, _ONE)


def gr(value) -> GaussRational:
    """Shorthand coercion used throughout the package."""
    return GaussRational.coerce(value)


def nth_roots(value, n: int) -> list[GaussRational]:
    """All r in Q(i) with r**n == value, in a canonical order.

    Candidates come from a high precision complex root followed by
    continued-fraction recovery; each candidate is then verified exactly,
    so the floating step can only lose roots with huge heights, never
    produce a wrong one.  Order: real positive first, then by decreasing
    real part and imaginary part.
    """
    import gmpy2

    v = gr(value)
    if n < 1:
        raise ValueError("n must be positive")
    if not v:
        return [ZERO]
    found = set()
    with gmpy2.context(gmpy2.get_context(), precision=512):
        z = gmpy2.mpc(gmpy2.mpfr(v.re), gmpy2.mpfr(v.im))
        base = gmpy2.exp(gmpy2.log(z) / n)
        for k in range(n):
            cand = base * gmpy2.exp(gmpy2.mpc(0, 2 * gmpy2.const_pi() * k / n))
            parts = []
            for x in (cand.real, cand.imag):
                if abs(x) < gmpy2.mpfr(2) ** -200:
                    parts.append(_ZERO)
                else:
                    parts.append(gmpy2.f2q(x, gmpy2.mpfr(2) ** -200))
            r = GaussRational(parts[0], parts[1])
            if r ** n == v:
                found.add(r)
    return sorted(found, key=lambda r: (r.im != 0 or r.re < 0, -r.re, -r.im))
