"""Univariate polynomials over Q(i), characteristic polynomials, Jordan data
and cyclotomic factorization."""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .matrix import Matrix
from .scalar import ONE, ZERO, GaussRational, gr


class Poly:
    """Polynomial with ascending coefficients; trailing zeros are stripped."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        cs = [gr(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def monomial(cls, degree: int, c=1) -> "Poly":
        return cls([0] * degree + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> GaussRational:
        return self.coeffs[-1] if self.coeffs else ZERO

    def __getitem__(self, e: int) -> GaussRational:
        return self.coeffs[e] if 0 <= e < len(self.coeffs) else ZERO

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[e] + other[e] for e in range(n)])

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = gr(other)
            return Poly([c * x for x in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        result = Poly([1])
        for _ in range(k):
            result = result * self
        return result

    def divmod(self, divisor: "Poly") -> tuple["Poly", "Poly"]:
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = divisor.degree
        inv_lead = divisor.lead().inverse()
        quot = [ZERO] * max(len(rem) - dq, 0)
        for e in range(len(rem) - 1, dq - 1, -1):
            c = rem[e] * inv_lead
            if not c:
                continue
            quot[e - dq] = c
            for j, d in enumerate(divisor.coeffs):
                rem[e - dq + j] = rem[e - dq + j] - c * d
        return Poly(quot), Poly(rem[:dq])

    def __call__(self, x) -> GaussRational:
        x = gr(x)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_integral(self) -> bool:
        return all(c.is_integer() and c.is_real() for c in self.coeffs)

    def int_coeffs(self) -> list[int]:
        return [c.as_int() for c in self.coeffs]

    def series(self, terms: int) -> list[GaussRational]:
        return [self[e] for e in range(terms)]

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        parts = [f"{c}*T^{e}" for e, c in enumerate(self.coeffs) if c]
        return "Poly(" + " + ".join(parts) + ")"


def series_inverse(p: Poly, terms: int) -> list[GaussRational]:
    """First ``terms`` coefficients of 1/p as a power series (p(0) != 0)."""
    c0 = p[0]
    if not c0:
        raise ZeroDivisionError("constant term must be invertible")
    inv0 = c0.inverse()
    out: list[GaussRational] = []
    for e in range(terms):
        acc = ONE if e == 0 else ZERO
        for j in range(1, min(e, p.degree) + 1):
            acc = acc - p[j] * out[e - j]
        out.append(acc * inv0)
    return out


def series_mul(x: Sequence, y: Sequence, terms: int) -> list[GaussRational]:
    return [
        sum((gr(x[i]) * gr(y[e - i]) for i in range(e + 1) if i < len(x) and e - i < len(y)), ZERO)
        for e in range(terms)
    ]


def char_poly(m: Matrix) -> Poly:
    """Monic det(T*I - M) by the Faddeev-LeVerrier recursion."""
    if not m.is_square():
        raise ValueError("characteristic polynomial of a non-square matrix")
    n = m.rows
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    aux = Matrix.identity(n)
    for k in range(1, n + 1):
        am = m @ aux
        trace = sum((am[i, i] for i in range(n)), ZERO)
        c = -trace / k
        coeffs[n - k] = c
        aux = am + Matrix.identity(n).scale(c)
    return Poly(coeffs)


def jordan_partition(m: Matrix, eigenvalue) -> list[int]:
    """Jordan block sizes for ``eigenvalue``, largest first.

    With N = M - lambda*I and r_k = rank(N^k), the number of blocks of size
    at least k is r_{k-1} - r_k. Returns [] when lambda is not an eigenvalue.
    """
    if not m.is_square():
        raise ValueError("Jordan data of a non-square matrix")
    n = m.rows
    nil = m - Matrix.identity(n).scale(gr(eigenvalue))
    ranks = [n]
    power = Matrix.identity(n)
    while True:
        power = power @ nil
        ranks.append(power.rank())
        if ranks[-1] == ranks[-2]:
            break
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    sizes: list[int] = []
    for k, count in enumerate(at_least, start=1):
        exactly = count - (at_least[k] if k < len(at_least) else 0)
        sizes.extend([k] * exactly)
    return sorted(sizes, reverse=True)


# -- cyclotomic polynomials ------------------------------------------------

MAX_CYCLOTOMIC_INDEX = 60


def _int_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    num = list(num)
    dq = len(den) - 1
    lead = den[-1]
    quot = [0] * max(len(num) - dq, 0)
    for e in range(len(num) - 1, dq - 1, -1):
        if num[e] % lead:
            return [], [1]
        c = num[e] // lead
        quot[e - dq] = c
        if c:
            for j, d in enumerate(den):
                num[e - dq + j] -= c * d
    rem = num[:dq]
    while rem and rem[-1] == 0:
        rem.pop()
    return quot, rem


@lru_cache(maxsize=None)
def cyclotomic(d: int) -> tuple[int, ...]:
    """Integer coefficients (ascending) of the d-th cyclotomic polynomial."""
    if d < 1:
        raise ValueError("cyclotomic index must be positive")
    poly = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            poly, rem = _int_divmod(poly, list(cyclotomic(e)))
            assert not rem
    return tuple(poly)


def cyclotomic_poly(d: int) -> Poly:
    return Poly(cyclotomic(d))


class NotCyclotomic(ValueError):
    """Raised when a polynomial is not a product of cyclotomic polynomials."""

    def __init__(self, factors: dict[int, int], remainder: list[int]):
        self.factors = factors
        self.remainder = remainder
        super().__init__(f"non-cyclotomic remainder with coefficients {remainder}")


def cyclotomic_factorization(p: Poly) -> dict[int, int]:
    """Factor a monic integer polynomial into cyclotomic polynomials.

    Returns ``{d: multiplicity}`` sorted by d. Raises ``NotCyclotomic``
    (carrying the partial factorization and the leftover factor) when some
    factor is not cyclotomic with index <= 60, and ``ValueError`` on
    non-integer coefficients.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    if not p.is_integral():
        raise ValueError("cyclotomic factorization needs integer coefficients")
    coeffs = p.int_coeffs()
    if coeffs[-1] != 1:
        raise ValueError("polynomial must be monic")
    factors: dict[int, int] = {}
    for d in range(1, MAX_CYCLOTOMIC_INDEX + 1):
        phi = list(cyclotomic(d))
        if len(phi) > len(coeffs):
            continue
        while len(coeffs) > 1:
            quot, rem = _int_divmod(coeffs, phi)
            if rem:
                break
            coeffs = quot
            factors[d] = factors.get(d, 0) + 1
    if coeffs != [1]:
        raise NotCyclotomic(factors, coeffs)
    return factors


def cyclotomic_product(factors: dict[int, int]) -> Poly:
    out = Poly([1])
    for d, mult in sorted(factors.items()):
        out = out * (cyclotomic_poly(d) ** mult)
    return out
