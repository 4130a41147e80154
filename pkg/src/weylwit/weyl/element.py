"""Weyl group elements as integer matrices in the simple-root basis."""

from __future__ import annotations

from functools import lru_cache
from math import gcd, lcm

import numpy as np

from ..exact.poly import NotCyclotomic, Poly, cyclotomic, cyclotomic_factorization
from .roots import RootSystem, _frozen


def totient(d: int) -> int:
    return sum(1 for k in range(1, d + 1) if gcd(k, d) == 1)


def int_char_poly(m: np.ndarray) -> tuple[int, ...]:
    """Ascending coefficients of det(T - m) for a small integer matrix."""
    n = m.shape[0]
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    aux = np.eye(n, dtype=np.int64)
    for k in range(1, n + 1):
        am = m @ aux
        tr = int(np.trace(am))
        if tr % k:
            raise ArithmeticError("non-integral Faddeev-LeVerrier step")
        c = -tr // k
        coeffs[n - k] = c
        aux = am + c * np.eye(n, dtype=np.int64)
    return tuple(coeffs)


@lru_cache(maxsize=4096)
def factor_cyclotomic(coeffs: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
    """Cyclotomic factorization as sorted ``((d, mult), ...)``."""
    return tuple(sorted(cyclotomic_factorization(Poly(coeffs)).items()))


def factors_product(factors) -> tuple[int, ...]:
    out = [1]
    for d, mult in dict(factors).items():
        for _ in range(mult):
            phi = cyclotomic(d)
            res = [0] * (len(out) + len(phi) - 1)
            for i, a in enumerate(out):
                for j, b in enumerate(phi):
                    res[i + j] += a * b
            out = res
    return tuple(out)


def power_factors(factors, e: int) -> tuple[tuple[int, int], ...]:
    """Factorization for w^e given the one for w (eigenvalues raised to e)."""
    out: dict[int, int] = {}
    for d, mult in dict(factors).items():
        d2 = d // gcd(d, e)
        out[d2] = out.get(d2, 0) + mult * totient(d) // totient(d2)
    return tuple(sorted(out.items()))


def negate_factors(factors) -> tuple[tuple[int, int], ...]:
    """Factorization for -w: zeta -> -zeta sends Phi_d to Phi_{d'}."""
    out: dict[int, int] = {}
    for d, mult in dict(factors).items():
        d2 = 2 * d if d % 2 else (d // 2 if d % 4 == 2 else d)
        out[d2] = out.get(d2, 0) + mult
    return tuple(sorted(out.items()))


def format_factors(factors) -> str:
    parts = []
    for d, m in sorted(dict(factors).items()):
        parts.append(f"Phi{d}" + (f"^{m}" if m > 1 else ""))
    return "*".join(parts) if parts else "1"


class WeylElement:
    """An element w of W, stored by its matrix in the root basis.

    Column j holds the coordinates of w(a_j). ``word`` is an optional
    expression over the simple reflections (0-based) with w = s_{w[0]} s_{w[1]} ...
    """

    __slots__ = ("system", "matrix", "word", "_key")

    def __init__(self, system: RootSystem, matrix, word: tuple[int, ...] | None = None):
        self.system = system
        self.matrix = _frozen(matrix)
        self.word = None if word is None else tuple(word)
        self._key = self.matrix.tobytes()

    @classmethod
    def identity(cls, system: RootSystem) -> "WeylElement":
        return cls(system, np.eye(system.rank, dtype=np.int64), ())

    @classmethod
    def from_word(cls, system: RootSystem, word) -> "WeylElement":
        m = np.eye(system.rank, dtype=np.int64)
        for i in word:
            m = m @ system.reflections[i]
        return cls(system, m, tuple(word))

    @classmethod
    def coxeter(cls, system: RootSystem) -> "WeylElement":
        return cls.from_word(system, range(system.rank))

    def __eq__(self, other) -> bool:
        return isinstance(other, WeylElement) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"WeylElement({self.system.label}, length={self.length()})"

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        word = None if self.word is None or other.word is None else self.word + other.word
        return WeylElement(self.system, self.matrix @ other.matrix, word)

    def __neg__(self) -> "WeylElement":
        return WeylElement(self.system, -self.matrix)

    def __pow__(self, e: int) -> "WeylElement":
        if e < 0:
            return self.inverse() ** (-e)
        m = np.linalg.matrix_power(self.matrix, e)
        word = None if self.word is None else self.word * e
        return WeylElement(self.system, m, word)

    def inverse(self) -> "WeylElement":
        word = self.reduced_word()
        inv = WeylElement.from_word(self.system, tuple(reversed(word)))
        if not np.array_equal(self.matrix @ inv.matrix, np.eye(self.system.rank, dtype=np.int64)):
            raise ArithmeticError("inverse failed")
        return inv

    def conjugate(self, i: int) -> "WeylElement":
        s = self.system.reflections[i]
        word = None if self.word is None else (i,) + self.word + (i,)
        return WeylElement(self.system, s @ self.matrix @ s, word)

    # -- invariants --------------------------------------------------------

    def length(self) -> int:
        """Number of positive roots sent to negative roots."""
        heights = self.matrix.sum(axis=0) @ self.system.positive.T
        return int(np.count_nonzero(heights < 0))

    def reduced_word(self) -> tuple[int, ...]:
        m = self.matrix
        out = []
        while True:
            descents = np.flatnonzero(m.sum(axis=0) < 0)
            if len(descents) == 0:
                break
            i = int(descents[0])
            m = m @ self.system.reflections[i]
            out.append(i)
        return tuple(reversed(out))

    def char_poly(self) -> tuple[int, ...]:
        return int_char_poly(self.matrix)

    def factors(self) -> tuple[tuple[int, int], ...]:
        return factor_cyclotomic(self.char_poly())

    def is_elliptic(self) -> bool:
        # the characteristic polynomial at T = 1 is det(1 - w) up to sign
        return sum(self.char_poly()) != 0

    def order(self) -> int:
        return lcm(*(d for d, _ in self.factors())) if self.system.rank else 1

    def trace_powers(self) -> tuple[int, ...]:
        """Traces of w, w^2, ..., w^order: a conjugation invariant."""
        out = []
        m = np.eye(self.system.rank, dtype=np.int64)
        for _ in range(self.order()):
            m = m @ self.matrix
            out.append(int(np.trace(m)))
        return tuple(out)

    def to_json(self) -> dict:
        return {"type": self.system.label, "word": list(self.reduced_word()),
                "length": self.length(), "factors": format_factors(self.factors())}


__all__ = [
    "WeylElement", "int_char_poly", "factor_cyclotomic", "factors_product", "power_factors",
    "negate_factors", "format_factors", "totient", "NotCyclotomic",
]
