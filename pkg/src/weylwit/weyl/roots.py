"""Root systems of finite type, in the basis of simple roots.

Dynkin diagrams follow Bourbaki numbering. For a system with simple roots
a_1..a_r we store the doubled Gram matrix ``gram[i, j] = 2 (a_i, a_j)`` with
short roots normalized to (a, a) = 1, so every entry is an integer, and the
Cartan matrix ``cartan[i, j] = <a_i^vee, a_j>``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import factorial, prod

import numpy as np

EXCEPTIONAL = {"E": (6, 7, 8), "F": (4,), "G": (2,)}


class UnsupportedType(ValueError):
    pass


def parse_type(label: str) -> tuple[str, int]:
    m = re.fullmatch(r"\s*([A-Ga-g])_?(\d+)\s*", label)
    if not m:
        raise UnsupportedType(f"cannot parse Weyl type {label!r}")
    letter, rank = m.group(1).upper(), int(m.group(2))
    ok = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 4,
    }.get(letter, rank in EXCEPTIONAL.get(letter, ()))
    if not ok:
        raise UnsupportedType(f"no root system of type {letter}{rank}")
    return letter, rank


def _diagram(letter: str, r: int) -> tuple[list[int], list[tuple[int, int]]]:
    """Squared root lengths (short = 1) and edges, 0-based."""
    chain = [(i, i + 1) for i in range(r - 1)]
    if letter == "A":
        return [1] * r, chain
    if letter == "B":
        return [2] * (r - 1) + [1], chain
    if letter == "C":
        return [1] * (r - 1) + [2], chain
    if letter == "D":
        return [1] * r, [(i, i + 1) for i in range(r - 2)] + [(r - 3, r - 1)]
    if letter == "E":
        edges = [(0, 2), (2, 3), (3, 4), (1, 3)] + [(i, i + 1) for i in range(4, r - 1)]
        return [1] * r, edges
    if letter == "F":
        return [2, 2, 1, 1], chain
    return [1, 3], chain  # G2: a_1 short, a_2 long


def classical_order(letter: str, r: int) -> int:
    if letter == "A":
        return factorial(r + 1)
    if letter in "BC":
        return 2**r * factorial(r)
    if letter == "D":
        return 2 ** (r - 1) * factorial(r)
    return {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600,
            ("F", 4): 1152, ("G", 2): 12}[(letter, r)]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RootSystem:
    letter: str
    rank: int
    gram: np.ndarray
    cartan: np.ndarray
    positive: np.ndarray  # (N, rank), sorted by height then lexicographically
    reflections: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def label(self) -> str:
        return f"{self.letter}{self.rank}"

    @property
    def n_positive(self) -> int:
        return len(self.positive)

    @property
    def roots(self) -> np.ndarray:
        return np.vstack([self.positive, -self.positive])

    def simple_reflection(self, i: int) -> np.ndarray:
        return self.reflections[i]

    def reflection(self, beta) -> np.ndarray:
        """Matrix of s_beta: v -> v - (2 (v, beta) / (beta, beta)) beta."""
        b = np.asarray(beta, dtype=np.int64)
        norm = int(b @ self.gram @ b)
        coeff = (self.gram @ b) * 2
        if np.any(coeff % norm):
            raise ValueError("not a root")
        return _frozen(np.eye(self.rank, dtype=np.int64) - np.outer(b, coeff // norm))

    @cached_property
    def positive_reflections(self) -> tuple[np.ndarray, ...]:
        return tuple(self.reflection(b) for b in self.positive)

    def exponents(self) -> list[int]:
        """Exponents read off from the number of positive roots of each height."""
        heights = self.positive.sum(axis=1)
        counts = np.bincount(heights)[1:]
        return sorted(int(np.sum(counts >= k)) for k in range(1, self.rank + 1))

    def order(self) -> int:
        """|W| as the product of the degrees (exponents + 1)."""
        return prod(m + 1 for m in self.exponents())

    def coxeter_number(self) -> int:
        return 2 * self.n_positive // self.rank

    def has_minus_one(self) -> bool:
        return all(m % 2 == 1 for m in self.exponents())

    def longest_element(self) -> np.ndarray:
        w = np.eye(self.rank, dtype=np.int64)
        while True:
            heights = w.sum(axis=0)
            ascents = np.flatnonzero(heights > 0)
            if len(ascents) == 0:
                return _frozen(w)
            w = w @ self.reflections[ascents[0]]

    def to_json(self) -> dict:
        return {"type": self.label, "rank": self.rank, "cartan": self.cartan.tolist(),
                "n_roots": 2 * self.n_positive, "order": self.order()}


def build_weyl(label: str) -> RootSystem:
    return _build(*parse_type(label))


@lru_cache(maxsize=None)
def _build(letter: str, r: int) -> RootSystem:
    lengths, edges = _diagram(letter, r)
    gram = np.zeros((r, r), dtype=np.int64)
    for i, d in enumerate(lengths):
        gram[i, i] = 2 * d
    for i, j in edges:
        gram[i, j] = gram[j, i] = -max(lengths[i], lengths[j])
    cartan = gram // np.array(lengths, dtype=np.int64)[:, None]
    refl = []
    for i in range(r):
        s = np.eye(r, dtype=np.int64)
        s[i, :] -= cartan[i, :]
        refl.append(_frozen(s))
    # close the simple roots under simple reflections
    seen = {tuple(row) for row in np.eye(r, dtype=np.int64)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for v in frontier:
            vv = np.array(v, dtype=np.int64)
            for s in refl:
                img = tuple(int(x) for x in s @ vv)
                if img not in seen and all(x >= 0 for x in img):
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    pos = sorted(seen, key=lambda v: (sum(v), v))
    system = RootSystem(letter, r, _frozen(gram), _frozen(cartan), _frozen(np.array(pos)), tuple(refl))
    if system.order() != classical_order(letter, r):
        raise AssertionError(f"order mismatch for {system.label}")
    return system
