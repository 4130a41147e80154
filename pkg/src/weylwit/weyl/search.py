"""Cyclic-shift descent and seeded search for elements with a given
characteristic polynomial.

Descent: replace w by s w s whenever that shortens it. When no simple
reflection shortens w, explore the set of elements of the same length
reachable by cyclic shifts; if some member admits a shortening shift we
continue from there. If the whole plateau is explored without finding one,
w has minimal length in its class. That last step relies on the standard
result about cyclic shifts in finite Coxeter groups.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .element import (
    WeylElement, factors_product, int_char_poly, negate_factors, power_factors, totient,
)
from .roots import RootSystem

PLATEAU_LIMIT = 100_000


@dataclass
class Descent:
    element: WeylElement
    steps: int = 0  # conjugations performed
    certified: bool = False  # plateau exhausted: the length is the class minimum


def _length(system: RootSystem, m: np.ndarray) -> int:
    return int(np.count_nonzero((m.sum(axis=0) @ system.positive.T) < 0))


def descend(w: WeylElement, seed: int = 0, plateau_limit: int = PLATEAU_LIMIT) -> Descent:
    system = w.system
    rng = np.random.default_rng(seed)
    refl = system.reflections
    cur = w.matrix
    cur_len = _length(system, cur)
    steps = 0
    while True:
        # greedy phase
        improved = True
        while improved:
            improved = False
            for i in rng.permutation(system.rank):
                cand = refl[i] @ cur @ refl[i]
                steps += 1
                cl = _length(system, cand)
                if cl < cur_len:
                    cur, cur_len, improved = cand, cl, True
                    break
        # plateau exploration
        seen = {cur.tobytes()}
        queue = deque([cur])
        lower = None
        while queue and lower is None:
            x = queue.popleft()
            for i in rng.permutation(system.rank):
                cand = refl[i] @ x @ refl[i]
                steps += 1
                cl = _length(system, cand)
                if cl < cur_len:
                    lower = (cand, cl)
                    break
                key = cand.tobytes()
                if cl == cur_len and key not in seen:
                    if len(seen) >= plateau_limit:
                        queue.clear()
                        break
                    seen.add(key)
                    queue.append(cand)
        if lower is not None:
            cur, cur_len = lower
            continue
        exhausted = len(seen) < plateau_limit
        elem = WeylElement(system, cur)
        return Descent(WeylElement(system, cur, elem.reduced_word()), steps, exhausted)


def cyclic_shift_minimize(w: WeylElement, seed: int = 0) -> WeylElement:
    """A conjugate of w reached by length-non-increasing cyclic shifts."""
    return descend(w, seed).element


def random_element(system: RootSystem, rng: np.random.Generator, n_reflections: int | None = None):
    """Product of random reflections in positive roots; returns (matrix, steps)."""
    k = n_reflections if n_reflections is not None else 4 * system.rank + 4
    refl = system.positive_reflections
    m = np.eye(system.rank, dtype=np.int64)
    for j in rng.integers(0, system.n_positive, size=k):
        m = m @ refl[j]
    return m, k


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


@dataclass
class SearchResult:
    target: tuple[tuple[int, int], ...]
    element: WeylElement | None
    steps: int
    samples: int
    hits: int
    certified: bool
    lengths_seen: list[int] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.element is not None


def find_elliptic_rep(system: RootSystem, target, budget: int = 10**6, seed: int = 0,
                      want_length: int | None = None, max_hits: int = 8,
                      plateau_limit: int = PLATEAU_LIMIT) -> SearchResult:
    """Search for an element whose characteristic polynomial is ``target``.

    Candidates are random products of reflections w together with their
    powers w^e and, when -1 lies in W, the negatives -w^e; the factorization
    of a candidate is predicted from that of w and then confirmed exactly.
    Each hit is minimized by cyclic shifts. The search stops at the first
    certified minimum (whose length equals ``want_length`` when given), or
    after ``max_hits`` hits, or when ``budget`` steps are spent; the best
    element found is returned. A miss is not a disproof.
    """
    target = tuple(sorted(dict(target).items()))
    if sum(totient(d) * m for d, m in target) != system.rank:
        raise ValueError("target degree differs from the rank")
    want_poly = factors_product(target)
    rng = np.random.default_rng(seed)
    negate = system.has_minus_one()
    steps = samples = hits = 0
    best: Descent | None = None
    lengths: list[int] = []
    while steps < budget and hits < max_hits:
        m, k = random_element(system, rng)
        steps += k
        samples += 1
        fac = WeylElement(system, m).factors()
        order = np.lcm.reduce([d for d, _ in fac])
        choice = None
        for e in _divisors(int(order)):
            pf = power_factors(fac, e)
            if pf == target:
                choice = (e, 1)
            elif negate and negate_factors(pf) == target:
                choice = (e, -1)
            if choice:
                break
        if choice is None:
            continue
        e, sign = choice
        cand = sign * np.linalg.matrix_power(m, e)
        if int_char_poly(cand) != want_poly:
            raise ArithmeticError("predicted characteristic polynomial does not match")
        hits += 1
        res = descend(WeylElement(system, cand), seed=int(rng.integers(2**31)),
                      plateau_limit=plateau_limit)
        steps += res.steps
        lengths.append(res.element.length())
        if best is None or (res.certified, -res.element.length()) > (best.certified, -best.element.length()):
            best = res
        if res.certified and (want_length is None or res.element.length() == want_length):
            break
    return SearchResult(target, None if best is None else best.element, steps, samples, hits,
                        bool(best and best.certified), lengths)

