"""Admissible block-size sequences and their derived invariants.

Two families are handled. ``IsoBlockSeq`` describes an isometry of an
epsilon-symmetric form by the Jordan block sizes of g on its generalized
(+1)- and (-1)-eigenspaces. ``TwistedBlockSeq`` does the same for
g^{*2}, where g is a nondegenerate bilinear form.

Both carry the line multiplicities p_t and the sign group shape, i.e. which
adjacent sign coordinates are forced to agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class SequenceError(ValueError):
    """The input sequences violate an admissibility rule."""


def _normalize(values: Iterable[int], name: str) -> tuple[int, ...]:
    seq = [int(v) for v in values]
    if any(v < 0 for v in seq):
        raise SequenceError(f"{name} has a negative entry: {seq}")
    if any(x < y for x, y in zip(seq, seq[1:])):
        raise SequenceError(f"{name} is not weakly decreasing: {seq}")
    while seq and seq[-1] == 0:
        seq.pop()
    for x, y in zip(seq, seq[1:]):
        if x == y:
            raise SequenceError(f"{name} repeats the positive entry {x}")
    return tuple(seq)


def _at(seq: Sequence[int], i: int) -> int:
    """1-based access with implicit trailing zeros."""
    return seq[i - 1] if 1 <= i <= len(seq) else 0


def _common_k(a: Sequence[int], b: Sequence[int]) -> int:
    k = 0
    while _at(a, k + 1) * _at(b, k + 1) > 0:
        k += 1
    for i in range(k + 2, max(len(a), len(b)) + 1):
        if _at(a, i) * _at(b, i) > 0:
            raise SequenceError("indices with a_i*b_i > 0 must form an initial segment")
    return k


@dataclass(frozen=True)
class SignGroupShape:
    """Sign vectors (w_1..w_size) in {+1,-1}, with w_t = w_{t+1} for each linked t."""

    size: int
    linked_pairs: tuple[tuple[int, int], ...] = ()

    def components(self) -> list[list[int]]:
        parent = list(range(self.size + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for s, t in self.linked_pairs:
            parent[find(t)] = find(s)
        groups: dict[int, list[int]] = {}
        for t in range(1, self.size + 1):
            groups.setdefault(find(t), []).append(t)
        return sorted(groups.values())

    @property
    def rank(self) -> int:
        return len(self.components())

    @property
    def order(self) -> int:
        return 2 ** self.rank

    def elements(self) -> list[tuple[int, ...]]:
        """All sign vectors in a fixed order (binary counting over components)."""
        comps = self.components()
        out = []
        for mask in range(2 ** len(comps)):
            omega = [1] * self.size
            for bit, comp in enumerate(comps):
                if mask >> bit & 1:
                    for t in comp:
                        omega[t - 1] = -1
            out.append(tuple(omega))
        return out

    def generators(self) -> list[tuple[int, ...]]:
        gens = []
        for comp in self.components():
            omega = [1] * self.size
            for t in comp:
                omega[t - 1] = -1
            gens.append(tuple(omega))
        return gens

    def contains(self, omega: Sequence[int]) -> bool:
        return (
            len(omega) == self.size
            and all(w in (1, -1) for w in omega)
            and all(omega[s - 1] == omega[t - 1] for s, t in self.linked_pairs)
        )

    def to_json(self) -> dict:
        return {"size": self.size, "linked_pairs": [list(p) for p in self.linked_pairs],
                "order": self.order}


@dataclass(frozen=True)
class IsoBlockSeq:
    a: tuple[int, ...]
    b: tuple[int, ...]
    epsilon: int
    dim: int
    kappa: int
    k: int
    c: tuple[int, ...]
    p: tuple[int, ...]
    two_p_prime: tuple[int, ...]
    sigma: int
    linked: tuple[tuple[int, int], ...] = field(default=())

    @property
    def num_lines(self) -> int:
        return self.sigma + self.kappa

    def a_at(self, i: int) -> int:
        return _at(self.a, i)

    def b_at(self, i: int) -> int:
        return _at(self.b, i)

    def p_at(self, t: int) -> int:
        return _at(self.p, t)

    def delta(self, t: int) -> int:
        """+1 when the t-th block sits on the (+1)-eigenspace side, -1 otherwise."""
        return 1 if self.a_at(t) > 0 else -1

    def to_json(self) -> dict:
        return {
            "a": list(self.a), "b": list(self.b), "epsilon": self.epsilon,
            "dim": self.dim, "kappa": self.kappa, "k": self.k, "c": list(self.c),
            "p": list(self.p), "two_p_prime": list(self.two_p_prime),
            "sigma": self.sigma, "sign_group": sign_group(self).to_json(),
        }


def derive_iso(a: Iterable[int], b: Iterable[int], epsilon: int | None = None) -> IsoBlockSeq:
    """Validate (a, b) and compute every derived quantity.

    ``epsilon`` is inferred from the parity of the positive entries: a
    positive entry m forces (-1)^m = -epsilon. It must be supplied only when
    both sequences are empty (the zero-dimensional case defaults to +1).
    """
    a, b = _normalize(a, "a"), _normalize(b, "b")
    parities = {(-1) ** m for m in a + b}
    if len(parities) > 1:
        raise SequenceError("positive entries of a and b must share one parity")
    if parities:
        inferred = -parities.pop()
        if epsilon is not None and epsilon != inferred:
            raise SequenceError(f"parity forces epsilon={inferred}, got {epsilon}")
        epsilon = inferred
    elif epsilon is None:
        epsilon = 1
    if epsilon not in (1, -1):
        raise SequenceError("epsilon must be +1 or -1")

    dim = sum(a) + sum(b)
    kappa = dim % 2
    k = _common_k(a, b)
    length = max(len(a), len(b))
    c = tuple(_at(a, i) + _at(b, i) for i in range(1, length + 1))

    p: list[int] = []
    if epsilon == -1:
        p = [ci // 2 for ci in c]
    else:
        p = [ci // 2 for ci in c[:k]]
        i = k + 1
        while i <= length:
            first, second = _at(c, i), _at(c, i + 1)
            if first >= 1 and second >= 1:
                p += [(first - 1) // 2, (second + 1) // 2]
            elif first >= 1:
                p += [(first - 1) // 2, 0]
            else:
                p += [0, 0]
            i += 2
    while p and p[-1] == 0:
        p.pop()
    sigma = len(p)
    if any(v == 0 for v in p):
        raise SequenceError("internal: zero line multiplicity before the last positive one")
    if 2 * sum(p) + kappa != dim:
        raise SequenceError("derived multiplicities do not add up to the dimension")
    two_p_prime = tuple(2 * v for v in p) + ((1,) if kappa else ())

    linked: list[tuple[int, int]] = []
    if epsilon == 1:
        last = sigma + kappa
        t = k + 1
        while t + 1 <= last:
            linked.append((t, t + 1))
            t += 2
    return IsoBlockSeq(a, b, epsilon, dim, kappa, k, c, tuple(p), two_p_prime, sigma,
                       tuple(linked))


@dataclass(frozen=True)
class TwistedBlockSeq:
    a: tuple[int, ...]
    b: tuple[int, ...]
    n: int
    k: int
    p: tuple[int, ...]
    sigma: int
    linked: tuple[tuple[int, int], ...] = field(default=())

    @property
    def num_lines(self) -> int:
        return self.sigma

    def a_at(self, i: int) -> int:
        return _at(self.a, i)

    def b_at(self, i: int) -> int:
        return _at(self.b, i)

    def p_at(self, t: int) -> int:
        return _at(self.p, t)

    def to_json(self) -> dict:
        return {
            "a": list(self.a), "b": list(self.b), "n": self.n, "k": self.k,
            "p": list(self.p), "sigma": self.sigma,
            "sign_group": sign_group(self).to_json(),
        }


def derive_twisted(a: Iterable[int], b: Iterable[int]) -> TwistedBlockSeq:
    a, b = _normalize(a, "a"), _normalize(b, "b")
    if any(m % 2 == 0 for m in a):
        raise SequenceError("positive entries of a must be odd")
    if any(m % 2 == 1 for m in b):
        raise SequenceError("positive entries of b must be even")
    n = sum(a) + sum(b)
    k = _common_k(a, b)
    length = max(len(a), len(b))
    p = [(_at(a, i) + _at(b, i) + 1) // 2 for i in range(1, k + 1)]
    i = k + 1
    while i <= length:
        if _at(b, i) > 0:
            p += [_at(b, i) // 2, (_at(b, i + 1) + 2) // 2]
        elif _at(a, i) > 0 and _at(a, i + 1) > 0:
            p += [(_at(a, i) + 1) // 2, (_at(a, i + 1) + 1) // 2]
        elif _at(a, i) > 0:
            p += [(_at(a, i) + 1) // 2, 0]
        else:
            p += [0, 0]
        i += 2
    while p and p[-1] == 0:
        p.pop()
    sigma = len(p)
    if sum(2 * v - 1 for v in p) != n:
        raise SequenceError("derived multiplicities do not add up to the dimension")
    linked = []
    t = k + 1
    while t + 1 <= sigma:
        if _at(b, t) > 0:
            linked.append((t, t + 1))
        t += 2
    return TwistedBlockSeq(a, b, n, k, tuple(p), sigma, tuple(linked))


def sign_group(seq: IsoBlockSeq | TwistedBlockSeq) -> SignGroupShape:
    return SignGroupShape(seq.num_lines, seq.linked)


# -- bounded enumeration (used by sweeps and the self-test) -------------------

def _strict_partitions(total: int, parity: int | None, max_part: int | None = None):
    """Strictly decreasing positive tuples summing to ``total`` with given parity."""
    if total == 0:
        yield ()
        return
    top = total if max_part is None else min(total, max_part)
    for first in range(top, 0, -1):
        if parity is not None and first % 2 != parity:
            continue
        for rest in _strict_partitions(total - first, parity, first - 1):
            yield (first,) + rest


def _initial_segment_ok(a, b) -> bool:
    try:
        _common_k(a, b)
    except SequenceError:
        return False
    return True


def admissible_iso(dim: int, epsilon: int) -> list[IsoBlockSeq]:
    """All admissible iso sequences of total size ``dim`` for the given epsilon."""
    parity = 1 if epsilon == 1 else 0
    out = []
    for na in range(dim + 1):
        for a in _strict_partitions(na, parity):
            for b in _strict_partitions(dim - na, parity):
                if (a or b) and _initial_segment_ok(a, b):
                    out.append(derive_iso(a, b))
    if dim == 0:
        out.append(derive_iso((), (), epsilon))
    return out


def admissible_twisted(n: int) -> list[TwistedBlockSeq]:
    out = []
    for na in range(n + 1):
        for a in _strict_partitions(na, 1):
            for b in _strict_partitions(n - na, 0):
                if _initial_segment_ok(a, b):
                    out.append(derive_twisted(a, b))
    return out
