"""Exhaustive conjugacy classes of a Weyl group.

Every element w is encoded by the indices (into the root list) of the images
w(a_1), ..., w(a_r), packed into one uint64. The group is generated by a
breadth-first search on left multiplication by simple reflections, so the
BFS depth is the length. Classes are the connected components of the graph
x -- s x s over simple reflections s; we find them by label propagation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .element import WeylElement, format_factors
from .roots import RootSystem

MAX_ENUMERATION = 3_000_000
_CHUNK = 1 << 18


class EnumerationBudget(ValueError):
    pass


@dataclass(frozen=True)
class ConjugacyClass:
    representative: WeylElement  # an element of minimal length
    size: int
    min_length: int
    factors: tuple[tuple[int, int], ...]
    fingerprint: tuple[int, ...]

    @property
    def elliptic(self) -> bool:
        return all(d != 1 for d, _ in self.factors)

    def to_json(self) -> dict:
        return {"size": self.size, "min_length": self.min_length,
                "factors": format_factors(self.factors), "fingerprint": list(self.fingerprint),
                "word": list(self.representative.reduced_word())}


class _RootIndex:
    """Coordinates of roots <-> positions in ``roots``."""

    def __init__(self, system: RootSystem):
        self.roots = system.roots
        self.base = 2 * int(np.abs(self.roots).max()) + 1
        codes = self.encode(self.roots)
        self.order = np.argsort(codes)
        self.sorted_codes = codes[self.order]

    def encode(self, coords: np.ndarray) -> np.ndarray:
        shifted = coords.astype(np.int64) + self.base // 2
        powers = self.base ** np.arange(coords.shape[-1], dtype=np.int64)
        return shifted @ powers

    def lookup(self, coords: np.ndarray) -> np.ndarray:
        codes = self.encode(coords)
        pos = np.searchsorted(self.sorted_codes, codes)
        if np.any(pos >= len(self.sorted_codes)) or np.any(self.sorted_codes[pos] != codes):
            raise ArithmeticError("image is not a root")
        return self.order[pos]


def _pack(idx: np.ndarray) -> np.ndarray:
    out = np.zeros(len(idx), dtype=np.uint64)
    for j in range(idx.shape[1]):
        out |= idx[:, j].astype(np.uint64) << np.uint64(8 * j)
    return out


def _simple_perms(system: RootSystem, index: _RootIndex) -> np.ndarray:
    roots = index.roots
    return np.stack([index.lookup(roots @ s.T) for s in system.reflections])


def enumerate_elements(system: RootSystem, limit: int = MAX_ENUMERATION):
    """All of W as (idx array (|W|, r), lengths), sorted by packed key."""
    order = system.order()
    if order > limit:
        raise EnumerationBudget(f"|W({system.label})| = {order} exceeds the budget {limit}")
    index = _RootIndex(system)
    perms = _simple_perms(system, index)
    r = system.rank
    layer = index.lookup(np.eye(r, dtype=np.int64))[None, :]  # the identity
    seen = _pack(layer)
    idx_all, len_all = [layer], [np.zeros(1, dtype=np.int64)]
    depth = 0
    while len(layer):
        depth += 1
        cand = np.concatenate([perms[s][layer] for s in range(r)])
        keys, first = np.unique(_pack(cand), return_index=True)
        fresh = ~np.isin(keys, seen)
        layer = cand[first[fresh]]
        if len(layer):
            seen = np.union1d(seen, keys[fresh])
            idx_all.append(layer)
            len_all.append(np.full(len(layer), depth, dtype=np.int64))
    idx = np.concatenate(idx_all)
    lengths = np.concatenate(len_all)
    keys = _pack(idx)
    srt = np.argsort(keys)
    if len(idx) != order:
        raise AssertionError("enumeration did not produce |W| elements")
    return idx[srt], lengths[srt], keys[srt], index, perms


def _conjugate_indices(system, idx, keys, index, perms, s) -> np.ndarray:
    """Positions (in the sorted key list) of s x s for every element x."""
    cartan_row = system.cartan[s]
    out = np.empty(len(idx), dtype=np.int64)
    for lo in range(0, len(idx), _CHUNK):
        block = idx[lo:lo + _CHUNK]
        coords = index.roots[block]  # (m, r_cols, r_coords)
        coords = coords - cartan_row[None, :, None] * coords[:, s:s + 1, :]
        images = index.lookup(coords.reshape(-1, system.rank)).reshape(block.shape)
        images = perms[s][images]
        out[lo:lo + _CHUNK] = np.searchsorted(keys, _pack(images))
    return out


def enumerate_classes(system: RootSystem, limit: int = MAX_ENUMERATION) -> list[ConjugacyClass]:
    """Complete list of conjugacy classes with exact minimal lengths."""
    idx, lengths, keys, index, perms = enumerate_elements(system, limit)
    nbrs = [_conjugate_indices(system, idx, keys, index, perms, s) for s in range(system.rank)]
    labels = np.arange(len(idx), dtype=np.int64)
    while True:
        new = labels.copy()
        for nb in nbrs:
            np.minimum(new, new[nb], out=new)
        new = new[new]
        if np.array_equal(new, labels):
            break
        labels = new
    classes = []
    roots = index.roots
    for lab in np.unique(labels):
        members = np.flatnonzero(labels == lab)
        best = members[np.argmin(lengths[members])]
        rep = WeylElement(system, roots[idx[best]].T)
        rep = WeylElement(system, rep.matrix, rep.reduced_word())
        classes.append(ConjugacyClass(rep, len(members), int(lengths[best]), rep.factors(),
                                      rep.trace_powers()))
    classes.sort(key=lambda c: (c.min_length, c.factors, c.size, c.fingerprint))
    return classes


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("WEYLWIT_THREADS", "1")))
    except ValueError:
        return 1
