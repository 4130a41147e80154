"""Embedded tables of elliptic classes and their verification."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .classes import enumerate_classes
from .element import WeylElement, format_factors, totient
from .roots import build_weyl, parse_type
from .search import find_elliptic_rep

TABLE_TYPES = ("G2", "F4", "E6", "E7", "E8")
EXHAUSTIVE_DEFAULT = ("G2", "F4", "E6")
# rows above this length in E8 may come back inconclusive without failing
E8_REQUIRED_MAX = 24


@dataclass(frozen=True)
class EllipticRow:
    type: str
    min_length: int
    factors: tuple[tuple[int, int], ...]
    labels: tuple[str, ...]

    def degree(self) -> int:
        return sum(totient(d) * m for d, m in self.factors)

    def to_json(self) -> dict:
        return {"type": self.type, "min_length": self.min_length,
                "factors": format_factors(self.factors), "labels": list(self.labels)}


@lru_cache(maxsize=None)
def load_rows() -> tuple[EllipticRow, ...]:
    raw = json.loads(resources.files(__package__).joinpath("data/tables.json").read_text("utf-8"))
    return tuple(
        EllipticRow(r["type"], r["min_length"],
                    tuple(sorted((int(d), m) for d, m in r["factors"].items())), tuple(r["labels"]))
        for r in raw["rows"]
    )


def rows_for(type_label: str) -> list[EllipticRow]:
    letter, rank = parse_type(type_label)
    return [r for r in load_rows() if r.type == f"{letter}{rank}"]


@dataclass
class RowReport:
    row: EllipticRow
    checks: list[dict] = field(default_factory=list)
    representative_word: list[int] | None = None
    fingerprint: list[int] | None = None
    inconclusive_allowed: bool = False

    def add(self, name: str, ok: bool, **detail) -> None:
        self.checks.append({"name": name, "ok": bool(ok), **detail})

    @property
    def status(self) -> str:
        if all(c["ok"] for c in self.checks):
            return "pass"
        return "inconclusive" if self.inconclusive_allowed else "fail"

    def to_json(self) -> dict:
        return {"row": self.row.to_json(), "status": self.status, "checks": self.checks,
                "representative_word": self.representative_word, "fingerprint": self.fingerprint}


@dataclass
class TableReport:
    type: str
    rows: list[RowReport]

    @property
    def ok(self) -> bool:
        return all(r.status != "fail" for r in self.rows)

    def to_json(self) -> dict:
        return {"schema": "v1", "type": self.type, "ok": self.ok,
                "rows": [r.to_json() for r in self.rows]}


def _search_row(label: str, k: int, seed: int, budget: int):
    row = rows_for(label)[k]
    return find_elliptic_rep(build_weyl(label), row.factors, budget=budget, seed=seed + k,
                             want_length=row.min_length)


def verify_table(type_label: str, *, seed: int = 0, budget: int = 10**8,
                 exhaustive: bool | None = None, workers: int = 1) -> TableReport:
    """Check every embedded row of one type.

    Each row gets its degree and Phi_1 checks, a seeded search (row k uses
    seed + k) with cyclic-shift minimization, and, when ``exhaustive``, a
    comparison with the full class list. Rows may be searched in parallel
    processes; results are merged in table order.
    """
    system = build_weyl(type_label)
    label = system.label
    if label not in TABLE_TYPES:
        raise ValueError(f"no embedded table for {label}")
    if exhaustive is None:
        exhaustive = label in EXHAUSTIVE_DEFAULT
    rows = rows_for(label)
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_search_row, [label] * len(rows), range(len(rows)),
                                    [seed] * len(rows), [budget] * len(rows)))
    else:
        results = [_search_row(label, k, seed, budget) for k in range(len(rows))]
    classes = enumerate_classes(system) if exhaustive else None
    reports = []
    for row, res in zip(rows, results):
        rep = RowReport(row, inconclusive_allowed=label == "E8" and row.min_length > E8_REQUIRED_MAX)
        rep.add("degree equals rank", row.degree() == system.rank, degree=row.degree())
        rep.add("no Phi1 factor", all(d != 1 for d, _ in row.factors))
        rep.add("representative found", res.found, samples=res.samples, steps=res.steps)
        if res.found:
            w: WeylElement = res.element
            rep.add("characteristic polynomial matches", w.factors() == row.factors,
                    factors=format_factors(w.factors()))
            rep.add("minimized length equals row", w.length() == row.min_length,
                    length=w.length(), certified=res.certified)
            rep.representative_word = list(w.reduced_word())
            rep.fingerprint = list(w.trace_powers())
        if classes is not None:
            matching = [c for c in classes if c.factors == row.factors]
            rep.add("exhaustive class minimum equals row",
                    any(c.min_length == row.min_length for c in matching),
                    classes=[{"size": c.size, "min_length": c.min_length,
                              "fingerprint": list(c.fingerprint)} for c in matching])
        reports.append(rep)
    return TableReport(label, reports)
