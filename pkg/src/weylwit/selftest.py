"""Property sweeps behind ``weylwit selftest``.

Every suite is deterministic given the seed and records no timings, so two
runs with the same flags produce identical reports.
"""

from __future__ import annotations

import random

from . import iso_witness as iw
from . import twisted_witness as tw
from .block_seq import admissible_iso, admissible_twisted
from .weyl import build_weyl, enumerate_classes, verify_table

TWISTED_MAX = 11


class _Suite:
    def __init__(self, name: str):
        self.name = name
        self.cases = 0
        self.failures: list[dict] = []

    def fail(self, where, what, detail=None) -> None:
        entry = {"case": where, "check": what}
        if detail is not None:
            entry["detail"] = detail
        self.failures.append(entry)

    def to_json(self) -> dict:
        return {"suite": self.name, "cases": self.cases, "ok": not self.failures,
                "failures": self.failures}


def iso_suite(max_dim: int, seed: int) -> _Suite:
    suite = _Suite("isometry witnesses")
    rng = random.Random(seed)
    for n in range(max_dim + 1):
        for eps in (1, -1):
            for seq in admissible_iso(n, eps):
                where = {"a": list(seq.a), "b": list(seq.b), "epsilon": eps}
                suite.cases += 1
                w = iw.build(seq)
                rep = iw.validate(w)
                if not rep.ok:
                    suite.fail(where, "validate", rep.failures()[:3])
                    continue
                try:
                    wn = iw.normalize(w)
                except iw.WitnessError as exc:
                    suite.fail(where, "normalize", str(exc))
                    continue
                if n:
                    rho = iw.random_isometry(w.gram, eps, rng, 3)
                    moved = iw.act(w, rho, [rng.choice([1, 2, -3]) for _ in w.lines])
                    gamma = iw.transport(w, moved)
                    if not iw.check_transport(w, moved, gamma).ok:
                        suite.fail(where, "transport")
                iso = iw.isotropy(wn)
                if not iso.report.ok or len(iso.elements) != 2 ** iso.shape.rank:
                    suite.fail(where, "isotropy order", len(iso.elements))
                if eps == 1 and n % 2 == 0 and n >= 2:
                    comp = iw.isotropic_component(wn)
                    if not comp.get("same_as_reference", True):
                        suite.fail(where, "component of the reference")
                    rho = iw.random_isometry(w.gram, 1, rng, rng.randint(1, 3))
                    flip = rho.det() == -1
                    moved = iw.isotropic_component(iw.normalize(iw.act(wn, rho)))
                    if moved["label"] != comp["label"] ^ flip or moved["same_as_reference"] == flip:
                        suite.fail(where, "component after an isometry", int(rho.det() == 1))
                    if seq.a_at(1) > 0 and seq.b_at(1) > 0:
                        neg = iw.negative_det_element(wn)
                        if not neg["ok"]:
                            suite.fail(where, "restricted determinants")
                        kept = iw.isotropic_component(iw.act(wn, neg["gamma"]))
                        if kept["label"] != comp["label"]:
                            suite.fail(where, "component kept by the sign element")
                if eps == 1 and n % 2 == 1:
                    if not iw.special_isotropy(wn)["det_matches_last_sign"]:
                        suite.fail(where, "determinant equals last sign")
    return suite


def twisted_suite(max_dim: int, seed: int) -> _Suite:
    suite = _Suite("bilinear form witnesses")
    rng = random.Random(seed)
    for n in range(min(max_dim, TWISTED_MAX) + 1):
        for seq in admissible_twisted(n):
            where = {"a": list(seq.a), "b": list(seq.b)}
            suite.cases += 1
            w = tw.build_twisted(seq)
            rep = tw.validate_twisted(w)
            if not rep.ok:
                suite.fail(where, "validate", rep.failures()[:3])
                continue
            try:
                wn = tw.normalize_twisted(w)
            except iw.WitnessError as exc:
                suite.fail(where, "normalize", str(exc))
                continue
            iso = tw.isotropy_twisted(wn)
            if not iso.report.ok or len(iso.elements) != 2 ** iso.shape.rank:
                suite.fail(where, "isotropy order", len(iso.elements))
            if not n:
                continue
            rho = tw.random_conjugator(n, rng, det=None)
            moved = tw.act_twisted(w, rho, [rng.choice([1, 2, -3]) for _ in w.lines])
            gamma = tw.transport_twisted(w, moved)
            if not tw.check_transport_twisted(w, moved, gamma).ok:
                suite.fail(where, "transport")
            sl = tw.sl_refinement(w)
            if not sl["det_check"].ok:
                suite.fail(where, "sl refinement", sl["det_check"].failures())
            if (sl["class_count"] == 1) != (seq.a_at(1) > 0):
                suite.fail(where, "class count")
            if sl["class_count"] == 2 and sl["rescale"] is not None:
                base = tw.gamma1_rescale(w)[0]
                for d in (1, -1):
                    moved = tw.act_twisted(base, tw.random_conjugator(n, rng, det=d))
                    if tw.sl_refinement(moved).get("class_label") != d:
                        suite.fail(where, "class label", d)
    return suite


def weyl_suite(seed: int) -> _Suite:
    suite = _Suite("weyl tables")
    for label, count in (("G2", 6), ("F4", 25)):
        suite.cases += 1
        classes = enumerate_classes(build_weyl(label))
        if len(classes) != count:
            suite.fail(label, "class count", len(classes))
        suite.cases += 1
        report = verify_table(label, seed=seed)
        if not report.ok:
            suite.fail(label, "table", [r.to_json() for r in report.rows if r.status != "pass"])
    return suite


def run_selftest(max_dim: int = 10, seed: int = 0) -> dict:
    suites = [iso_suite(max_dim, seed), twisted_suite(max_dim, seed), weyl_suite(seed)]
    return {"schema": "v1", "command": "selftest", "max_dim": max_dim, "seed": seed,
            "ok": all(not s.failures for s in suites), "suites": [s.to_json() for s in suites]}
