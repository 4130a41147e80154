"""Command line front end.

Every command prints one UTF-8 JSON document (to stdout, or to ``-o``) with
``"schema": "v1"``. Exit status: 0 when all checks pass, 1 when a check
fails, 2 on bad usage or inadmissible input, 3 when a file cannot be read
or written.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from . import iso_witness as iw
from . import twisted_witness as tw
from .block_seq import SequenceError, derive_iso, derive_twisted
from .exact import GaussRational, Matrix
from .selftest import run_selftest
from .weyl.classes import worker_count
from .weyl import UnsupportedType, build_weyl, find_elliptic_rep, verify_table

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class IOFailure(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, (Matrix, GaussRational)):
        return obj.to_json()
    if isinstance(obj, iw.Report):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(x) for x in re.split(r"[,\s]+", text)]
    except ValueError as exc:
        raise UsageError(f"expected a comma separated list of integers, got {text!r}") from exc


def parse_factors(text: str) -> dict[int, int]:
    """'Phi6^4', '2^2*14', '2:2,14' -> {d: multiplicity}."""
    out: dict[int, int] = {}
    for item in re.split(r"[,*\s]+", text.strip()):
        if not item:
            continue
        m = re.fullmatch(r"(?:Phi_?)?(\d+)(?:[\^:](\d+))?", item, flags=re.IGNORECASE)
        if not m:
            raise UsageError(f"cannot parse factor {item!r}")
        d, mult = int(m.group(1)), int(m.group(2) or 1)
        out[d] = out.get(d, 0) + mult
    if not out:
        raise UsageError("empty factor list")
    return out


def _read(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IOFailure(f"{path}: {exc}") from exc


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(_jsonable({"schema": "v1", **doc}), indent=2, ensure_ascii=False) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOFailure(f"{out}: {exc}") from exc


# -- commands ----------------------------------------------------------------

def cmd_build_iso(args) -> int:
    seq = derive_iso(_int_list(args.a), _int_list(args.b), args.epsilon)
    w = iw.build(seq)
    rep = iw.validate(w)
    _emit({"command": "build-iso", "witness": w.to_json(), "report": rep}, args.output)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_build_twisted(args) -> int:
    seq = derive_twisted(_int_list(args.a), _int_list(args.b))
    w = tw.build_twisted(seq)
    rep = tw.validate_twisted(w)
    _emit({"command": "build-twisted", "witness": w.to_json(), "report": rep}, args.output)
    return EXIT_OK if rep.ok else EXIT_FAIL


def _unwrap(path: str):
    data = _read(path)
    if "witness" in data:
        data = data["witness"]
    try:
        if data.get("twisted") or data.get("kind") == "twisted":
            return tw.TwistedWitness.from_json(data)
        return iw.IsoWitness.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: not a witness document ({exc})") from exc


def cmd_validate(args) -> int:
    w = _unwrap(args.file)
    rep = tw.validate_twisted(w) if isinstance(w, tw.TwistedWitness) else iw.validate(w)
    _emit({"command": "validate", "report": rep}, args.output)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_normalize(args) -> int:
    w = _unwrap(args.file)
    try:
        if isinstance(w, tw.TwistedWitness):
            wn = tw.normalize_twisted(w)
            bad = tw.table_mismatches(wn)
        else:
            wn = iw.normalize(w)
            bad = iw.table_mismatches(wn)
    except iw.WitnessError as exc:
        _emit({"command": "normalize", "ok": False, "error": str(exc)}, args.output)
        return EXIT_FAIL
    _emit({"command": "normalize", "ok": not bad, "witness": wn.to_json(),
           "table_mismatches": [list(map(str, m)) for m in bad]}, args.output)
    return EXIT_OK if not bad else EXIT_FAIL


def cmd_transport(args) -> int:
    w1, w2 = _unwrap(args.file1), _unwrap(args.file2)
    if type(w1) is not type(w2):
        raise UsageError("both files must hold the same kind of witness")
    try:
        if isinstance(w1, tw.TwistedWitness):
            gamma = tw.transport_twisted(w1, w2)
            rep = tw.check_transport_twisted(w1, w2, gamma)
        else:
            gamma = iw.transport(w1, w2)
            rep = iw.check_transport(w1, w2, gamma)
    except iw.WitnessError as exc:
        _emit({"command": "transport", "ok": False, "error": str(exc)}, args.output)
        return EXIT_FAIL
    _emit({"command": "transport", "ok": rep.ok, "gamma": gamma, "det": gamma.det(),
           "report": rep}, args.output)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_isotropy(args) -> int:
    w = _unwrap(args.file)
    if isinstance(w, tw.TwistedWitness):
        res = tw.isotropy_twisted(tw.normalizable(w)[0])
    else:
        res = iw.isotropy(w)
    ok = res.report.ok and len(res.elements) == 2 ** res.shape.rank
    _emit({"command": "isotropy", "ok": ok, **res.to_json()}, args.output)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sl_refine(args) -> int:
    w = _unwrap(args.file)
    if not isinstance(w, tw.TwistedWitness):
        raise UsageError("sl-refine needs a bilinear form witness")
    ref = _unwrap(args.reference) if args.reference else None
    out = tw.sl_refinement(w, ref)
    rep = out.pop("det_check")
    _emit({"command": "sl-refine", "ok": rep.ok, **out, "report": rep}, args.output)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_component(args) -> int:
    w = _unwrap(args.file)
    if isinstance(w, tw.TwistedWitness):
        raise UsageError("component needs an isometry witness")
    try:
        out = iw.isotropic_component(iw.normalize(w) if w.normalized is None else w)
    except iw.WitnessError as exc:
        raise UsageError(str(exc)) from exc
    _emit({"command": "component", "ok": True, **out}, args.output)
    return EXIT_OK


def cmd_weyl_verify(args) -> int:
    report = verify_table(args.type, seed=args.seed, budget=args.budget,
                          exhaustive=True if args.exhaustive else None, workers=worker_count())
    _emit({"command": "weyl verify-table", **report.to_json()}, args.output)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_weyl_find(args) -> int:
    system = build_weyl(args.type)
    target = parse_factors(args.factors)
    try:
        res = find_elliptic_rep(system, target, budget=args.budget, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    doc = {"command": "weyl find", "type": system.label, "found": res.found,
           "samples": res.samples, "steps": res.steps, "certified_minimal": res.certified}
    if res.found:
        doc["element"] = res.element.to_json()
        doc["fingerprint"] = list(res.element.trace_powers())
    _emit(doc, args.output)
    return EXIT_OK if res.found else EXIT_FAIL


def cmd_selftest(args) -> int:
    report = run_selftest(args.max_dim, args.seed)
    _emit(report, args.output)
    return EXIT_OK if report["ok"] else EXIT_FAIL


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weylwit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
        p.set_defaults(func=func)
        return p

    p = add("build-iso", cmd_build_iso, "build the canonical isometry witness")
    p.add_argument("--a", default="", help="comma separated a-sequence")
    p.add_argument("--b", default="", help="comma separated b-sequence")
    p.add_argument("--epsilon", type=int, choices=(1, -1), default=None)
    p = add("build-twisted", cmd_build_twisted, "build the canonical bilinear form witness")
    p.add_argument("--a", default="")
    p.add_argument("--b", default="")
    for name, func, text in (("validate", cmd_validate, "check a witness file"),
                             ("normalize", cmd_normalize, "normalize the lines of a witness"),
                             ("isotropy", cmd_isotropy, "stabilizer of a witness"),
                             ("component", cmd_component, "component label of the isotropic subspace")):
        add(name, func, text).add_argument("file")
    p = add("sl-refine", cmd_sl_refine, "determinant refinement for bilinear forms")
    p.add_argument("file")
    p.add_argument("--reference", help="reference witness (default: the canonical build)")
    p = add("transport", cmd_transport, "element carrying one witness to another")
    p.add_argument("file1")
    p.add_argument("file2")
    p = add("selftest", cmd_selftest, "run the property sweeps")
    p.add_argument("--max-dim", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)

    weyl = sub.add_parser("weyl", help="Weyl group tables")
    wsub = weyl.add_subparsers(dest="weyl_command", required=True)
    p = wsub.add_parser("verify-table", help="verify the embedded elliptic class table")
    p.add_argument("--type", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**8)
    p.add_argument("--exhaustive", action="store_true", help="also enumerate all classes")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_weyl_verify)
    p = wsub.add_parser("find", help="search for an element with given characteristic polynomial")
    p.add_argument("--type", required=True)
    p.add_argument("--factors", required=True, help="e.g. Phi6^4 or 2^2*14")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**7)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_weyl_find)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except IOFailure as exc:
        print(f"weylwit: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, SequenceError, UnsupportedType) as exc:
        print(f"weylwit: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
