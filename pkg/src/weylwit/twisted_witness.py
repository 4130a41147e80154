"""Configurations (g, L^1, ..., L^sigma) with g: V -> V* a bilinear form.

Same pipeline as for isometries: build, validate, normalize, then transport
and isotropy. On top of that, ``sl_refinement`` reports how the orbit of g
splits under SL(V) once g is rescaled so that its top exterior power maps
the coordinate volume form to its dual.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Sequence

from gmpy2 import mpq

from . import twisted_models as tm
from .block_seq import SignGroupShape, TwistedBlockSeq, derive_twisted, sign_group
from .exact import ONE, ZERO, GaussRational, Matrix, gr, jordan_partition, nth_roots
from .iso_witness import Report, WitnessError


@dataclass(frozen=True)
class TwistedWitness:
    seq: TwistedBlockSeq
    space: tm.TwistedSpace
    lines: tuple[tuple[GaussRational, ...], ...]
    normalized: tuple[tuple[GaussRational, ...], ...] | None = None

    @property
    def dim(self) -> int:
        return self.seq.n

    @property
    def form(self) -> Matrix:
        return self.space.form

    def to_json(self) -> dict:
        out = {
            "kind": "twisted",
            "twisted": True,
            "seq": {"a": list(self.seq.a), "b": list(self.seq.b)},
            "dim": self.dim,
            "g": self.form.to_json(),
            "dual_pairing": self.space.dual_pairing.to_json(),
            "lines": [[x.to_json() for x in v] for v in self.lines],
        }
        if self.normalized is not None:
            out["normalized"] = [[x.to_json() for x in v] for v in self.normalized]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TwistedWitness":
        seq = derive_twisted(data["seq"].get("a", []), data["seq"].get("b", []))
        form = Matrix.from_json(data["g"]) if seq.n else Matrix.zeros(0, 0)
        lines = tuple(tuple(GaussRational.from_json(x) for x in v) for v in data["lines"])
        norm = data.get("normalized")
        if norm is not None:
            norm = tuple(tuple(GaussRational.from_json(x) for x in v) for v in norm)
        return cls(seq, tm.TwistedSpace(form), lines, norm)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def build_twisted(seq: TwistedBlockSeq) -> TwistedWitness:
    a, b = list(seq.a), list(seq.b)
    models = []
    while a or b:
        a1 = a[0] if a else 0
        b1 = b[0] if b else 0
        if a1 >= 1:
            models.append(tm.model_single_twisted(a1, b1))
            a, b = a[1:], b[1:]
        else:
            b2 = b[1] if len(b) > 1 else 0
            models.append(tm.model_paired_even_twisted(b1 // 2, (b2 + 2) // 2))
            b = b[2:]
    total = tm.twisted_direct_sum(models)
    if len(total.lines) != seq.sigma:
        raise AssertionError("builder produced the wrong number of lines")
    return TwistedWitness(seq, total.space, total.lines)


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

def _roles(seq: TwistedBlockSeq) -> list[str]:
    first = {s for s, _ in seq.linked}
    second = {t for _, t in seq.linked}
    out = []
    for t in range(1, seq.sigma + 1):
        if t in first:
            out.append("first")
        elif t in second:
            out.append("second")
        else:
            out.append("single")
    return out


def expected_table(seq: TwistedBlockSeq, t: int, t2: int, h: int) -> mpq:
    """Prescribed (z^t_0, z^{t2}_h) for odd h."""
    roles = _roles(seq)
    if t == t2:
        role = roles[t - 1]
        if role == "single":
            return mpq(tm.x_prime(seq.a_at(t), seq.b_at(t), h))
        if role == "first":
            return mpq(tm.phi_value(seq.p_at(t), h))
        return mpq(tm.xi_self2(seq.p_at(t - 1), seq.p_at(t), h))
    lo, hi = min(t, t2), max(t, t2)
    if (lo, hi) not in seq.linked:
        return mpq(0)
    p1, p2 = seq.p_at(lo), seq.p_at(hi)
    # (z^{t+1}_0, z^t_h) is the xi-profile; the other order reflects h
    return tm.xi_cross2(p1, p2, h if t == hi else -h)


def _span(seq: TwistedBlockSeq) -> int:
    top = 4 * (seq.p[0] if seq.p else 1) + 3
    return top if top % 2 else top + 1


def basis_vectors(w: TwistedWitness, vectors=None) -> list[tuple]:
    """z^t_i for i in [0, 4p_t - 4]'' (all t, in order)."""
    vecs = w.normalized if vectors is None else vectors
    if vecs is None:
        raise WitnessError("witness is not normalized")
    out = []
    for t, v in enumerate(vecs, start=1):
        out.extend(w.space.even_orbit(v, 2 * w.seq.p_at(t) - 1))
    return out


# ---------------------------------------------------------------------------
# validation and normalization
# ---------------------------------------------------------------------------

def validate_twisted(w: TwistedWitness) -> Report:
    seq, rep = w.seq, Report()
    n = seq.n
    rep.add("dimension", w.form.shape == (n, n), dim=n)
    rep.add("line count", len(w.lines) == seq.sigma, expected=seq.sigma)
    if not rep.ok or n == 0:
        return rep
    rep.add("g is invertible", w.form.rank() == n)
    if not rep.ok:
        return rep
    s = w.space.star_square
    ident = Matrix.identity(n)
    rep.add("g^{*4} is unipotent", ((s @ s - ident) ** n).is_zero())
    plus, minus = jordan_partition(s, 1), jordan_partition(s, -1)
    rep.add("Jordan blocks of g^{*2} at +1", plus == list(seq.a), found=plus)
    rep.add("Jordan blocks of -g^{*2} at +1", minus == list(seq.b), found=minus)
    for t, v in enumerate(w.lines, start=1):
        rep.add("line is nonzero", any(v), line=t)
    if not rep.ok:
        return rep
    for t in range(1, seq.sigma + 1):
        p = seq.p_at(t)
        z = w.lines[t - 1]
        prof = w.space.profile(z, z, tm.odd_range(-(2 * p - 1), 2 * p - 1))
        inner = [h for h in tm.odd_range(-(2 * p - 3), 2 * p - 3) if prof[h]]
        rep.add("self pairing vanishes inside the window", not inner, line=t, offsets=inner)
        rep.add("self pairing nonzero at the edge", bool(prof[2 * p - 1]) and bool(prof[-(2 * p - 1)]),
                line=t)
    for t in range(1, seq.sigma + 1):
        for r in range(t + 1, seq.sigma + 1):
            pt, pr = seq.p_at(t), seq.p_at(r)
            window = tm.odd_range(1 - 2 * pr, 4 * pt - 2 * pr - 3)
            prof = w.space.profile(w.lines[r - 1], w.lines[t - 1], window)
            bad = [h for h in window if prof[h]]
            rep.add("cross pairing vanishes", not bad, lines=[r, t], offsets=bad)
    span = basis_vectors(w, w.lines)
    rep.add("even translates of the lines span V", Matrix.from_columns(span).rank() == n)
    return rep


def normalize_twisted(w: TwistedWitness, check: bool = True) -> TwistedWitness:
    seq = w.seq
    zs = []
    for t, v in enumerate(w.lines, start=1):
        h = 2 * seq.p_at(t) - 1
        have = w.space.profile(v, v, [h])[h]
        if not have:
            raise WitnessError(f"line {t} has zero edge pairing")
        lam = (ONE / have).sqrt()
        if lam is None:
            raise WitnessError(f"line {t}: no scalar in Q(i) normalizes the edge pairing")
        zs.append(tuple(lam * x for x in v))
    for first, second in seq.linked:
        p1, p2 = seq.p_at(first), seq.p_at(second)
        h = 4 * p1 - 2 * p2 - 1
        have = w.space.profile(zs[second - 1], zs[first - 1], [h])[h]
        want = gr(expected_table(seq, second, first, h))
        if have == -want:
            zs[second - 1] = tuple(-x for x in zs[second - 1])
        elif have != want:
            raise WitnessError(f"lines {first},{second}: cross anchor {have} vs {want}")
    out = replace(w, normalized=tuple(zs))
    if check:
        bad = table_mismatches(out)
        if bad:
            raise WitnessError(f"normalized tables differ at {bad[:5]}")
    return out


def table_mismatches(w: TwistedWitness, span: int | None = None) -> list[tuple]:
    seq = w.seq
    span = _span(seq) if span is None else span
    bad = []
    for t in range(1, seq.sigma + 1):
        for t2 in range(1, seq.sigma + 1):
            prof = w.space.profile(w.normalized[t - 1], w.normalized[t2 - 1],
                                   tm.odd_range(-span, span))
            for h, val in prof.items():
                exp = expected_table(seq, t, t2, h)
                if val != gr(exp):
                    bad.append((t, t2, h, str(val), str(exp)))
    return bad


# ---------------------------------------------------------------------------
# transport, isotropy
# ---------------------------------------------------------------------------

def _basis_matrix(w: TwistedWitness) -> Matrix:
    return Matrix.from_columns(basis_vectors(w))


def twisted_conjugate(form: Matrix, gamma: Matrix) -> Matrix:
    """Matrix of check(gamma) g gamma^{-1}."""
    inv = gamma.inverse()
    return inv.T @ form @ inv


def transport_twisted(w1: TwistedWitness, w2: TwistedWitness) -> Matrix:
    if (w1.seq.a, w1.seq.b) != (w2.seq.a, w2.seq.b):
        raise WitnessError("block data of the two witnesses differ")
    if w1.dim == 0:
        return Matrix.zeros(0, 0)
    w1 = w1 if w1.normalized is not None else normalize_twisted(w1)
    w2 = w2 if w2.normalized is not None else normalize_twisted(w2)
    return _basis_matrix(w2) @ _basis_matrix(w1).inverse()


def check_transport_twisted(w1: TwistedWitness, w2: TwistedWitness, gamma: Matrix) -> Report:
    rep = Report()
    if w1.dim == 0:
        rep.add("empty", True)
        return rep
    rep.add("gamma is invertible", gamma.rank() == w1.dim)
    rep.add("twisted conjugation takes g to g'", twisted_conjugate(w1.form, gamma) == w2.form)
    for t, (v, v2) in enumerate(zip(w1.lines, w2.lines), start=1):
        same = Matrix.from_columns([gamma.apply(v), v2]).rank() == 1
        rep.add("gamma maps line to line", same, line=t)
    return rep


def sign_matrix(w: TwistedWitness, omega: Sequence[int]) -> Matrix:
    z = _basis_matrix(w)
    diag = []
    for t in range(1, w.seq.sigma + 1):
        diag.extend([omega[t - 1]] * (2 * w.seq.p_at(t) - 1))
    return z @ Matrix.diagonal(diag) @ z.inverse()


def derived_sign_constraints(w: TwistedWitness) -> SignGroupShape:
    """omega_t = omega_t' forced by nonzero pairings between the lines."""
    w = w if w.normalized is not None else normalize_twisted(w)
    seq, span = w.seq, _span(w.seq)
    links = []
    for t in range(1, seq.sigma + 1):
        z = w.normalized[t - 1]
        if not any(w.space.profile(z, z, tm.odd_range(-span, span)).values()):
            raise WitnessError(f"line {t} pairs trivially with itself")
        for t2 in range(t + 1, seq.sigma + 1):
            y = w.normalized[t2 - 1]
            prof = w.space.profile(z, y, tm.odd_range(-span, span))
            prof2 = w.space.profile(y, z, tm.odd_range(-span, span))
            if any(prof.values()) or any(prof2.values()):
                links.append((t, t2))
    return SignGroupShape(seq.sigma, tuple(links))


@dataclass
class TwistedIsotropy:
    shape: SignGroupShape
    elements: list[tuple[tuple[int, ...], Matrix]]
    generators: list[tuple[tuple[int, ...], Matrix]]
    report: Report

    def to_json(self) -> dict:
        return {
            "sign_group": self.shape.to_json(),
            "order": len(self.elements),
            "generators": [{"omega": list(o), "matrix": m.to_json()} for o, m in self.generators],
            "report": self.report.to_json(),
        }


def isotropy_twisted(w: TwistedWitness, all_elements: bool = True) -> TwistedIsotropy:
    w = w if w.normalized is not None else normalize_twisted(w)
    shape = sign_group(w.seq)
    rep = Report()
    derived = derived_sign_constraints(w)
    rep.add("derived sign constraints match the sign group",
            set(map(tuple, derived.elements())) == set(map(tuple, shape.elements())))
    omegas = shape.elements() if all_elements else shape.generators()
    elements = []
    for omega in omegas:
        gam = sign_matrix(w, omega) if w.dim else Matrix.zeros(0, 0)
        if w.dim:
            ok = (gam.T @ w.form @ gam == w.form
                  and all(Matrix.from_columns([gam.apply(v), v]).rank() == 1 for v in w.lines))
            rep.add("element fixes the configuration", ok, omega=list(omega))
        elements.append((tuple(omega), gam))
    gens = [(tuple(o), sign_matrix(w, o)) for o in shape.generators()] if w.dim else []
    if all_elements and w.dim:
        mats = {m for _, m in elements}
        rep.add("elements are distinct", len(mats) == len(elements))
        if len(mats) <= 64:
            rep.add("closed under composition", all((x @ y) in mats for x in mats for y in mats))
    return TwistedIsotropy(shape, elements, gens, rep)


# ---------------------------------------------------------------------------
# SL refinement
# ---------------------------------------------------------------------------

def volume_scalar(form: Matrix) -> GaussRational:
    """The scalar by which the top exterior power of g sends theta to theta*."""
    return form.det()


def gamma1_rescale(w: TwistedWitness) -> tuple[TwistedWitness, GaussRational] | None:
    """Rescale g by lambda so that det(lambda M) = 1, if an n-th root exists in Q(i)."""
    if w.dim == 0:
        return w, ONE
    roots = nth_roots(ONE / volume_scalar(w.form), w.dim)
    if not roots:
        return None
    lam = roots[0]
    space = tm.TwistedSpace(w.form.scale(lam))
    return replace(w, space=space, normalized=None), lam


def normalizable(w: TwistedWitness) -> tuple[TwistedWitness, GaussRational]:
    """A normalized copy of w, with g multiplied by mu when that is needed.

    Scaling g by a constant changes neither stabilizers nor transports, but
    it multiplies every pairing by mu; a configuration whose g was rescaled
    to fix the volume form may only be normalizable after undoing that.
    """
    if w.normalized is not None or w.dim == 0:
        return w, ONE
    try:
        return normalize_twisted(w), ONE
    except WitnessError:
        h = 2 * w.seq.p_at(1) - 1
        mu = ONE / w.space.profile(w.lines[0], w.lines[0], [h])[h]
        scaled = replace(w, space=tm.TwistedSpace(w.form.scale(mu)))
        return normalize_twisted(scaled), mu


def sl_refinement(w: TwistedWitness, reference: TwistedWitness | None = None) -> dict:
    seq = w.seq
    if seq.n < 1:
        raise WitnessError("needs n >= 1")
    rep = Report()
    rep.add("det(check(g) g) = 1", w.space.star_square.det() == 1)
    a1 = seq.a_at(1)
    class_count = 1 if a1 > 0 else 2
    out: dict = {"class_count": class_count}
    wn, mu = normalizable(w)
    iso = isotropy_twisted(wn)
    if a1 > 0:
        omega = tuple([-1] + [1] * (seq.sigma - 1))
        gamma0 = sign_matrix(wn, omega)
        p1 = seq.p_at(1)
        v_first = wn.space.even_orbit(wn.normalized[0], 2 * p1 - 1)
        rest = basis_vectors(wn)[2 * p1 - 1:]
        rep.add("gamma0 fixes g", twisted_conjugate(w.form, gamma0) == w.form)
        rep.add("gamma0 has determinant -1", gamma0.det() == -1)
        rep.add("gamma0 is -1 on the first block and 1 on the rest",
                all(gamma0.apply(v) == tuple(-x for x in v) for v in v_first)
                and all(gamma0.apply(v) == tuple(v) for v in rest))
        out["gamma0"] = gamma0
    else:
        rep.add("every stabilizer element has determinant 1",
                all(m.det() == 1 for _, m in iso.elements))
    scaled = gamma1_rescale(w)
    out["rescale"] = None if scaled is None else scaled[1]
    if scaled is not None:
        rep.add("rescaled g sends theta to theta*", volume_scalar(scaled[0].form) == 1)
    if class_count == 2 and scaled is not None:
        ref = reference if reference is not None else build_twisted(seq)
        ref_scaled = gamma1_rescale(ref)
        if ref_scaled is not None:
            # gamma carries the reference to the mu-scaled copy of w; c * gamma with
            # c^2 = lam_ref * mu / lam_w relates the volume-normalized forms, n even
            gam = transport_twisted(ref, wn)
            ratio = ref_scaled[1] * mu / scaled[1]
            d = ratio ** (seq.n // 2) * gam.det()
            rep.add("transport determinant is +-1", d in (ONE, -ONE))
            out["class_label"] = 1 if d == 1 else -1
    out["det_check"] = rep
    return out


# ---------------------------------------------------------------------------
# moving witnesses around
# ---------------------------------------------------------------------------

def random_conjugator(n: int, rng: random.Random, steps: int = 6, det: int | None = 1) -> Matrix:
    """Product of random elementary matrices; det fixed to +-1, or free when det is None."""
    m = Matrix.identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        rows = [[ONE if r == c else ZERO for c in range(n)] for r in range(n)]
        if i != j:
            rows[i][j] = gr(rng.choice([-2, -1, 1, 2, mpq(1, 2)]))
        m = Matrix(rows) @ m
    if det == -1:
        m = Matrix.diagonal([-1] + [1] * (n - 1)) @ m
    elif det is None:
        m = Matrix.diagonal([rng.choice([1, 2, -3, mpq(1, 2)])] + [1] * (n - 1)) @ m
    return m


def act_twisted(w: TwistedWitness, rho: Matrix, scales: Sequence | None = None) -> TwistedWitness:
    if w.dim == 0:
        return w
    form = twisted_conjugate(w.form, rho)
    lines = []
    for t, v in enumerate(w.lines):
        c = gr(scales[t]) if scales else ONE
        lines.append(tuple(c * x for x in rho.apply(v)))
    return TwistedWitness(w.seq, tm.TwistedSpace(form), tuple(lines))
