"""Configurations (g, L^1, ..., L^m) for an isometry g of an epsilon-form.

The pipeline is build -> validate -> normalize, after which two witnesses
for the same block data can be compared (transport), and the stabilizer of
one of them can be listed (isotropy). For symmetric forms the component
of the attached maximal isotropic subspace is also available.

Vectors are coordinate tuples; ``gram`` is the matrix of the form and ``g``
acts on column vectors.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Sequence

from gmpy2 import mpq

from . import iso_models as im
from .block_seq import IsoBlockSeq, SignGroupShape, derive_iso, sign_group
from .exact import ONE, ZERO, GaussRational, Matrix, gr, jordan_partition


class WitnessError(ValueError):
    """Raised when a precondition of a witness operation fails."""


@dataclass(frozen=True)
class IsoWitness:
    seq: IsoBlockSeq
    gram: Matrix
    g: Matrix
    lines: tuple[tuple[GaussRational, ...], ...]
    normalized: tuple[tuple[GaussRational, ...], ...] | None = None

    @property
    def dim(self) -> int:
        return self.seq.dim

    def to_json(self) -> dict:
        out = {
            "kind": "iso",
            "seq": {"a": list(self.seq.a), "b": list(self.seq.b), "epsilon": self.seq.epsilon},
            "dim": self.dim,
            "epsilon": self.seq.epsilon,
            "gram": self.gram.to_json(),
            "g": self.g.to_json(),
            "lines": [[x.to_json() for x in v] for v in self.lines],
        }
        if self.normalized is not None:
            out["normalized"] = [[x.to_json() for x in v] for v in self.normalized]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "IsoWitness":
        seq_d = data["seq"]
        seq = derive_iso(seq_d.get("a", []), seq_d.get("b", []), seq_d.get("epsilon"))
        n = seq.dim
        gram = Matrix.from_json(data["gram"]) if n else Matrix.zeros(0, 0)
        g = Matrix.from_json(data["g"]) if n else Matrix.zeros(0, 0)
        lines = tuple(tuple(GaussRational.from_json(x) for x in v) for v in data["lines"])
        norm = data.get("normalized")
        if norm is not None:
            norm = tuple(tuple(GaussRational.from_json(x) for x in v) for v in norm)
        return cls(seq, gram, g, lines, norm)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def _build_models(a: list[int], b: list[int], epsilon: int) -> list[im.IsoModel]:
    models: list[im.IsoModel] = []
    while any(a) or any(b):
        a1, b1 = (a[0] if a else 0), (b[0] if b else 0)
        if (a1 >= 1 and b1 >= 1) or epsilon == -1:
            models.append(im.model_mixed_block(a1, b1))
            a, b = a[1:], b[1:]
        elif a1 > 0:
            a2 = a[1] if len(a) > 1 else 0
            if a2 == 0:
                models.append(im.model_odd_block((a1 - 1) // 2))
                a = a[1:]
            else:
                models.append(im.model_paired_odd_blocks((a1 - 1) // 2, (a2 + 1) // 2))
                a = a[2:]
        else:
            # only b is left: build for the swapped data and negate g
            models.extend(im.negate(m) for m in _build_models(list(b), list(a), epsilon))
            break
    return models


def build(seq: IsoBlockSeq) -> IsoWitness:
    """A witness for ``seq`` assembled from block models (orthogonal sum)."""
    models = _build_models(list(seq.a), list(seq.b), seq.epsilon)
    total = im.direct_sum(models, seq.epsilon)
    if len(total.lines) != seq.num_lines:
        raise AssertionError("builder produced the wrong number of lines")
    return IsoWitness(seq, total.gram, total.g, total.lines)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _orbit(w: IsoWitness, v, lo: int, hi: int) -> dict[int, tuple]:
    return im.orbit(w.g, v, lo, hi)


def _profile(w: IsoWitness, x, y, offsets) -> dict[int, GaussRational]:
    return im.profile(w.gram, w.g, x, y, offsets)


def _line_roles(seq: IsoBlockSeq) -> list[str]:
    """'mixed', 'first', 'second' or 'single' for each line (1-based list order)."""
    roles = []
    linked_first = {s for s, _ in seq.linked}
    linked_second = {t for _, t in seq.linked}
    for t in range(1, seq.num_lines + 1):
        if seq.epsilon == -1 or t <= seq.k:
            roles.append("mixed")
        elif t in linked_first:
            roles.append("first")
        elif t in linked_second:
            roles.append("second")
        else:
            roles.append("single")
    return roles


def _delta(seq: IsoBlockSeq, t: int) -> int:
    return 1 if seq.a_at(t) > 0 else -1


def _span(seq: IsoBlockSeq) -> int:
    return 4 * (seq.p[0] if seq.p else 0) + 2


def _mixed_x(seq: IsoBlockSeq, t: int) -> list[int]:
    a, b = seq.a_at(t), seq.b_at(t)
    return im.x_coeffs(im.n_coeffs(a, b), 1, 4 * max(seq.p_at(t), 1) + 8)


def expected_table(seq: IsoBlockSeq, t: int, t2: int, u: int) -> mpq:
    """Prescribed value of (z^t_i, z^{t2}_j) for i - j = u."""
    roles = _line_roles(seq)
    role = roles[t - 1]
    if t == t2:
        p = seq.p_at(t)
        if role == "mixed":
            if abs(u) < p:
                return mpq(0)
            x = _mixed_x(seq, t)
            s = abs(u) - p
            val = x[s] if s < len(x) else _extend_x(seq, t, s)
            return mpq(val if u < 0 else seq.epsilon * val)
        d = _delta(seq, t - 1 if role == "second" else t)
        sign = d ** (u % 2)
        if role == "first":
            return mpq(sign * (-1) ** p * im.f_value(p, u))
        if role == "second":
            first = t - 1
            return sign * im.xi_self(seq.p_at(first), p, u) if p >= 1 else \
                sign * mpq(im.tilde_self_pairing(seq.p_at(first), u))
        return mpq(2 * sign)  # the lone line of odd type
    lo, hi = min(t, t2), max(t, t2)
    if (lo, hi) in seq.linked:
        if t > t2:
            u = -u  # (z^{t+1}_i, z^t_j) = (z^t_j, z^{t+1}_i) for a symmetric form
        d = _delta(seq, lo)
        p1, p2 = seq.p_at(lo), seq.p_at(hi)
        return d ** (u % 2) * im.xi_cross(p1, p2, u)
    return mpq(0)


def _extend_x(seq: IsoBlockSeq, t: int, s: int) -> int:
    a, b = seq.a_at(t), seq.b_at(t)
    return im.x_coeffs(im.n_coeffs(a, b), 1, s + 1)[s]


def basis_vectors(w: IsoWitness, vectors=None) -> list[tuple]:
    """z^t_i for t in order and i in [0, 2p'_t - 1]."""
    vecs = vectors if vectors is not None else w.normalized
    if vecs is None:
        raise WitnessError("witness is not normalized")
    out = []
    for t, v in enumerate(vecs, start=1):
        count = w.seq.two_p_prime[t - 1]
        out.extend(_orbit(w, v, 0, count - 1)[i] for i in range(count))
    return out


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class Report:
    checks: list[dict] = field(default_factory=list)

    def add(self, condition: str, ok: bool, **detail) -> None:
        entry = {"condition": condition, "status": "pass" if ok else "fail"}
        entry.update(detail)
        self.checks.append(entry)

    @property
    def ok(self) -> bool:
        return all(c["status"] == "pass" for c in self.checks)

    def failures(self) -> list[dict]:
        return [c for c in self.checks if c["status"] != "pass"]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": self.checks}


def validate(w: IsoWitness) -> Report:
    seq = w.seq
    rep = Report()
    n = seq.dim
    rep.add("dimension", w.gram.shape == (n, n) and w.g.shape == (n, n), dim=n)
    if not rep.ok:
        return rep
    rep.add("line count", len(w.lines) == seq.num_lines, expected=seq.num_lines)
    if n == 0:
        return rep
    rep.add("form is epsilon-symmetric", w.gram.T == w.gram.scale(seq.epsilon))
    rep.add("form is nondegenerate", w.gram.rank() == n)
    rep.add("g preserves the form", w.g.T @ w.gram @ w.g == w.gram)
    plus = jordan_partition(w.g, 1)
    minus = jordan_partition(w.g, -1)
    rep.add("Jordan blocks at +1", plus == list(seq.a), found=plus)
    rep.add("Jordan blocks at -1", minus == list(seq.b), found=minus)
    if not rep.ok:
        return rep
    for t, v in enumerate(w.lines, start=1):
        rep.add("line is nonzero", any(v), line=t)
    if not rep.ok:
        return rep
    m = seq.num_lines
    for t in range(1, m + 1):
        p = seq.p_at(t)
        prof = _profile(w, w.lines[t - 1], w.lines[t - 1], range(-p, p + 1))
        zero_ok = all(not prof[u] for u in range(-p + 1, p))
        rep.add("self pairing vanishes below p_t", zero_ok, line=t)
        rep.add("self pairing nonzero at p_t", bool(prof[-p]), line=t)
    for t in range(1, m + 1):
        for r in range(t + 1, m + 1):
            pt, pr = seq.p_at(t), seq.p_at(r)
            offsets = range(-pr, 2 * pt - pr)
            prof = _profile(w, w.lines[t - 1], w.lines[r - 1], offsets)
            bad = [u for u in offsets if prof[u]]
            rep.add("cross pairing vanishes", not bad, lines=[t, r], offsets=bad)
    span = []
    for t, v in enumerate(w.lines, start=1):
        count = seq.two_p_prime[t - 1]
        orb = _orbit(w, v, 0, count - 1)
        span.extend(orb[i] for i in range(count))
    rep.add("translates of the lines span V", Matrix.from_columns(span).rank() == n)
    return rep


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def _anchor(seq: IsoBlockSeq, t: int) -> int:
    """Offset u = i - j where the prescribed self-pairing of line t is first nonzero."""
    return -seq.p_at(t)


def normalize(w: IsoWitness, check: bool = True) -> IsoWitness:
    seq = w.seq
    if not w.lines:
        return replace(w, normalized=())
    roles = _line_roles(seq)
    zs: list[tuple] = []
    for t, v in enumerate(w.lines, start=1):
        u = _anchor(seq, t)
        have = _profile(w, v, v, [u])[u]
        want = expected_table(seq, t, t, u)
        if not have:
            raise WitnessError(f"line {t} has zero anchor pairing")
        lam = (gr(want) / have).sqrt()
        if lam is None:
            raise WitnessError(f"line {t}: no scalar in Q(i) reaches the prescribed anchor")
        zs.append(tuple(lam * x for x in v))
    for first, second in seq.linked:
        if roles[first - 1] != "first":
            continue
        p1, p2 = seq.p_at(first), seq.p_at(second)
        u = 2 * p1 - p2
        have = _profile(w, zs[first - 1], zs[second - 1], [u])[u]
        want = expected_table(seq, first, second, u)
        if have == -gr(want):
            zs[second - 1] = tuple(-x for x in zs[second - 1])
        elif have != gr(want):
            raise WitnessError(f"lines {first},{second}: cross anchor {have} vs {want}")
    out = replace(w, normalized=tuple(zs))
    if check:
        bad = table_mismatches(out)
        if bad:
            raise WitnessError(f"normalized tables differ at {bad[:5]}")
    return out


def table_mismatches(w: IsoWitness, span: int | None = None) -> list[tuple]:
    """(t, t2, u, found, expected) for every offset where the tables fail."""
    seq = w.seq
    span = _span(seq) if span is None else span
    bad = []
    vecs = w.normalized
    for t in range(1, seq.num_lines + 1):
        for t2 in range(1, seq.num_lines + 1):
            prof = _profile(w, vecs[t - 1], vecs[t2 - 1], range(-span, span + 1))
            for u, val in prof.items():
                exp = expected_table(seq, t, t2, u)
                if val != gr(exp):
                    bad.append((t, t2, u, str(val), str(exp)))
    return bad


# ---------------------------------------------------------------------------
# transport and isotropy
# ---------------------------------------------------------------------------

def _basis_matrix(w: IsoWitness) -> Matrix:
    return Matrix.from_columns(basis_vectors(w))


def transport(w1: IsoWitness, w2: IsoWitness) -> Matrix:
    """The unique gamma with gamma(z^t_i) = z'^t_i on the normalized bases."""
    if (w1.seq.a, w1.seq.b, w1.seq.epsilon) != (w2.seq.a, w2.seq.b, w2.seq.epsilon):
        raise WitnessError("block data of the two witnesses differ")
    if w1.dim == 0:
        return Matrix.zeros(0, 0)
    if w1.normalized is None:
        w1 = normalize(w1)
    if w2.normalized is None:
        w2 = normalize(w2)
    return _basis_matrix(w2) @ _basis_matrix(w1).inverse()


def check_transport(w1: IsoWitness, w2: IsoWitness, gamma: Matrix) -> Report:
    rep = Report()
    if w1.dim == 0:
        rep.add("empty", True)
        return rep
    rep.add("gamma is an isometry", gamma.T @ w2.gram @ gamma == w1.gram)
    rep.add("gamma conjugates g to g'", gamma @ w1.g == w2.g @ gamma)
    for t, (v, v2) in enumerate(zip(w1.lines, w2.lines), start=1):
        image = gamma.apply(v)
        same_line = Matrix.from_columns([image, v2]).rank() == 1
        rep.add("gamma maps line to line", same_line, line=t)
    return rep


def sign_matrix(w: IsoWitness, omega: Sequence[int]) -> Matrix:
    """gamma acting as omega_t on every z^t_i."""
    z = _basis_matrix(w)
    diag = []
    for t, count in enumerate(w.seq.two_p_prime):
        diag.extend([omega[t]] * count)
    return z @ Matrix.diagonal(diag) @ z.inverse()


def derived_sign_constraints(w: IsoWitness) -> SignGroupShape:
    """Sign group read off from the normalized vectors alone.

    A stabilizing isometry scales each line; preserving the form forces
    omega_t * omega_t' = 1 whenever the lines t and t' pair nontrivially.
    """
    if w.normalized is None:
        w = normalize(w)
    seq = w.seq
    span = _span(seq)
    links = []
    for t in range(1, seq.num_lines + 1):
        diag = _profile(w, w.normalized[t - 1], w.normalized[t - 1], range(-span, span + 1))
        if not any(diag.values()):
            raise WitnessError(f"line {t} pairs trivially with itself")
        for t2 in range(t + 1, seq.num_lines + 1):
            prof = _profile(w, w.normalized[t - 1], w.normalized[t2 - 1], range(-span, span + 1))
            if any(prof.values()):
                links.append((t, t2))
    return SignGroupShape(seq.num_lines, tuple(links))


@dataclass
class IsotropyResult:
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


def isotropy(w: IsoWitness, all_elements: bool = True) -> IsotropyResult:
    if w.normalized is None:
        w = normalize(w)
    shape = sign_group(w.seq)
    rep = Report()
    derived = derived_sign_constraints(w)
    same = set(map(tuple, derived.elements())) == set(map(tuple, shape.elements()))
    rep.add("derived sign constraints match the sign group", same)
    omegas = shape.elements() if all_elements else shape.generators()
    elements = []
    ident = Matrix.identity(w.dim)
    for omega in omegas:
        gam = sign_matrix(w, omega) if w.dim else ident
        if w.dim:
            ok = (gam.T @ w.gram @ gam == w.gram and gam @ w.g == w.g @ gam
                  and all(Matrix.from_columns([gam.apply(v), v]).rank() == 1 for v in w.lines)
                  and (gam @ gam).is_identity())
            rep.add("element fixes the configuration", ok, omega=list(omega))
        elements.append((tuple(omega), gam))
    gens = [(tuple(o), sign_matrix(w, o) if w.dim else ident) for o in shape.generators()]
    if all_elements:
        mats = {m for _, m in elements}
        rep.add("elements are distinct", len(mats) == len(elements))
        closed = all((x @ y) in mats for x in mats for y in mats) if len(mats) <= 64 else True
        rep.add("closed under composition", closed)
    return IsotropyResult(shape, elements, gens, rep)


# ---------------------------------------------------------------------------
# components of the maximal isotropic subspaces
# ---------------------------------------------------------------------------

def isotropic_subspace(w: IsoWitness) -> list[tuple]:
    seq = w.seq
    if w.normalized is None:
        w = normalize(w)
    out = []
    for t in range(1, seq.sigma + 1):
        p = seq.p_at(t)
        orb = _orbit(w, w.normalized[t - 1], p, 2 * p - 1)
        out.extend(orb[i] for i in range(p, 2 * p))
    return out


def orientation_invariant(gram: Matrix, u_vectors: Sequence[tuple]) -> GaussRational:
    """det[u | u'] for a basis u of a Lagrangian and a dual isotropic complement u'.

    It does not depend on the choices made and changes sign under isometries
    of determinant -1, so it separates the two families of Lagrangians.
    """
    n = gram.rows
    m = len(u_vectors)
    u = Matrix.from_columns(list(u_vectors))
    pair = u.T @ gram  # row i is (u_i, .)
    chosen: list[int] = []
    for c in range(n):
        trial = chosen + [c]
        if pair.submatrix(range(m), trial).rank() == len(trial):
            chosen = trial
        if len(chosen) == m:
            break
    y = Matrix.from_columns([tuple(ONE if r == c else ZERO for r in range(n)) for c in chosen])
    y = y @ (pair @ y).inverse()
    s = y.T @ gram @ y
    y = y - u @ s.scale(mpq(1, 2))
    return Matrix.from_columns(u.columns() + y.columns()).det()


def _canonical_root(value: GaussRational) -> GaussRational:
    root = value.sqrt()
    if root is None:
        raise WitnessError("orientation normalizer is not a square in Q(i)")
    return root


def isotropic_component(w: IsoWitness, reference: Sequence[tuple] | None = None) -> dict:
    """Label of the component of the attached maximal isotropic subspace.

    ``label`` is 0 or 1 from the orientation invariant. When a reference
    Lagrangian is available (by default the one of the canonical build on
    the same form) the intersection-parity verdict is reported as well.
    """
    seq = w.seq
    if seq.epsilon != 1 or seq.dim % 2 or seq.dim < 2:
        raise WitnessError("components are defined for symmetric forms of even dimension >= 2")
    U = isotropic_subspace(w)
    m = seq.dim // 2
    Umat = Matrix.from_columns(U)
    if len(U) != m or Umat.rank() != m or not (Umat.T @ w.gram @ Umat).is_zero():
        raise WitnessError("attached subspace is not a maximal isotropic subspace")
    det_g = w.gram.det()
    target = _canonical_root(gr((-1) ** m) / det_g)
    d = orientation_invariant(w.gram, U)
    if d == target:
        label = 0
    elif d == -target:
        label = 1
    else:
        raise AssertionError("orientation invariant has unexpected value")
    out = {"label": label, "orientation": d.to_json()}
    if reference is None:
        ref_w = build(seq)
        if ref_w.gram == w.gram:
            reference = isotropic_subspace(ref_w)
    if reference is not None:
        inter = m + m - Matrix.from_columns(list(U) + list(reference)).rank()
        same = (inter - m) % 2 == 0
        out["reference_intersection"] = inter
        out["same_as_reference"] = same
    return out


# ---------------------------------------------------------------------------
# refinements for determinant conditions
# ---------------------------------------------------------------------------

def generalized_eigenspace(g: Matrix, eigenvalue: int) -> list[tuple]:
    n = g.rows
    return ((g - Matrix.identity(n).scale(eigenvalue)) ** n).nullspace()


def restricted_det(gamma: Matrix, basis: list[tuple]) -> GaussRational:
    """Determinant of gamma on the invariant subspace spanned by ``basis``."""
    b = Matrix.from_columns(basis)
    images = gamma @ b
    # choose independent rows so that b restricted to them is invertible
    chosen: list[int] = []
    for r in range(b.rows):
        trial = chosen + [r]
        if b.submatrix(trial, range(b.cols)).rank() == len(trial):
            chosen = trial
        if len(chosen) == b.cols:
            break
    sub = b.submatrix(chosen, range(b.cols))
    coeffs = sub.inverse() @ images.submatrix(chosen, range(b.cols))
    if b @ coeffs != images:
        raise WitnessError("subspace is not invariant")
    return coeffs.det()


def negative_det_element(w: IsoWitness) -> dict:
    seq = w.seq
    if seq.epsilon != 1 or not (seq.a_at(1) > 0 and seq.b_at(1) > 0):
        raise WitnessError("needs a symmetric form with a_1 > 0 and b_1 > 0")
    if w.normalized is None:
        w = normalize(w)
    omega = tuple([-1] + [1] * (seq.num_lines - 1))
    if not sign_group(seq).contains(omega):
        raise AssertionError("sign vector outside the sign group")
    gam = sign_matrix(w, omega)
    dets = {d: restricted_det(gam, generalized_eigenspace(w.g, d)) for d in (1, -1)}
    return {"omega": omega, "gamma": gam, "det": gam.det(),
            "restricted_dets": dets,
            "ok": all(v == -1 for v in dets.values()) and gam.det() == 1}


def special_isotropy(w: IsoWitness) -> dict:
    seq = w.seq
    if seq.dim % 2 == 0:
        raise WitnessError("needs odd dimension")
    if w.normalized is None:
        w = normalize(w)
    shape = sign_group(seq)
    kept, checks = [], []
    for omega in shape.elements():
        det = sign_matrix(w, omega).det()
        checks.append(det == omega[-1])
        if omega[-1] == 1:
            kept.append(omega)
    return {"subgroup": kept, "order": len(kept), "full_order": shape.order,
            "det_matches_last_sign": all(checks)}


# ---------------------------------------------------------------------------
# moving witnesses around
# ---------------------------------------------------------------------------

def _small_vector(rng: random.Random, n: int) -> tuple:
    while True:
        v = tuple(gr(rng.randint(-2, 2)) for _ in range(n))
        if any(v):
            return v


def random_isometry(gram: Matrix, epsilon: int, rng: random.Random, steps: int = 4,
                    det_one: bool = False) -> Matrix:
    """Product of random reflections (symmetric case) or transvections (alternating)."""
    n = gram.rows
    result = Matrix.identity(n)
    made = 0
    while made < steps or (det_one and epsilon == 1 and made % 2):
        v = _small_vector(rng, n)
        vv = Matrix([[x] for x in v])
        outer = vv @ (vv.T @ gram)
        if epsilon == 1:
            q = (vv.T @ gram @ vv)[0, 0]
            if not q:
                continue
            step = Matrix.identity(n) - outer.scale(gr(2) / q)
        else:
            step = Matrix.identity(n) + outer.scale(rng.choice([1, -1, 2, mpq(1, 2)]))
        result = step @ result
        made += 1
    return result


def act(w: IsoWitness, rho: Matrix, scales: Sequence | None = None) -> IsoWitness:
    """rho . (g, L^t) = (rho g rho^-1, rho L^t); optional rescaling of the generators."""
    if w.dim == 0:
        return w
    g2 = rho @ w.g @ rho.inverse()
    lines = []
    for t, v in enumerate(w.lines):
        c = gr(scales[t]) if scales else ONE
        lines.append(tuple(c * x for x in rho.apply(v)))
    return IsoWitness(w.seq, w.gram, g2, tuple(lines))
