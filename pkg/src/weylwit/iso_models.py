"""Scalar tables and explicit block models for isometries of epsilon-forms.

The building blocks are

* a *mixed block* of dimension a+b, on which g is regular with one Jordan
  block of size a at eigenvalue 1 and one of size b at eigenvalue -1;
* an *odd block* of dimension 2p+1 carrying a unipotent g with a single
  Jordan block, together with the auxiliary vector w~;
* a *paired* unipotent model with Jordan blocks 2p1+1 and 2p2-1 and the
  mixed vector xi built from w~ on each summand.

Basis vectors are numbered w_0, w_1, ... with w_i = g^i w_0, and all
vectors are coordinate tuples in that basis. Integer tables (n_e, x_e, f_p)
are plain Python ints; anything that can acquire a denominator uses mpq.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Iterable, Sequence

from gmpy2 import mpq

from .exact import I, ONE, ZERO, GaussRational, Matrix, gr, solve_in_span, vec_scale


# ---------------------------------------------------------------------------
# integer tables
# ---------------------------------------------------------------------------

def n_coeffs(a: int, b: int) -> list[int]:
    """Coefficients of (1-T)^a (1+T)^b, constant term first (length a+b+1)."""
    if a < 0 or b < 0:
        raise ValueError("a and b must be nonnegative")
    out = [0] * (a + b + 1)
    for i in range(a + 1):
        ci = (-1) ** i * comb(a, i)
        for j in range(b + 1):
            out[i + j] += ci * comb(b, j)
    return out


def x_coeffs(n_seq: Sequence[int], x0: int, length: int, start: int = 1,
             given: Sequence[int] = ()) -> list[int]:
    """Solve n_0 x_e + n_1 x_{e-1} + ... + n_e x_0 = 0 for e >= start.

    Terms x_1 .. x_{start-1} are taken from ``given``. The leading coefficient
    must be a unit so that the recurrence stays integral.
    """
    if not n_seq or n_seq[0] not in (1, -1):
        raise ValueError("leading coefficient of n must be +1 or -1")
    xs = [x0] + list(given)[: max(0, start - 1)]
    if len(xs) < start:
        raise ValueError("not enough initial terms supplied")
    n0 = n_seq[0]
    for e in range(start, length):
        acc = sum(n_seq[j] * xs[e - j] for j in range(1, min(e, len(n_seq) - 1) + 1))
        xs.append(-acc * n0)
    return xs[:length]


def odd_n(p: int) -> list[int]:
    """n_e = (-1)^e binom(2p+1, e), the coefficients of (1-T)^(2p+1)."""
    return [(-1) ** e * comb(2 * p + 1, e) for e in range(2 * p + 2)]


def odd_x(p: int, e: int) -> int:
    """Closed form of x_e attached to an odd block of size 2p+1."""
    if e == 0:
        return 2 if p == 0 else 1
    num = 2 * (p + e)
    for k in range(2 * p + 1, 2 * p + e):
        num *= k
    q, r = divmod(num, factorial(e))
    assert r == 0
    return q


def f_value(p: int, u: int) -> int:
    """f_p(u) = 2 prod_{k<p} (u^2 - k^2) / (2p)!  (always an integer)."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    num = 2
    for k in range(p):
        num *= u * u - k * k
    q, r = divmod(num, factorial(2 * p))
    assert r == 0, "f_p must be integer valued"
    return q


def f_piecewise(p: int, u: int) -> int:
    """f_p(u) via the x-table: 0 inside (-p, p), else x_{|u|-p}."""
    if abs(u) < p:
        return 0
    return odd_x(p, abs(u) - p)


def falling(h: int, count: int) -> int:
    """h (h-1) ... (h-count+1)."""
    out = 1
    for k in range(count):
        out *= h - k
    return out


def tilde_pairing(p: int, h: int) -> mpq:
    """(w_h, w~) = 2^(p+1) h (h-1) ... (h-2p+1) / (2p)!."""
    return mpq(2 ** (p + 1) * falling(h, 2 * p), factorial(2 * p))


def tilde_self_pairing(p: int, h: int) -> int:
    """(w~_0, w~_h) = sum_{r<=p} (-1)^r 4^r f_r(h)."""
    return sum((-1) ** r * 4 ** r * f_value(r, h) for r in range(p + 1))


def xi_cross(p1: int, p2: int, h: int) -> mpq:
    """(z_h, xi) in the paired model."""
    e = p1 - p2
    return mpq(2 ** (e + 1) * falling(h + p2, 2 * p1), factorial(2 * p1))


def xi_self(p1: int, p2: int, h: int) -> mpq:
    """(xi_0, xi_h) = sum_{r in [p2, p1]} (-1)^r 2^(2r-2p2) f_r(h)."""
    return sum((mpq((-1) ** r * 2 ** (2 * r), 2 ** (2 * p2)) * f_value(r, h)
                for r in range(p2, p1 + 1)), mpq(0))


def tilde_coeffs_bar(p: int) -> list[int]:
    """Normalized coefficients c_i / c_* of w~ in the basis w_0..w_2p."""
    l = [comb(2 * p + 1, j) for j in range(2 * p + 2)]
    partial = [sum(l[: i + 1]) for i in range(2 * p + 2)]
    out = []
    for i in range(2 * p + 1):
        if i < p:
            out.append(-((-1) ** i) * partial[i])
        else:
            out.append((-1) ** i * partial[2 * p - i])
    return out


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsoModel:
    """A concrete (V, form, g, lines) with the auxiliary vectors used to build it."""

    dim: int
    epsilon: int
    gram: Matrix
    g: Matrix
    lines: tuple[tuple[GaussRational, ...], ...]
    tilde: dict = field(default_factory=dict)
    kind: str = ""
    params: tuple = ()

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "epsilon": self.epsilon,
            "gram": self.gram.to_json(),
            "g": self.g.to_json(),
            "lines": [[x.to_json() for x in v] for v in self.lines],
            "tilde": [[x.to_json() for x in v] for _, v in sorted(self.tilde.items())],
        }


def _basis(n: int, i: int) -> tuple[GaussRational, ...]:
    return tuple(ONE if k == i else ZERO for k in range(n))


def _companion(n: int, last_column: Sequence) -> Matrix:
    """g with g w_i = w_{i+1} (i < n-1) and g w_{n-1} = sum last_column[j] w_j."""
    rows = [[0] * n for _ in range(n)]
    for i in range(n - 1):
        rows[i + 1][i] = 1
    for j in range(n):
        rows[j][n - 1] = last_column[j]
    return Matrix(rows)


def model_mixed_block(a: int, b: int) -> IsoModel:
    if a < 0 or b < 0 or a + b == 0 or (a + b) % 2:
        raise ValueError("need a, b >= 0 with a + b = 2p > 0")
    if a and b and (a - b) % 2:
        raise ValueError("a and b must have the same parity")
    p = (a + b) // 2
    epsilon = -((-1) ** (a if a else b))
    n = n_coeffs(a, b)
    x = x_coeffs(n, 1, 2 * p)
    dim = 2 * p
    gram = [[0] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            if j - i >= p:
                gram[i][j] = x[j - i - p]
            elif i - j >= p:
                gram[i][j] = epsilon * x[i - j - p]
    g = _companion(dim, [epsilon * n[i] for i in range(dim)])
    return IsoModel(dim, epsilon, Matrix(gram), g, (_basis(dim, 0),),
                    kind="mixed", params=(a, b))


def odd_block_gram(p: int) -> Matrix:
    sign = (-1) ** p
    return Matrix([[sign * f_value(p, i - j) for j in range(2 * p + 1)]
                   for i in range(2 * p + 1)])


def odd_block_g(p: int) -> Matrix:
    return _companion(2 * p + 1, [(-1) ** j * comb(2 * p + 1, j) for j in range(2 * p + 1)])


def odd_block_tilde(p: int) -> tuple[GaussRational, ...]:
    scale = mpq(1, 2 ** p)
    return tuple(gr(scale * c) for c in tilde_coeffs_bar(p))


def model_odd_block(p: int) -> IsoModel:
    if p < 0:
        raise ValueError("p must be nonnegative")
    dim = 2 * p + 1
    tilde = odd_block_tilde(p)
    lines = ((_basis(dim, 0), tilde) if p >= 1 else (tilde,))
    return IsoModel(dim, 1, odd_block_gram(p), odd_block_g(p), lines,
                    tilde={"w~": tilde}, kind="odd", params=(p,))


def model_paired_odd_blocks(p1: int, p2: int) -> IsoModel:
    if not p1 >= p2 >= 1:
        raise ValueError("need p1 >= p2 >= 1")
    d1, d2 = 2 * p1 + 1, 2 * p2 - 1
    gram = Matrix.block_diag([odd_block_gram(p1), odd_block_gram(p2 - 1)])
    g = Matrix.block_diag([odd_block_g(p1), odd_block_g(p2 - 1)])
    z_tilde = odd_block_tilde(p1)
    shifted = (odd_block_g(p1) ** (-p2)).apply(z_tilde)
    v_tilde = odd_block_tilde(p2 - 1)
    scale = mpq(1, 2 ** p2)
    xi = vec_scale(scale, shifted + tuple(I * c for c in v_tilde))
    z0 = _basis(d1 + d2, 0)
    return IsoModel(d1 + d2, 1, gram, g, (z0, xi),
                    tilde={"z~": z_tilde + (ZERO,) * d2, "v~": (ZERO,) * d1 + v_tilde,
                           "xi": xi},
                    kind="paired", params=(p1, p2))


def direct_sum(models: Sequence[IsoModel], epsilon: int) -> IsoModel:
    """Orthogonal direct sum; lines are padded into the big space in order."""
    dim = sum(m.dim for m in models)
    lines = []
    offset = 0
    for m in models:
        for v in m.lines:
            lines.append((ZERO,) * offset + tuple(v) + (ZERO,) * (dim - offset - m.dim))
        offset += m.dim
    if not models:
        return IsoModel(0, epsilon, Matrix.zeros(0, 0), Matrix.zeros(0, 0), (), kind="sum")
    return IsoModel(dim, epsilon, Matrix.block_diag([m.gram for m in models]),
                    Matrix.block_diag([m.g for m in models]), tuple(lines), kind="sum")


def negate(model: IsoModel) -> IsoModel:
    return IsoModel(model.dim, model.epsilon, model.gram, -model.g, model.lines,
                    dict(model.tilde), model.kind, model.params)


# ---------------------------------------------------------------------------
# pairing profiles
# ---------------------------------------------------------------------------

def orbit(g: Matrix, v: Sequence, lo: int, hi: int) -> dict[int, tuple]:
    """{i: g^i v for lo <= i <= hi} computed by repeated application."""
    v = tuple(gr(x) for x in v)
    out = {0: v}
    cur = v
    for i in range(1, max(hi, 0) + 1):
        cur = g.apply(cur)
        out[i] = cur
    if lo < 0:
        inv = g.inverse()
        cur = v
        for i in range(1, -lo + 1):
            cur = inv.apply(cur)
            out[-i] = cur
    return {i: out[i] for i in range(lo, hi + 1)}


def profile(gram: Matrix, g: Matrix, x: Sequence, y: Sequence,
            offsets: Iterable[int]) -> dict[int, GaussRational]:
    """u -> (g^i x, g^j y) with i - j = u (independent of i, j since g is an isometry)."""
    offsets = list(offsets)
    if not offsets:
        return {}
    xs = orbit(g, x, min(offsets), max(offsets))
    gy = gram.apply(tuple(gr(c) for c in y))
    return {u: sum((a * b for a, b in zip(xs[u], gy)), ZERO) for u in offsets}


def pairing_profile(model, t: int, t2: int, offsets: Iterable[int],
                    vectors: Sequence | None = None) -> dict[int, GaussRational]:
    """Table of (z^t_i, z^{t2}_j) as a function of i - j (lines numbered from 1)."""
    vecs = vectors if vectors is not None else getattr(model, "normalized", None) or model.lines
    if vecs is None or not (1 <= t <= len(vecs) and 1 <= t2 <= len(vecs)):
        raise ValueError("line index out of range or vectors missing")
    return profile(model.gram, model.g, vecs[t - 1], vecs[t2 - 1], offsets)


# ---------------------------------------------------------------------------
# uniqueness: rebuild tables from the minimal constraints
# ---------------------------------------------------------------------------

def rebuild_odd_table(p: int, span: int) -> dict[int, int]:
    """Profile (w_0, w_u) for |u| <= span forced by (w_0,w_u)=0 for |u|<p,
    (w_0, w_{+-p}) = (-1)^p and the relation (g-1)^(2p+1) = 0."""
    if p == 0:
        return {u: 2 for u in range(-span, span + 1)}
    n = odd_n(p)
    sign = (-1) ** p
    table = {u: 0 for u in range(-p + 1, p)}
    table[p] = table[-p] = sign
    for u in range(p + 1, span + 1):
        # sum_h n_h (w_0, w_{u-h}) = 0, solved for the h = 0 term
        table[u] = -sum(n[h] * table[u - h] for h in range(1, 2 * p + 2))
        table[-u] = table[u]
    return table


def solve_tilde_coeffs(p: int) -> list[mpq]:
    """Solve sum_i cbar_i f_p(i-h) = 0 (h < 2p) with cbar_2p = 1 by elimination."""
    if p == 0:
        return [mpq(1)]
    m = Matrix([[f_value(p, i - h) for i in range(2 * p)] for h in range(2 * p)])
    rhs = Matrix([[-f_value(p, 2 * p - h)] for h in range(2 * p)])
    sol = m.solve(rhs)
    return [sol[i, 0].re for i in range(2 * p)] + [mpq(1)]


def _inverse_power_series(power: int, terms: int) -> list[int]:
    """Coefficients of (1-T)^(-power)."""
    return [comb(power - 1 + k, k) for k in range(terms)]


def _series_product(a: Sequence, b: Sequence, terms: int) -> list:
    return [sum((a[i] * b[k - i] for i in range(k + 1) if i < len(a) and k - i < len(b)),
                mpq(0)) for k in range(terms)]


def paired_c_coeffs(p1: int, p2: int) -> list[mpq]:
    """c_0..c_2e with N^{2p2} xi_0 = sum c_i N^{2p2} z_i, normalized to match
    the explicit paired model (c_2e = (-1)^p2 2^-e)."""
    e = p1 - p2
    l = [comb(2 * e + 1, j) for j in range(2 * e + 2)]
    partial = [sum(l[: i + 1]) for i in range(2 * e + 2)]
    c0p = mpq((-1) ** p2, 2 ** e)
    c = [mpq(0)] * (2 * e + 1)
    for i in range(e + 1):
        c[2 * e - i] = (-1) ** i * c0p * partial[i]
    for i in range(e):
        c[i] = (-1) ** (i + 1) * c0p * partial[i]
    return c


def reconstruct_paired_profiles(p1: int, p2: int, span: int) -> dict[str, dict[int, mpq]]:
    """alpha, gamma, beta profiles derived from the minimal constraints only.

    alpha comes from the single-block recursion; gamma and beta are then
    produced by the generating series C, C' and B, using the closed form of
    the coefficients c_i. Nothing here looks at the explicit model.
    """
    e = p1 - p2
    wide = span + 4 * p1 + 4
    alpha = rebuild_odd_table(p1, wide + 2 * p1 + 2 * p2 + 4)
    c = paired_c_coeffs(p1, p2)
    m = [(-1) ** j * comb(2 * p2, j) for j in range(2 * p2 + 1)]
    terms = wide + 1
    inv = _inverse_power_series(2 * p2, terms)

    def rhs(shift: int, t: int, direction: int) -> mpq:
        return sum((c[i] * m[j] * alpha[shift + direction * t - i - j]
                    for i in range(2 * e + 1) for j in range(2 * p2 + 1)), mpq(0))

    gamma: dict[int, mpq] = {u: mpq(0) for u in range(-p2, 2 * p1 - p2)}
    upper = _series_product(inv, [rhs(2 * p1 - p2, t, 1) for t in range(terms)], terms)
    lower = _series_product(inv, [rhs(p2 - 1, t, -1) for t in range(terms)], terms)
    for t in range(terms):
        gamma[2 * p1 - p2 + t] = upper[t]
        gamma[-p2 - 1 - t] = lower[t]

    b_rhs = [mpq((-1) ** p2)] + [
        sum((c[i] * m[j] * gamma[i + j - p2 - t]
             for i in range(2 * e + 1) for j in range(2 * p2 + 1)), mpq(0))
        for t in range(1, terms)]
    b_series = _series_product(inv, b_rhs, terms)
    beta: dict[int, mpq] = {u: mpq(0) for u in range(-p2 + 1, p2)}
    for s in range(terms):
        beta[p2 + s] = beta[-p2 - s] = b_series[s]
    keep = range(-span, span + 1)
    return {"alpha": {u: mpq(alpha[u]) for u in keep},
            "gamma": {u: gamma[u] for u in keep},
            "beta": {u: beta[u] for u in keep}}


def model_paired_c_coeffs(p1: int, p2: int) -> list[GaussRational]:
    """Solve N^{2p2} xi = sum c_i N^{2p2} z_i directly in the explicit model."""
    model = model_paired_odd_blocks(p1, p2)
    e = p1 - p2
    nmat = (model.g - Matrix.identity(model.dim)) ** (2 * p2)
    zs = orbit(model.g, model.lines[0], 0, 2 * e)
    cols = [nmat.apply(zs[i]) for i in range(2 * e + 1)]
    target = nmat.apply(model.tilde["xi"])
    coeffs = solve_in_span(cols, target)
    if coeffs is None:
        raise ArithmeticError("N^{2p2} xi is not in the span of N^{2p2} z_i")
    return coeffs
