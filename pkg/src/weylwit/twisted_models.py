"""Nondegenerate bilinear forms viewed as isomorphisms g: V -> V*.

Coordinates: V and V* are both k^n, paired by (x, xi) = x^T xi. An element
g of G^1_V is stored as the matrix M with g(x) = M x, so that M is also the
Gram matrix of the bilinear form (x, g y). With this convention

    check(g) = M^{-T},   g^{*2} = M^{-T} M,   twisted conjugation M -> A^{-T} M A^{-1}.

Vectors z_i = g^{*i} z live in V for even i and in V* for odd i.  The
pairing profile of x, y is the function h -> (x_0, y_h) on odd h; by the
shift identity it equals (x_i, y_j) whenever j - i = h.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Iterable, Sequence

from gmpy2 import mpq

from .exact import I, ONE, ZERO, GaussRational, Matrix, gr, solve_in_span
from .iso_models import falling, n_coeffs, x_coeffs


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def double_factorial_even(m: int) -> int:
    """2 * 4 * ... * m for even m >= 0."""
    out = 1
    for k in range(2, m + 1, 2):
        out *= k
    return out


# ---------------------------------------------------------------------------
# single blocks: (1 - T^2)^a (1 + T^2)^b
# ---------------------------------------------------------------------------

def _check_single(a: int, b: int) -> int:
    if a < 1 or a % 2 == 0 or b < 0 or b % 2:
        raise ValueError("need a odd and positive, b even (possibly zero)")
    return (a + b + 1) // 2


def n2_coeffs(a: int, b: int) -> list[int]:
    """Entry k is n_{2k}, the coefficient of T^{2k} in (1-T^2)^a (1+T^2)^b."""
    _check_single(a, b)
    return n_coeffs(a, b)


def x2_coeffs(a: int, b: int, length: int) -> list[int]:
    """Entry k is x_{2k}: x_0 = 1 and sum_e n_e x_{2k-e} = 0 for k >= 1."""
    return x_coeffs(n2_coeffs(a, b), 1, length)


def x_prime(a: int, b: int, h: int) -> int:
    """x'_h for odd h: zero when |h| < 2p-1, otherwise x_{|h|-2p+1}."""
    p = _check_single(a, b)
    if h % 2 == 0:
        raise ValueError("h must be odd")
    if abs(h) < 2 * p - 1:
        return 0
    k = (abs(h) - 2 * p + 1) // 2
    return x2_coeffs(a, b, k + 1)[k]


def single_identity_residues(a: int, b: int) -> list[int]:
    """sum_e n_e x'_{e-j-1} for every even j in [0, 4p-4]; all zero if the identity holds."""
    p = _check_single(a, b)
    n = n2_coeffs(a, b)
    return [sum(n[k] * x_prime(a, b, 2 * k - j - 1) for k in range(len(n)))
            for j in range(0, 4 * p - 3, 2)]


# ---------------------------------------------------------------------------
# phi_p and the even blocks: (1 + T^2)^{2p}
# ---------------------------------------------------------------------------

def phi_n(p: int) -> list[int]:
    """Entry k is n_{2k} = binom(2p, k)."""
    return [comb(2 * p, k) for k in range(2 * p + 1)]


def phi_x(p: int, length: int) -> list[int]:
    """x_{2k}: x_0 = 1, x_2 = -(2p+1), then the binomial recurrence from k = 2 on."""
    if p < 1:
        raise ValueError("p must be positive")
    n = phi_n(p)
    given = [-(2 * p + 1)]
    return x_coeffs(n, 1, max(length, 2), start=2, given=given)[:length]


def phi_x_closed(p: int, k: int) -> mpq:
    """(-1)^k (2p+2k-1)(2p-2+k)(2p-3+k)...(k+1) / (2p-1)!."""
    num = (2 * p + 2 * k - 1) * falling(2 * p - 2 + k, 2 * p - 2)
    return mpq(_sign(k) * num, factorial(2 * p - 1))


def phi_value(p: int, h: int) -> int:
    """phi_p(h) from the x-table (the piecewise definition)."""
    if h % 2 == 0:
        raise ValueError("h must be odd")
    if abs(h) < 2 * p - 1:
        return 0
    k = (abs(h) - 2 * p + 1) // 2
    return phi_x(p, k + 1)[k]


def phi_closed(p: int, h: int) -> mpq:
    """(-1)^{(h+2p+1)/2} 2h (h+2p-3)(h+2p-5)...(h-2p+3) / (4p-2)!!."""
    num = 2 * h
    for k in range(2 * p - 2):
        num *= h + 2 * p - 3 - 2 * k
    return mpq(_sign((h + 2 * p + 1) // 2) * num, double_factorial_even(4 * p - 2))


def phi_relation_residue(p: int, h: int) -> int:
    """sum_{e in [0,4p]''} n_e phi_p(e + h); zero for every odd h."""
    return sum(c * phi_value(p, 2 * k + h) for k, c in enumerate(phi_n(p)))


def even_tilde_coeffs_bar(p: int) -> list[int]:
    """Entry r is cbar_{2r} (r in [0, 2p-1]); the last entry is 1."""
    n = phi_n(p)
    out = []
    for r in range(2 * p):
        if r <= p - 1:
            out.append(-sum(n[: r + 1]))
        else:
            out.append(sum(n[: 2 * p - 1 - r + 1]))
    return out


def tilde_pairing2(p: int, h: int) -> mpq:
    """(w~_0, w_h) = (-1)^{(h+1)/2} 2^p (h-1)(h-3)...(h-4p+3) / (4p-2)!!."""
    num = 2 ** p
    for k in range(2 * p - 1):
        num *= h - 1 - 2 * k
    return mpq(_sign((h + 1) // 2) * num, double_factorial_even(4 * p - 2))


def tilde_self2(p: int, h: int) -> int:
    """(w~_0, w~_h) = sum_{k in [1,p]} 2^{2k-2} phi_k(h)."""
    return sum(4 ** (k - 1) * phi_value(k, h) for k in range(1, p + 1))


def xi_cross2(p1: int, p2: int, h: int) -> mpq:
    """(xi_0, z_h) in the paired model."""
    e = p1 - p2
    num = 2 ** (e + 1)
    for k in range(2 * p1 - 1):
        num *= h + 2 * p2 - 1 - 2 * k
    return mpq(_sign((h + 2 * p2 + 1) // 2) * num, double_factorial_even(4 * p1 - 2))


def xi_self2(p1: int, p2: int, h: int) -> int:
    """(xi_0, xi_h) = sum_{k in [p2,p1]} 2^{2k-2p2} phi_k(h)."""
    return sum(4 ** (k - p2) * phi_value(k, h) for k in range(p2, p1 + 1))


# ---------------------------------------------------------------------------
# the space
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwistedSpace:
    """V with g: V -> V*; ``form`` is the matrix of g (and of (x, g y))."""

    form: Matrix

    @property
    def dim(self) -> int:
        return self.form.rows

    @property
    def check(self) -> Matrix:
        return self.form.T.inverse()

    @property
    def star_square(self) -> Matrix:
        return self.check @ self.form

    @property
    def dual_pairing(self) -> Matrix:
        return Matrix.identity(self.dim)

    def star_power(self, i: int) -> Matrix:
        """Matrix of g^{*i}: V -> V for even i, V -> V* for odd i."""
        s = self.star_square
        if i % 2 == 0:
            return s ** (i // 2)
        return self.form @ s ** ((i - 1) // 2)

    def even_orbit(self, v: Sequence, count: int) -> list[tuple]:
        """v_0, v_2, ..., v_{2(count-1)}."""
        s = self.star_square
        out = [tuple(gr(x) for x in v)]
        for _ in range(count - 1):
            out.append(s.apply(out[-1]))
        return out[:count]

    def profile(self, x: Sequence, y: Sequence, offsets: Iterable[int]) -> dict[int, GaussRational]:
        """h -> (x_0, y_h) for odd h."""
        offsets = sorted(set(offsets))
        if not offsets:
            return {}
        if any(h % 2 == 0 for h in offsets):
            raise ValueError("offsets must be odd")
        left = self.form.T.apply(x)  # (x, M w) = left . w
        s, s_inv = self.star_square, None
        ks = [(h - 1) // 2 for h in offsets]
        lo, hi = min(ks), max(ks)
        vecs: dict[int, tuple] = {0: tuple(gr(c) for c in y)}
        cur = vecs[0]
        for k in range(1, hi + 1):
            cur = s.apply(cur)
            vecs[k] = cur
        if lo < 0:
            s_inv = s.inverse()
            cur = vecs[0]
            for k in range(-1, lo - 1, -1):
                cur = s_inv.apply(cur)
                vecs[k] = cur
        out = {}
        for h, k in zip(offsets, ks):
            out[h] = sum((a * b for a, b in zip(left, vecs[k])), ZERO)
        return out

    def to_json(self) -> dict:
        return {"dim": self.dim, "g": self.form.to_json(),
                "dual_pairing": self.dual_pairing.to_json()}


def odd_range(lo: int, hi: int) -> range:
    """Odd integers in [lo, hi]."""
    start = lo if lo % 2 else lo + 1
    return range(start, hi + 1, 2)


@dataclass(frozen=True)
class TwistedModel:
    space: TwistedSpace
    lines: tuple[tuple[GaussRational, ...], ...]
    kind: str
    params: tuple[int, ...]
    tilde: dict = field(default_factory=dict, compare=False)

    @property
    def dim(self) -> int:
        return self.space.dim

    def to_json(self) -> dict:
        out = {"kind": self.kind, "params": list(self.params)}
        out.update(self.space.to_json())
        out["lines"] = [[x.to_json() for x in v] for v in self.lines]
        return out


def _unit(n: int, i: int) -> tuple[GaussRational, ...]:
    return tuple(ONE if j == i else ZERO for j in range(n))


def single_form(a: int, b: int) -> Matrix:
    p = _check_single(a, b)
    m = 2 * p - 1
    return Matrix([[x_prime(a, b, 2 * r - 2 * c - 1) for c in range(m)] for r in range(m)])


def model_single_twisted(a: int, b: int) -> TwistedModel:
    form = single_form(a, b)
    return TwistedModel(TwistedSpace(form), (_unit(form.rows, 0),), "single", (a, b))


def even_form(p: int) -> Matrix:
    return Matrix([[phi_value(p, 2 * r - 2 * c - 1) for c in range(2 * p)] for r in range(2 * p)])


def even_tilde(p: int) -> tuple[GaussRational, ...]:
    scale = mpq(1, 2 ** p)
    return tuple(gr(scale * c) for c in even_tilde_coeffs_bar(p))


def model_even_twisted(p: int) -> TwistedModel:
    if p < 1:
        raise ValueError("p must be positive")
    form = even_form(p)
    return TwistedModel(TwistedSpace(form), (_unit(2 * p, 0),), "even", (p,),
                        {"w~": even_tilde(p)})


def model_paired_even_twisted(p1: int, p2: int) -> TwistedModel:
    if not p1 >= p2 >= 1:
        raise ValueError("need p1 >= p2 >= 1")
    first = model_even_twisted(p1)
    s1 = first.space.star_square
    z_tilde = (s1 ** (-p2)).apply(first.tilde["w~"])
    c = mpq(1, 2 ** (p2 - 1))
    if p2 >= 2:
        second = model_even_twisted(p2 - 1)
        form = Matrix.block_diag([first.space.form, second.space.form])
        v_tilde = second.tilde["w~"]
    else:
        form = first.space.form
        v_tilde = ()
    xi = tuple(c * x for x in z_tilde) + tuple(c * I * x for x in v_tilde)
    z0 = _unit(form.rows, 0)
    return TwistedModel(TwistedSpace(form), (z0, xi), "paired", (p1, p2),
                        {"z~": first.tilde["w~"] + (ZERO,) * (form.rows - 2 * p1),
                         "v~": (ZERO,) * (2 * p1) + tuple(v_tilde), "xi": xi})


def twisted_direct_sum(models: Sequence[TwistedModel]) -> TwistedModel:
    if not models:
        return TwistedModel(TwistedSpace(Matrix.zeros(0, 0)), (), "sum", ())
    form = Matrix.block_diag([m.space.form for m in models])
    total = form.rows
    lines, offset = [], 0
    for m in models:
        for v in m.lines:
            lines.append((ZERO,) * offset + tuple(v) + (ZERO,) * (total - offset - m.dim))
        offset += m.dim
    return TwistedModel(TwistedSpace(form), tuple(lines), "sum", ())


# ---------------------------------------------------------------------------
# reconstruction from the minimal constraints
# ---------------------------------------------------------------------------

def _rebuild_symmetric(relation: Sequence[int], p: int, span: int) -> dict[int, mpq]:
    """Odd-indexed symmetric table: zero inside, 1 at +-(2p-1), extended by the relation.

    ``relation`` lists c_0..c_d with sum_k c_k v(h - 2d + 2k) = 0 for every odd h.
    """
    d = len(relation) - 1
    vals: dict[int, mpq] = {h: mpq(0) for h in odd_range(-(2 * p - 3), 2 * p - 3)}
    vals[2 * p - 1] = vals[-(2 * p - 1)] = mpq(1)
    top = relation[-1]
    for h in odd_range(2 * p + 1, span):
        acc = sum((relation[k] * vals[h - 2 * d + 2 * k] for k in range(d)), mpq(0))
        vals[h] = -acc / top
        vals[-h] = vals[h]
    return {h: vals[h] for h in odd_range(-span, span)}


def rebuild_single_table(a: int, b: int, span: int) -> dict[int, mpq]:
    p = _check_single(a, b)
    return _rebuild_symmetric(n2_coeffs(a, b), p, span)


def rebuild_even_table(p: int, span: int) -> dict[int, mpq]:
    return _rebuild_symmetric(phi_n(p), p, span)


def solve_even_tilde(p: int) -> list[GaussRational]:
    """Coefficients of w~ from (w~, w_i) = 0 (i in [1,4p-3]'), (w~_0, w~_1) = 1, c_* > 0."""
    form = even_form(p)
    rows = [[form[r, c] for r in range(2 * p)] for c in range(2 * p - 1)]
    kernel = Matrix(rows).nullspace()
    if len(kernel) != 1:
        raise AssertionError("annihilator is not a line")
    v = kernel[0]
    space = TwistedSpace(form)
    q = space.profile(v, v, [1])[1]
    lam = (ONE / q).sqrt()
    if lam is None:
        raise AssertionError("no rational normalization")
    v = tuple(lam * x for x in v)
    if v[-1].re < 0:
        v = tuple(-x for x in v)
    return list(v)


def _series_mul(a: Sequence, b: Sequence, terms: int) -> list:
    out = [mpq(0)] * terms
    for i, x in enumerate(a[:terms]):
        if not x:
            continue
        for j, y in enumerate(b[: terms - i]):
            out[i + j] += x * y
    return out


def _binomial_series(power: int, terms: int) -> list[mpq]:
    """Coefficients of (1+T)^power for any integer power."""
    out, c = [], mpq(1)
    for k in range(terms):
        out.append(c)
        c = c * (power - k) / (k + 1)
    return out


def paired_c_coeffs2(p1: int, p2: int) -> list[mpq]:
    """d_i = c_{2i} (i in [0, 2e]) with leading normalization c_{4e} = 2^{-e}."""
    e = p1 - p2
    l = [comb(2 * e + 1, j) for j in range(2 * e + 2)]
    scale = mpq(1, 2 ** e)
    d = [mpq(0)] * (2 * e + 1)
    for i in range(e + 1):
        d[2 * e - i] = scale * sum(l[: i + 1])
    for i in range(e):
        d[i] = -scale * sum(l[: i + 1])
    return d


def model_paired_c_coeffs2(p1: int, p2: int) -> list[GaussRational]:
    """Solve N^{2p2-1} xi = sum_i d_i N^{2p2-1} z_{2i} inside the explicit model."""
    model = model_paired_even_twisted(p1, p2)
    space = model.space
    n_op = (space.star_square + Matrix.identity(space.dim)) ** (2 * p2 - 1)
    e = p1 - p2
    z_orbit = space.even_orbit(model.lines[0], 2 * e + 1)
    cols = [n_op.apply(z) for z in z_orbit]
    target = n_op.apply(model.lines[1])
    coeffs = solve_in_span(cols, target)
    if coeffs is None:
        raise ArithmeticError("N^{2p2-1} xi is not in the span of N^{2p2-1} z_{2i}")
    return coeffs


def reconstruct_paired_profiles(p1: int, p2: int, span: int) -> dict[str, dict[int, mpq]]:
    """alpha, beta, gamma on odd |h| <= span from the minimal constraints.

    alpha_h = (z_0, z_h), beta_h = (xi_0, xi_h), gamma_h = (xi_0, z_h).
    """
    e = p1 - p2
    terms = span + 4 * p1 + 8
    alpha = _rebuild_symmetric(phi_n(p1), p1, 2 * terms + 4 * p1 + 4)
    d = paired_c_coeffs2(p1, p2)
    m = [comb(2 * p2 - 1, j) for j in range(2 * p2)]
    inv_m = _binomial_series(-(2 * p2 - 1), terms)

    def alpha_at(h: int) -> mpq:
        return alpha[h]

    def rhs(u: int) -> mpq:
        return sum((d[i] * m[j] * alpha_at(u - 2 * i - 2 * j)
                    for i in range(2 * e + 1) for j in range(2 * p2)), mpq(0))

    gamma: dict[int, mpq] = {h: mpq(0) for h in odd_range(1 - 2 * p2, 4 * p1 - 2 * p2 - 3)}
    top = 4 * p1 - 2 * p2 - 1
    upper = _series_mul(inv_m, [rhs(top + 2 * t) for t in range(terms)], terms)
    for t, val in enumerate(upper):
        gamma[top + 2 * t] = val
    lower = _series_mul(inv_m, [rhs(2 * p2 - 3 - 2 * t) for t in range(terms)], terms)
    for t, val in enumerate(lower):
        gamma[-2 * p2 - 1 - 2 * t] = val

    def gamma_at(h: int) -> mpq:
        return gamma[h]

    rest = [mpq(1)] + [
        sum((d[i] * m[j] * gamma_at(2 * i + 2 * j - 2 * p2 + 1 - 2 * t)
             for i in range(2 * e + 1) for j in range(2 * p2)), mpq(0))
        for t in range(1, terms)]
    bseries = _series_mul(inv_m, rest, terms)
    beta: dict[int, mpq] = {h: mpq(0) for h in odd_range(-(2 * p2 - 3), 2 * p2 - 3)}
    for s, val in enumerate(bseries):
        beta[2 * p2 - 1 + 2 * s] = val
        beta[-(2 * p2 - 1 + 2 * s)] = val
    window = list(odd_range(-span, span))
    return {"alpha": {h: alpha[h] for h in window},
            "beta": {h: beta[h] for h in window},
            "gamma": {h: gamma[h] for h in window}}
