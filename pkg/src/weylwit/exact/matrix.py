"""Dense exact matrices over Q(i).

A matrix keeps its real and imaginary parts as two grids of mpq; the
imaginary grid is dropped when it vanishes, so real matrices (the common
case) run on plain rational arithmetic. Vectors are tuples of
``GaussRational``.
"""

from __future__ import annotations

from functools import reduce
from math import lcm
from typing import Iterable, Sequence

from gmpy2 import mpq, mpz

from .scalar import ZERO, GaussRational, Rational, gr, to_rational

_Q0 = mpq(0)
_Q1 = mpq(1)


def _split(value) -> tuple[Rational, Rational]:
    if isinstance(value, GaussRational):
        return value.re, value.im
    return to_rational(value), _Q0


def _elem(re: Rational, im: Rational) -> GaussRational:
    return GaussRational._raw(re, im)


class Matrix:
    """Immutable rows x cols matrix with entries in Q(i)."""

    __slots__ = ("rows", "cols", "_re", "_im", "_hash")

    def __init__(self, entries: Iterable[Iterable], cols: int | None = None):
        re_rows, im_rows = [], []
        for row in entries:
            r_re, r_im = [], []
            for value in row:
                x, y = _split(value)
                r_re.append(x)
                r_im.append(y)
            re_rows.append(tuple(r_re))
            im_rows.append(tuple(r_im))
        widths = {len(r) for r in re_rows}
        if len(widths) > 1:
            raise ValueError("ragged rows: a matrix must be rectangular")
        if widths:
            width = widths.pop()
            if cols is not None and cols != width:
                raise ValueError("declared column count does not match entries")
        else:
            width = cols or 0
        self._init(tuple(re_rows), tuple(im_rows), len(re_rows), width)

    def _init(self, re, im, rows, cols):
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_re", re)
        if im is not None and not any(any(r) for r in im):
            im = None
        object.__setattr__(self, "_im", im)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _from_parts(cls, re, im, rows=None, cols=None) -> "Matrix":
        obj = object.__new__(cls)
        r = len(re) if rows is None else rows
        c = (len(re[0]) if re else 0) if cols is None else cols
        obj._init(re, im, r, c)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- constructors -------------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "Matrix":
        re = tuple(tuple(_Q1 if i == j else _Q0 for j in range(n)) for i in range(n))
        return cls._from_parts(re, None, n, n)

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "Matrix":
        cols = rows if cols is None else cols
        re = tuple((_Q0,) * cols for _ in range(rows))
        return cls._from_parts(re, None, rows, cols)

    @classmethod
    def diagonal(cls, values: Sequence) -> "Matrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> "Matrix":
        if not columns:
            return cls.zeros(rows or 0, 0)
        n = len(columns[0])
        return cls([[col[i] for col in columns] for i in range(n)])

    @classmethod
    def block_diag(cls, blocks: Sequence["Matrix"]) -> "Matrix":
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        re = [[_Q0] * m for _ in range(n)]
        im = [[_Q0] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    re[r0 + i][c0 + j] = b._re[i][j]
                    if b._im is not None:
                        im[r0 + i][c0 + j] = b._im[i][j]
            r0 += b.rows
            c0 += b.cols
        return cls._from_parts(tuple(map(tuple, re)), tuple(map(tuple, im)), n, m)

    # -- access -------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_real(self) -> bool:
        return self._im is None

    def __getitem__(self, index) -> GaussRational:
        i, j = index
        im = self._im[i][j] if self._im is not None else _Q0
        return _elem(self._re[i][j], im)

    def row(self, i: int) -> tuple[GaussRational, ...]:
        if self._im is None:
            return tuple(_elem(x, _Q0) for x in self._re[i])
        return tuple(_elem(x, y) for x, y in zip(self._re[i], self._im[i]))

    def col(self, j: int) -> tuple[GaussRational, ...]:
        return tuple(self[i, j] for i in range(self.rows))

    def columns(self) -> list[tuple[GaussRational, ...]]:
        return [self.col(j) for j in range(self.cols)]

    def entries(self) -> list[list[GaussRational]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        re = tuple(tuple(self._re[i][j] for j in cols) for i in rows)
        im = None
        if self._im is not None:
            im = tuple(tuple(self._im[i][j] for j in cols) for i in rows)
        return Matrix._from_parts(re, im, len(rows), len(cols))

    # -- arithmetic ---------------------------------------------------------
    def _im_or_zero(self):
        if self._im is not None:
            return self._im
        return tuple((_Q0,) * self.cols for _ in range(self.rows))

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        re = tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(self._re, other._re))
        if self._im is None and other._im is None:
            return Matrix._from_parts(re, None, self.rows, self.cols)
        im = tuple(
            tuple(x + y for x, y in zip(r, s))
            for r, s in zip(self._im_or_zero(), other._im_or_zero())
        )
        return Matrix._from_parts(re, im, self.rows, self.cols)

    def __neg__(self) -> "Matrix":
        re = tuple(tuple(-x for x in r) for r in self._re)
        im = None if self._im is None else tuple(tuple(-x for x in r) for r in self._im)
        return Matrix._from_parts(re, im, self.rows, self.cols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        a, b = _split(c)
        if self._im is None and not b:
            re = tuple(tuple(a * x for x in r) for r in self._re)
            return Matrix._from_parts(re, None, self.rows, self.cols)
        im_grid = self._im_or_zero()
        re = tuple(
            tuple(a * x - b * y for x, y in zip(r, s)) for r, s in zip(self._re, im_grid)
        )
        im = tuple(
            tuple(a * y + b * x for x, y in zip(r, s)) for r, s in zip(self._re, im_grid)
        )
        return Matrix._from_parts(re, im, self.rows, self.cols)

    def __mul__(self, c) -> "Matrix":
        if isinstance(c, Matrix):
            return self @ c
        return self.scale(c)

    __rmul__ = scale

    def transpose(self) -> "Matrix":
        re = tuple(zip(*self._re)) if self.rows else ()
        im = None if self._im is None else tuple(zip(*self._im))
        return Matrix._from_parts(re, im, self.cols, self.rows)

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            return mat_mul(self, other)
        return self.apply(other)

    def apply(self, vector: Sequence) -> tuple[GaussRational, ...]:
        """Matrix times column vector."""
        if len(vector) != self.cols:
            raise ValueError(f"vector of length {len(vector)} for {self.shape} matrix")
        v_re, v_im = zip(*(_split(x) for x in vector)) if vector else ((), ())
        v_real = not any(v_im)
        out = []
        for i in range(self.rows):
            r = self._re[i]
            x = sum((a * b for a, b in zip(r, v_re)), _Q0)
            y = _Q0
            if not v_real:
                x -= sum((a * b for a, b in zip(self._im[i] if self._im else (), v_im)), _Q0)
                y += sum((a * b for a, b in zip(r, v_im)), _Q0)
            if self._im is not None:
                y += sum((a * b for a, b in zip(self._im[i], v_re)), _Q0)
            out.append(_elem(x, y))
        return tuple(out)

    def __pow__(self, k: int) -> "Matrix":
        if not self.is_square():
            raise ValueError("power of a non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result = Matrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self._re == other._re
            and (self._im or None) == (other._im or None)
        )

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.shape, self._re, self._im)))
        return self._hash

    def is_zero(self) -> bool:
        return not any(any(r) for r in self._re) and self._im is None

    def is_identity(self) -> bool:
        return self.is_square() and self == Matrix.identity(self.rows)

    # -- elimination --------------------------------------------------------
    def _field_grid(self) -> list[list]:
        """Mutable grid of field elements: mpq when real, else GaussRational."""
        if self._im is None:
            return [list(r) for r in self._re]
        return [
            [_elem(x, y) for x, y in zip(r, s)] for r, s in zip(self._re, self._im)
        ]

    def _wrap(self, value) -> GaussRational:
        return value if isinstance(value, GaussRational) else _elem(value, _Q0)

    def rank(self) -> int:
        """Rank by fraction-free (Bareiss) elimination on a denominator-free copy."""
        return _bareiss(_integral_grid(self))[0]

    def det(self) -> GaussRational:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        if self.rows == 0:
            return _elem(_Q1, _Q0)
        grid, scale = _integral_grid(self, with_scale=True)
        _, det = _bareiss(grid)
        return self._wrap(det) / scale

    def rref(self) -> tuple[list[list], list[int]]:
        """Reduced row echelon form over the field, with pivot columns."""
        grid = self._field_grid()
        pivots: list[int] = []
        r = 0
        for c in range(self.cols):
            pivot = next((i for i in range(r, self.rows) if grid[i][c]), None)
            if pivot is None:
                continue
            grid[r], grid[pivot] = grid[pivot], grid[r]
            inv = 1 / grid[r][c]
            grid[r] = [x * inv for x in grid[r]]
            for i in range(self.rows):
                if i != r and grid[i][c]:
                    f = grid[i][c]
                    grid[i] = [x - f * y for x, y in zip(grid[i], grid[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return grid, pivots

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        aug = hstack(self, Matrix.identity(n))
        grid, pivots = aug.rref()
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return Matrix([[self._wrap(x) for x in row[n:]] for row in grid])

    def nullspace(self) -> list[tuple[GaussRational, ...]]:
        """Basis of {v : M v = 0}, one vector per free column."""
        grid, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for f in free:
            v = [ZERO] * self.cols
            v[f] = _elem(_Q1, _Q0)
            for r, c in enumerate(pivots):
                v[c] = -self._wrap(grid[r][f])
            basis.append(tuple(v))
        return basis

    def solve(self, rhs: "Matrix") -> "Matrix":
        """Solve M X = rhs for square invertible M."""
        return self.inverse() @ rhs

    # -- serialization ------------------------------------------------------
    def to_json(self) -> list:
        return [[x.to_json() for x in self.row(i)] for i in range(self.rows)]

    @classmethod
    def from_json(cls, data) -> "Matrix":
        return cls([[GaussRational.from_json(x) for x in row] for row in data])

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"Matrix({self.rows}x{self.cols}: [{body}])"


def hstack(*mats: Matrix) -> Matrix:
    rows = mats[0].rows
    if any(m.rows != rows for m in mats):
        raise ValueError("hstack needs equal row counts")
    re = tuple(tuple(x for m in mats for x in m._re[i]) for i in range(rows))
    im = tuple(tuple(x for m in mats for x in m._im_or_zero()[i]) for i in range(rows))
    return Matrix._from_parts(re, im, rows, sum(m.cols for m in mats))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    """Exact product a @ b."""
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch {a.shape} @ {b.shape}")
    bt_re = tuple(zip(*b._re)) if b.rows else tuple(() for _ in range(b.cols))

    def prod(x_rows, y_cols):
        return tuple(
            tuple(sum((p * q for p, q in zip(r, c)), _Q0) for c in y_cols) for r in x_rows
        )

    re = prod(a._re, bt_re)
    if a._im is None and b._im is None:
        return Matrix._from_parts(re, None, a.rows, b.cols)
    zero = tuple(tuple(_Q0 for _ in range(a.cols)) for _ in range(b.cols))
    bt_im = tuple(zip(*b._im)) if b._im is not None else zero
    a_im = a._im_or_zero()
    ii = prod(a_im, bt_im)
    re = tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(re, ii))
    ri = prod(a._re, bt_im)
    ir = prod(a_im, bt_re)
    im = tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(ri, ir))
    return Matrix._from_parts(re, im, a.rows, b.cols)


def _integral_grid(m: Matrix, with_scale: bool = False):
    """Scale each row by the lcm of its denominators, giving (Gaussian) integers."""
    grid = []
    scale = mpq(1)
    for i in range(m.rows):
        dens = [x.denominator for x in m._re[i]]
        if m._im is not None:
            dens += [y.denominator for y in m._im[i]]
        d = reduce(lcm, (int(x) for x in dens), 1)
        scale *= d
        if m._im is None:
            grid.append([mpz(x * d) for x in m._re[i]])
        else:
            grid.append(
                [_elem(x * d, y * d) for x, y in zip(m._re[i], m._im[i])]
            )
    return (grid, scale) if with_scale else grid


def _bareiss(grid: list[list]) -> tuple[int, object]:
    """Fraction-free elimination in place. Returns (rank, determinant if square).

    Every division performed is exact, so integer input stays integral.
    """
    rows = len(grid)
    cols = len(grid[0]) if rows else 0
    prev = 1
    sign = 1
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if grid[i][c]), None)
        if pivot is None:
            continue
        if pivot != r:
            grid[r], grid[pivot] = grid[pivot], grid[r]
            sign = -sign
        p = grid[r][c]
        for i in range(r + 1, rows):
            gi = grid[i]
            f = gi[c]
            gr_ = grid[r]
            for j in range(c + 1, cols):
                val = p * gi[j] - f * gr_[j]
                gi[j] = _exact_div(val, prev)
            gi[c] = 0
        prev = p
        r += 1
        if r == rows:
            break
    square = rows == cols
    det = 0
    if square and r == rows:
        det = grid[rows - 1][cols - 1] * sign if rows else 1
    return r, det


def _exact_div(val, d):
    if isinstance(val, GaussRational) or isinstance(d, GaussRational):
        return gr(val) / d
    if d == 1:
        return val
    q, rem = divmod(val, d)
    assert rem == 0, "Bareiss division must be exact"
    return q


def vec(values: Iterable) -> tuple[GaussRational, ...]:
    return tuple(gr(v) for v in values)


def dot(x: Sequence[GaussRational], y: Sequence[GaussRational]) -> GaussRational:
    return sum((a * b for a, b in zip(x, y)), ZERO)


def bilinear(x: Sequence, gram: Matrix, y: Sequence) -> GaussRational:
    """x^T G y, with no conjugation (the forms here are bilinear)."""
    return dot(x, gram.apply(y))


def vec_add(x, y):
    return tuple(a + b for a, b in zip(x, y))


def vec_sub(x, y):
    return tuple(a - b for a, b in zip(x, y))


def vec_scale(c, x):
    c = gr(c)
    return tuple(c * a for a in x)


def is_zero_vector(x) -> bool:
    return not any(x)


def solve_in_span(columns: Sequence[Sequence], target: Sequence) -> list[GaussRational] | None:
    """Coefficients c with sum_i c_i columns[i] = target, or None if target is outside the span.

    The columns must be linearly independent.
    """
    a = Matrix.from_columns(list(columns))
    chosen: list[int] = []
    for r in range(a.rows):
        trial = chosen + [r]
        if a.submatrix(trial, range(a.cols)).rank() == len(trial):
            chosen = trial
        if len(chosen) == a.cols:
            break
    if len(chosen) != a.cols:
        raise ValueError("columns are linearly dependent")
    sub = a.submatrix(chosen, range(a.cols))
    sol = sub.solve(Matrix([[target[r]] for r in chosen]))
    coeffs = [sol[i, 0] for i in range(a.cols)]
    if a.apply(coeffs) != tuple(gr(x) for x in target):
        return None
    return coeffs
