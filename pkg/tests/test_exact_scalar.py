import random
from fractions import Fraction

import pytest
from gmpy2 import mpq

from weylwit.exact import (
    GaussRational, I, Matrix, NotCyclotomic, Poly, char_poly, cyclotomic, cyclotomic_factorization,
    cyclotomic_product, gr, jordan_partition, nth_roots, rational_sqrt, solve_in_span,
)


def fraction_det(rows):
    """Plain Gaussian elimination over Fractions, used as an oracle."""
    a = [[Fraction(x) for x in r] for r in rows]
    n, det = len(a), Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


class TestGaussRational:
    def test_field_operations(self):
        z = GaussRational(mpq(1, 2), mpq(-3))
        assert z * z.inverse() == 1
        assert (z + z.conjugate()).is_real()
        assert z.norm() == mpq(1, 4) + 9
        assert I * I == -1

    def test_sqrt(self):
        assert gr(mpq(9, 4)).sqrt() == gr(mpq(3, 2))
        assert gr(-4).sqrt() in (2 * I, -2 * I)
        assert gr(2).sqrt() is None
        assert rational_sqrt(mpq(2)) is None

    def test_json_round_trip(self):
        for z in (gr(0), gr(mpq(-7, 3)), GaussRational(mpq(1), mpq(5, 2))):
            assert GaussRational.from_json(z.to_json()) == z

    def test_nth_roots_are_exact(self):
        roots = nth_roots(gr(16), 4)
        assert set(roots) == {gr(2), gr(-2), 2 * I, -2 * I}
        assert roots[0] == gr(2)
        assert nth_roots(gr(2), 2) == []
        assert all(r ** 3 == gr(mpq(-27, 8)) for r in nth_roots(gr(mpq(-27, 8)), 3))


class TestMatrix:
    def test_spec_examples(self):
        m = Matrix([[1, 2], [3, 4]])
        assert Matrix.identity(2) @ m == m
        swap = Matrix([[0, 1], [1, 0]])
        assert (swap @ swap).is_identity()
        assert Matrix([[mpq(2, 3)]]) @ Matrix([[mpq(3, 2)]]) == Matrix([[1]])

    @pytest.mark.parametrize("seed", range(5))
    def test_det_and_inverse_against_fraction_oracle(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 6)
        rows = [[Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        m = Matrix([[mpq(x.numerator, x.denominator) for x in r] for r in rows])
        d = m.det()
        assert Fraction(int(d.re.numerator), int(d.re.denominator)) == fraction_det(rows)
        if d:
            assert (m @ m.inverse()).is_identity()

    def test_nullspace_and_rank(self):
        m = Matrix([[1, 2, 3], [2, 4, 6]])
        assert m.rank() == 1
        for v in m.nullspace():
            assert not any(m.apply(v))

    def test_solve_in_span(self):
        cols = [(gr(1), gr(0), gr(1)), (gr(0), gr(1), gr(1))]
        assert solve_in_span(cols, (gr(2), gr(3), gr(5))) == [gr(2), gr(3)]
        assert solve_in_span(cols, (gr(1), gr(1), gr(0))) is None

    def test_json_round_trip(self):
        m = Matrix([[1, mpq(1, 2)], [I, 0]])
        assert Matrix.from_json(m.to_json()) == m


class TestPolynomials:
    def test_char_poly_examples(self):
        assert char_poly(Matrix.identity(2)) == Poly([1, -2, 1])
        assert char_poly(Matrix([[0, -1], [1, 1]])) == Poly(cyclotomic(6))
        assert char_poly(Matrix.diagonal([2, 3])) == Poly([6, -5, 1])

    def test_jordan_partition_examples(self):
        nil = Matrix([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
        assert jordan_partition(nil, 0) == [3]
        assert jordan_partition(Matrix.identity(4), 1) == [1, 1, 1, 1]
        assert jordan_partition(Matrix.identity(2), 5) == []

    def test_cyclotomic_factorization(self):
        assert cyclotomic_factorization(Poly([1, -1, 1])) == {6: 1}
        p = Poly([1, 1, 1]) * Poly([1, -1]) * Poly([1, -1])
        assert cyclotomic_factorization(p) == {3: 1, 1: 2}
        assert cyclotomic_product({3: 1, 1: 2}) == p
        with pytest.raises(NotCyclotomic):
            cyclotomic_factorization(Poly([-2, 0, 1]))

    def test_cyclotomic_degrees(self):
        assert [len(cyclotomic(d)) - 1 for d in (1, 2, 3, 4, 5, 6, 12, 30)] == [1, 1, 2, 2, 4, 2, 4, 8]
