from fractions import Fraction

import pytest
from gmpy2 import mpq

from weylwit import iso_models as im
from weylwit.exact import Matrix, gr, jordan_partition

from conftest import frac


def test_n_coeffs_examples():
    assert im.n_coeffs(1, 1) == [1, 0, -1]
    assert im.n_coeffs(2, 2) == [1, 0, -2, 0, 1]
    assert im.n_coeffs(5, 0) == im.odd_n(2)


def test_x_coeffs_examples():
    assert im.x_coeffs([1, 0, -2, 0, 1], 1, 7) == [1, 0, 2, 0, 3, 0, 4]
    assert [im.odd_x(1, e) for e in range(5)] == [1, 4, 9, 16, 25]
    assert im.odd_x(0, 0) == 2


def test_f_examples():
    assert im.f_value(1, 3) == 9
    assert all(im.f_value(2, u) == u * u * (u * u - 1) // 12 for u in range(-9, 10))
    assert im.f_value(2, 3) == 6 == 2 * 2 + 2
    with pytest.raises(ValueError):
        im.f_value(-1, 0)


def test_tilde_coefficients_match_elimination():
    for p in range(7):
        assert [mpq(c) for c in im.tilde_coeffs_bar(p)] == im.solve_tilde_coeffs(p)


class TestMixedBlock:
    def test_one_one(self):
        m = im.model_mixed_block(1, 1)
        assert m.dim == 2 and m.epsilon == 1
        assert m.gram == Matrix([[0, 1], [1, 0]])
        assert m.g.det() == -1

    def test_alternating(self):
        m = im.model_mixed_block(2, 2)
        assert m.epsilon == -1 and m.dim == 4
        assert m.gram.T == m.gram.scale(-1)

    def test_jordan_three_one(self):
        m = im.model_mixed_block(3, 1)
        assert jordan_partition(m.g, 1) == [3]
        assert jordan_partition(m.g, -1) == [1]

    @pytest.mark.parametrize("a,b", [(0, 0), (2, 1), (-1, 3)])
    def test_rejects(self, a, b):
        with pytest.raises(ValueError):
            im.model_mixed_block(a, b)


class TestOddBlock:
    def test_p0(self):
        m = im.model_odd_block(0)
        assert m.dim == 1 and len(m.lines) == 1
        wt = m.tilde["w~"]
        assert all(v == 2 for v in im.profile(m.gram, m.g, wt, wt, range(-5, 6)).values())

    def test_p1(self):
        m = im.model_odd_block(1)
        assert m.gram == Matrix([[-(i - j) ** 2 for j in range(3)] for i in range(3)])
        assert m.tilde["w~"] == (gr(mpq(-1, 2)), gr(-2), gr(mpq(1, 2)))
        wt = m.tilde["w~"]
        assert im.profile(m.gram, m.g, wt, wt, [0])[0] == 2

    def test_rebuilt_table(self):
        for p in range(1, 6):
            table = im.rebuild_odd_table(p, 20)
            assert all(table[u] == (-1) ** p * im.f_value(p, u) for u in table)


class TestPairedBlocks:
    def test_shape(self):
        m = im.model_paired_odd_blocks(2, 1)
        assert m.dim == 6
        assert sorted(jordan_partition(m.g, 1)) == [1, 5]
        with pytest.raises(ValueError):
            im.model_paired_odd_blocks(1, 2)

    def test_beta_example(self):
        m = im.model_paired_odd_blocks(2, 1)
        _, xi = m.lines
        beta1 = im.profile(m.gram, m.g, xi, xi, [1])[1]
        expect = sum((-1) ** r * Fraction(4 ** (r - 1)) * im.f_value(r, 1) for r in (1, 2))
        assert frac(beta1) == expect == frac(im.xi_self(2, 1, 1))

    def test_pairing_profile_alpha_and_gamma(self):
        p1, p2 = 3, 2
        m = im.model_paired_odd_blocks(p1, p2)
        alpha = im.pairing_profile(m, 1, 1, [p1], vectors=m.lines)
        assert alpha[p1] == (-1) ** p1
        gamma = im.pairing_profile(m, 1, 2, range(-p2, 2 * p1 - p2), vectors=m.lines)
        assert all(v == 0 for v in gamma.values())

    @pytest.mark.parametrize("p1,p2", [(1, 1), (2, 1), (3, 2), (4, 4)])
    def test_uniqueness_reconstruction(self, p1, p2):
        m = im.model_paired_odd_blocks(p1, p2)
        z, xi = m.lines
        rec = im.reconstruct_paired_profiles(p1, p2, 14)
        span = range(-14, 15)
        for key, (x, y) in {"alpha": (z, z), "beta": (xi, xi), "gamma": (z, xi)}.items():
            prof = im.profile(m.gram, m.g, x, y, span)
            assert all(prof[u] == gr(rec[key][u]) for u in span), key
        assert im.model_paired_c_coeffs(p1, p2) == [gr(c) for c in im.paired_c_coeffs(p1, p2)]


def test_direct_sum_and_negate():
    parts = [im.model_mixed_block(1, 1), im.model_odd_block(1)]
    s = im.direct_sum(parts, 1)
    assert s.dim == 5 and len(s.lines) == 1 + 2
    assert s.g.T @ s.gram @ s.g == s.gram
    n = im.negate(parts[0])
    assert n.g == parts[0].g.scale(-1)
