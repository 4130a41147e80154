import numpy as np
import pytest

from weylwit.weyl import (
    EnumerationBudget, UnsupportedType, WeylElement, build_weyl, cyclic_shift_minimize,
    enumerate_classes, find_elliptic_rep, format_factors, rows_for,
)
from weylwit.weyl.element import factor_cyclotomic, negate_factors, power_factors
from weylwit.weyl.roots import classical_order, parse_type

SMALL_TYPES = ["A1", "A3", "B2", "B3", "C3", "D4", "G2", "F4"]


@pytest.mark.parametrize("label", ["A4", "B4", "C4", "D5", "G2", "F4", "E6", "E7", "E8"])
def test_order_and_exponents(label):
    w = build_weyl(label)
    assert w.order() == classical_order(w.letter, w.rank)
    ex = w.exponents()
    assert len(ex) == w.rank and ex[0] == 1
    assert max(ex) + 1 == w.coxeter_number()
    assert w.n_positive == sum(ex)


def test_coxeter_numbers():
    assert [build_weyl(x).coxeter_number() for x in ("G2", "F4", "E6", "E7", "E8")] == [6, 12, 12, 18, 30]


@pytest.mark.parametrize("label", SMALL_TYPES)
def test_coxeter_element(label):
    system = build_weyl(label)
    c = WeylElement.coxeter(system)
    h = system.coxeter_number()
    assert c.length() == system.rank
    assert c.order() == h
    assert c.is_elliptic()


def test_longest_element():
    g2 = build_weyl("G2")
    w0 = WeylElement(g2, g2.longest_element())
    assert w0.length() == 6 == g2.n_positive
    assert w0.factors() == ((2, 2),)


def test_words_and_inverse():
    system = build_weyl("F4")
    w = WeylElement.from_word(system, [0, 1, 2, 1, 3, 2])
    assert WeylElement.from_word(system, w.reduced_word()).matrix.tolist() == w.matrix.tolist()
    assert len(w.reduced_word()) == w.length()
    prod = w.matrix @ w.inverse().matrix
    assert np.array_equal(prod, np.eye(4, dtype=prod.dtype))
    assert w.inverse().length() == w.length()


def test_cyclotomic_helpers():
    assert factor_cyclotomic((1, -1, 1)) == ((6, 1),)
    assert power_factors(((6, 1),), 2) == ((3, 1),)
    assert negate_factors(((3, 1), (4, 2))) == ((4, 2), (6, 1))
    assert format_factors(((2, 2), (14, 1))) == "Phi2^2*Phi14"
    assert format_factors(()) == "1"


class TestParseType:
    def test_accepts(self):
        assert parse_type("e8") == ("E", 8)
        assert parse_type(" B_3 ") == ("B", 3)

    @pytest.mark.parametrize("bad", ["E9", "D3", "B1", "G3", "X2", "", "A0"])
    def test_rejects(self, bad):
        with pytest.raises(UnsupportedType):
            parse_type(bad)


class TestClasses:
    def test_class_counts(self):
        assert len(enumerate_classes(build_weyl("B3"))) == 10
        assert len(enumerate_classes(build_weyl("A4"))) == 7
        assert len(enumerate_classes(build_weyl("G2"))) == 6

    def test_sizes_add_up(self):
        system = build_weyl("D4")
        classes = enumerate_classes(system)
        assert sum(c.size for c in classes) == system.order()
        assert len(classes) == 13

    def test_budget(self):
        with pytest.raises(EnumerationBudget):
            enumerate_classes(build_weyl("E8"), limit=10**5)


class TestSearch:
    def test_g2_rows(self):
        system = build_weyl("G2")
        r6 = find_elliptic_rep(system, {6: 1}, budget=10**4, seed=1)
        assert r6.found and r6.element.length() == 2
        r3 = find_elliptic_rep(system, {3: 1}, budget=10**4, seed=1)
        assert r3.found and r3.element.length() == 4

    def test_f4_phi4_squared(self):
        res = find_elliptic_rep(build_weyl("F4"), {4: 2}, budget=10**5, seed=0)
        assert res.found and res.element.length() == 12

    def test_e8_coxeter_class(self):
        res = find_elliptic_rep(build_weyl("E8"), {30: 1}, budget=10**6, seed=0)
        assert res.found and res.element.length() == 8

    def test_deterministic(self):
        system = build_weyl("F4")
        a = find_elliptic_rep(system, {8: 1}, budget=10**5, seed=9)
        b = find_elliptic_rep(system, {8: 1}, budget=10**5, seed=9)
        assert a.element.reduced_word() == b.element.reduced_word()
        assert (a.samples, a.steps) == (b.samples, b.steps)

    def test_degree_mismatch(self):
        with pytest.raises(ValueError):
            find_elliptic_rep(build_weyl("G2"), {4: 2})

    def test_cyclic_shift_never_increases_length(self):
        system = build_weyl("F4")
        w = WeylElement.from_word(system, [0, 1, 2, 3, 2, 1, 0, 3, 2])
        assert cyclic_shift_minimize(w, seed=2).length() <= w.length()
        assert cyclic_shift_minimize(w, seed=2).factors() == w.factors()


def test_embedded_rows_are_consistent():
    for label in ("G2", "F4", "E6", "E7", "E8"):
        rank = build_weyl(label).rank
        for row in rows_for(label):
            assert row.degree() == rank
            assert all(d != 1 for d, _ in row.factors)
