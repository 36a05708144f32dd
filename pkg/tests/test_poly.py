from fractions import Fraction

import pytest

from henonlab.poly import BiPoly, DegreeCapExceeded, UniPoly


def test_unipoly_eval_exact_and_float():
    p = UniPoly([Fraction(1, 2), 0, 1])  # y^2 + 1/2
    assert p(Fraction(2)) == Fraction(9, 2)
    assert p(2.0) == 4.5
    assert p(1j) == -0.5 + 0j


def test_unipoly_trims_leading_zeros():
    p = UniPoly([1, 2, 0, 0])
    assert p.degree == 1
    assert p.coeffs == (Fraction(1), Fraction(2))


def test_unipoly_derivative():
    p = UniPoly([5, 0, -1, 2])  # 2y^3 - y^2 + 5
    assert p.derivative().coeffs == (Fraction(0), Fraction(-2), Fraction(6))


def test_bipoly_arithmetic():
    x = BiPoly.var_x()
    y = BiPoly.var_y()
    q = (x + y) * (x - y)
    assert q.terms == {(2, 0): Fraction(1), (0, 2): Fraction(-1)}
    assert q.evaluate(Fraction(3), Fraction(2)) == 5


def test_bipoly_compose_univariate():
    # generic Horner: a UniPoly applied to a BiPoly expands symbolically
    y = BiPoly.var_y()
    p = UniPoly([1, 0, 1])  # t^2 + 1
    q = p(y)
    assert q.evaluate(Fraction(0), Fraction(3)) == 10


def test_expand_degree_cap(conservative):
    from henonlab.core import iterate_map

    with pytest.raises(DegreeCapExceeded):
        iterate_map(conservative, 6).expand(degree_cap=32)


def test_total_degree():
    x, y = BiPoly.var_x(), BiPoly.var_y()
    q = x * x * y + y * y
    assert q.total_degree == 3
