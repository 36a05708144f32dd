from fractions import Fraction

import pytest

from henonlab.core import (
    ElementaryHenon,
    HenonMap,
    Point2,
    as_numeric_map,
    common_iterate_detect,
    compose,
    equal_symbolic,
    iterate_map,
)
from henonlab.poly import UniPoly

F = Fraction


def test_factor_validation():
    with pytest.raises(ValueError):
        ElementaryHenon(UniPoly([1, 1]), F(1))  # degree 1
    with pytest.raises(ValueError):
        ElementaryHenon(UniPoly([0, 0, 1]), F(0))  # delta 0


def test_evaluate_single_factor(dissipative):
    q = Point2(F(0), F(2))
    assert dissipative.evaluate(q) == Point2(F(2), F(9, 2))
    assert dissipative.evaluate(q, 2) == Point2(F(9, 2), F(79, 4))


def test_inverse_roundtrip(dissipative, composite):
    for f in (dissipative, composite):
        inv = f.inverse()
        for q in (Point2(F(0), F(2)), Point2(F(-1), F(3, 7)), Point2(F(1), F(1))):
            assert inv.evaluate(f.evaluate(q)) == q
            assert f.evaluate(inv.evaluate(q)) == q


def test_negative_iterates_use_inverse(dissipative):
    q = Point2(F(1, 3), F(-2))
    assert dissipative.evaluate(q, -2) == dissipative.inverse().evaluate(q, 2)
    assert dissipative.evaluate(q, 0) == q


def test_inverse_is_normal_form(composite):
    # inverse of a composition is again a list of elementary factors
    # (swap-conjugated), so its own inverse recovers the original
    inv = composite.inverse()
    assert inv.transposed != composite.transposed
    assert equal_symbolic(inv.inverse(), composite)


def test_dynamical_degree_and_jacobian(dissipative, composite):
    assert dissipative.dynamical_degree == 2
    assert composite.dynamical_degree == 6
    assert dissipative.jacobian == F(1, 2)
    assert composite.jacobian == F(-1, 6)


def test_degree_growth_of_iterates(conservative):
    # deg f^n = lambda^n, visible in the expanded second component
    for n in (1, 2, 3):
        _, b = iterate_map(conservative, n).expand(degree_cap=2**4)
        assert b.total_degree == 2**n


def test_orbit(dissipative):
    q = Point2(F(0), F(2))
    orb = dissipative.orbit(q, 3)
    assert len(orb) == 4
    assert orb[0] == q
    assert orb[1] == dissipative.evaluate(q)
    assert orb[3] == dissipative.evaluate(q, 3)


def test_differential_chain_rule(composite):
    q = Point2(F(1, 2), F(-1))
    d2 = iterate_map(composite, 2).differential(q)
    dq = composite.differential(q)
    dfq = composite.differential(composite.evaluate(q))
    prod = [
        [
            dfq[0][0] * dq[0][0] + dfq[0][1] * dq[1][0],
            dfq[0][0] * dq[0][1] + dfq[0][1] * dq[1][1],
        ],
        [
            dfq[1][0] * dq[0][0] + dfq[1][1] * dq[1][0],
            dfq[1][0] * dq[0][1] + dfq[1][1] * dq[1][1],
        ],
    ]
    assert d2 == prod


def test_differential_determinant_is_jacobian(dissipative, composite):
    for f in (dissipative, composite):
        d = f.differential(Point2(F(2), F(-3)))
        assert d[0][0] * d[1][1] - d[0][1] * d[1][0] == f.jacobian


def test_compose_and_iterate(dissipative):
    f2 = compose(dissipative, dissipative)
    assert equal_symbolic(f2, iterate_map(dissipative, 2))
    q = Point2(F(1, 5), F(3))
    assert f2.evaluate(q) == dissipative.evaluate(q, 2)


def test_equal_symbolic_detects_same_map(dissipative):
    g = HenonMap(
        (ElementaryHenon(UniPoly([F(1, 2), 0, 1]), F(1, 2)),)
    )
    assert equal_symbolic(dissipative, g)
    h = HenonMap((ElementaryHenon(UniPoly([F(1, 2), 0, 1]), F(1, 3)),))
    assert not equal_symbolic(dissipative, h)


def test_canonical_hash_ignores_presentation(dissipative):
    g = HenonMap(
        (ElementaryHenon(UniPoly([F(1, 2), F(0), F(1)]), F(1, 2)),)
    )
    assert dissipative.canonical_hash() == g.canonical_hash()
    assert dissipative.canonical_hash() != dissipative.inverse().canonical_hash()


def test_common_iterate_detect(dissipative):
    hit = common_iterate_detect(dissipative, iterate_map(dissipative, 2), 4, 4)
    assert hit is not None
    n, m = hit
    assert 2 * n == m * 1 or equal_symbolic(
        iterate_map(dissipative, n), iterate_map(iterate_map(dissipative, 2), m)
    )
    other = HenonMap((ElementaryHenon(UniPoly([0, 0, 1]), F(1)),))
    assert common_iterate_detect(dissipative, other, 3, 3) is None


def test_transposed_semantics(dissipative):
    t = HenonMap(dissipative.factors, transposed=True)
    q = Point2(F(3), F(5))
    swapped = Point2(F(5), F(3))
    out = dissipative.evaluate(swapped)
    assert t.evaluate(q) == Point2(out.y, out.x)


def test_numeric_matches_exact(composite):
    h = as_numeric_map(composite)
    q = Point2(F(1, 3), F(-2, 5))
    exact = composite.evaluate(q, 2)
    num = h.evaluate(q.to_numeric(), 2)
    assert abs(num.x - float(exact.x)) < 1e-9 * max(1.0, abs(float(exact.x)))
    assert abs(num.y - float(exact.y)) < 1e-9 * max(1.0, abs(float(exact.y)))


def test_numeric_escape_sentinel(conservative):
    h = as_numeric_map(conservative)
    q = Point2.numeric(0.0, 1e200)
    out = h.evaluate(q, 3)
    assert out.escaped  # no NaN, no OverflowError
