"""Property-based invariants over randomly drawn maps and points."""

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from henonlab.core import ElementaryHenon, HenonMap, Point2
from henonlab.green import green
from henonlab.padic import padic_green
from henonlab.poly import UniPoly
from henonlab.rationals import rational_reconstruct

F = Fraction

small_rational = st.fractions(
    min_value=F(-4), max_value=F(4), max_denominator=6
)
nonzero_rational = small_rational.filter(lambda q: q != 0)


@st.composite
def quadratic_maps(draw):
    c0 = draw(small_rational)
    c1 = draw(small_rational)
    delta = draw(nonzero_rational)
    return HenonMap((ElementaryHenon(UniPoly([c0, c1, 1]), delta),))


@st.composite
def points(draw):
    return Point2(draw(small_rational), draw(small_rational))


@given(quadratic_maps(), points())
@settings(max_examples=60, deadline=None)
def test_inverse_cancels(f, q):
    assert f.inverse().evaluate(f.evaluate(q)) == q


@given(quadratic_maps(), points())
@settings(max_examples=60, deadline=None)
def test_jacobian_is_differential_determinant(f, q):
    d = f.differential(q)
    assert d[0][0] * d[1][1] - d[0][1] * d[1][0] == f.jacobian


@given(quadratic_maps(), points())
@settings(max_examples=30, deadline=None)
def test_green_functional_equation(f, q):
    # G(f q) = 2 G(q) within stacked tolerances, escaping or not
    a = green(f, q, "plus", tol=1e-10, n_max=256)
    b = green(f, f.evaluate(q), "plus", tol=1e-10, n_max=256)
    if a.escaped and b.escaped:
        assert abs(b.value - 2 * a.value) <= 1e-7 * max(1.0, a.value)


@given(quadratic_maps(), points(), st.sampled_from([2, 3, 5, 7]))
@settings(max_examples=40, deadline=None)
def test_padic_nonnegative_and_scaling(f, q, p):
    gv = padic_green(f, q, p, n_max=64, bit_cap=20_000)
    assert gv.multiple >= 0
    if gv.exact and gv.multiple > 0:
        nxt = padic_green(f, f.evaluate(q), p, n_max=64, bit_cap=40_000)
        if nxt.exact:
            assert nxt.multiple == 2 * gv.multiple


@given(st.integers(min_value=-50, max_value=50),
       st.integers(min_value=1, max_value=50))
@settings(max_examples=80, deadline=None)
def test_rational_reconstruct_inverts_encoding(a, b):
    m = 101 * 103 * 107
    f = F(a, b)
    a, b = f.numerator, f.denominator
    t = (a * pow(b, -1, m)) % m
    assert rational_reconstruct(t, m) == (a, b)


@given(points())
@settings(max_examples=30, deadline=None)
def test_modp_reduction_commutes_with_evaluation(q):
    # the orbit table mod p agrees with exact evaluation followed by
    # reduction, whenever the point reduces
    from henonlab.periodic import periodic_modp

    f = HenonMap((ElementaryHenon(UniPoly([F(1, 2), 0, 1]), F(1, 2)),))
    p = 7
    if q.x.denominator % p == 0 or q.y.denominator % p == 0:
        return
    img = f.evaluate(q)
    if img.x.denominator % p == 0 or img.y.denominator % p == 0:
        return
    cycles = periodic_modp(f, p)
    assert cycles.total_length == p * p
