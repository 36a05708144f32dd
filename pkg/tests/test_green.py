from fractions import Fraction

import pytest

from henonlab.core import ElementaryHenon, HenonMap, Point2
from henonlab.green import (
    CurveParam,
    curve_green_mass,
    escape_data,
    green,
    green_grid,
    green_total,
)
from henonlab.poly import UniPoly

F = Fraction


@pytest.fixture
def fmap():
    # (x, y) -> (y, y^2 - 1 - x/2)
    return HenonMap((ElementaryHenon(UniPoly([-1, 0, 1]), F(1, 2)),))


# frozen oracles: 60-digit orbit limits of 2^{-n} log||f^n q||, stable
# to 20 digits between n=30 and n=34
ORACLES = {
    (0, 10**6): 13.815510557963774,
    (3, 4): 1.2971652103226331,
    (0, 3): 1.0295937997446134,
}


def test_escaping_values_against_frozen_oracles(fmap):
    for (x, y), expect in ORACLES.items():
        gv = green(fmap, Point2(F(x), F(y)), "plus", tol=1e-9)
        assert gv.escaped
        assert abs(gv.value - expect) <= 1e-9 + gv.error
        assert gv.error <= 1e-9


def test_bounded_orbit_is_zero(dissipative):
    for q in (Point2(F(1), F(1)), Point2(F(1, 2), F(1, 2))):
        gv = green(dissipative, q, "plus")
        assert gv.value == 0.0
        assert not gv.escaped
        assert gv.escape_iterate is None


def test_value_nonnegative_and_error_nonnegative(fmap):
    for y in (-3, -1, 0, 2, 5):
        gv = green(fmap, Point2(F(0), F(y)), "plus")
        assert gv.value >= 0.0
        assert gv.error >= 0.0


def test_escape_data_closed_form(fmap):
    esc = escape_data(fmap, "plus")
    assert esc.radius == 4.0
    assert esc.tail_constant == pytest.approx(0.34657359027997264, abs=0, rel=0)
    # radius is a power of two by construction
    assert esc.radius == 2 ** round(__import__("math").log2(esc.radius))


def test_functional_equation(fmap):
    # G(f q) = lambda G(q) for the forward function, within stacked tol
    lam = fmap.dynamical_degree
    for y in (3, 4, 7):
        q = Point2(F(0), F(y))
        a = green(fmap, fmap.evaluate(q), "plus", tol=1e-10)
        b = green(fmap, q, "plus", tol=1e-10)
        assert abs(a.value - lam * b.value) <= 1e-8 * max(1.0, b.value)


def test_minus_direction_is_inverse_plus(fmap):
    q = Point2(F(5), F(0))
    gm = green(fmap, q, "minus", tol=1e-10)
    gp_inv = green(fmap.inverse(), q, "plus", tol=1e-10)
    assert gm.value == pytest.approx(gp_inv.value, abs=1e-9)


def test_green_total_sum(fmap):
    q = Point2(F(0), F(10**6))
    tot = green_total(fmap, q)
    assert tot.value > 13


def test_direction_validation(fmap):
    with pytest.raises(ValueError):
        green(fmap, Point2(F(0), F(0)), "sideways")
    with pytest.raises(ValueError):
        green(fmap, Point2(F(0), F(0)), "plus", tol=0.0)
    with pytest.raises(ValueError):
        green(fmap, Point2(F(0), F(0)), "plus", n_max=0)


def test_overflowed_point_rejected(fmap):
    q = Point2.numeric(float("inf"), 0.0)
    with pytest.raises(ValueError):
        green(fmap, q, "plus")


def test_grid_rows(fmap):
    rows = green_grid(fmap, (-1.0, 1.0, 3), (-1.0, 1.0, 2))
    assert len(rows) == 6
    for re, im, gp, gm, err in rows:
        assert gp >= 0.0 and gm >= 0.0 and err >= 0.0


def test_vertical_line_mass_one(conservative):
    # x constant: the curve meets infinity only at the forward point,
    # slope of the circle average of G_plus equals 1
    curve = CurveParam(UniPoly([0]), UniPoly([0, 1]))
    cm = curve_green_mass(conservative, curve, n_theta=64)
    assert abs(cm.mass - 1.0) <= 0.05
    assert not cm.flagged_nonconvergent


def test_diagonal_line_mass(conservative):
    # y = x meets infinity away from both axes; slope still 1 for the
    # forward function of the quadratic map
    curve = CurveParam(UniPoly([0, 1]), UniPoly([0, 1]))
    cm = curve_green_mass(conservative, curve, n_theta=64)
    assert cm.mass > 0.4


def test_curve_validation(conservative):
    with pytest.raises(ValueError):
        CurveParam(UniPoly([0]), UniPoly([0]))
    curve = CurveParam(UniPoly([0]), UniPoly([0, 1]))
    with pytest.raises(ValueError):
        curve_green_mass(conservative, curve, r_lo=100.0, r_hi=10.0)
