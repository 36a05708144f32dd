"""Exact fixed-point counts via resultants.

Independent consistency oracle for the Newton and mod-p routes: expand
the n-th iterate symbolically, eliminate one variable, and read the
count with multiplicity off the degree of the eliminant.  Kept separate
from the iterative machinery on purpose so the two never share code
paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy

from .core import HenonMap, Point2, iterate_map
from .poly import BiPoly, DegreeCapExceeded

__all__ = ["ResultantCount", "fixed_points_exact_resultant"]

_X, _Y = sympy.symbols("x y")


def _bipoly_to_sympy(p: BiPoly):
    acc = sympy.Integer(0)
    for (i, j), c in sorted(p.terms.items()):
        acc += sympy.Rational(c.numerator, c.denominator) * _X**i * _Y**j
    return acc


@dataclass(frozen=True)
class ResultantCount:
    period: int
    count: int  # with multiplicity, equals the eliminant degree
    rational_points: tuple[Point2, ...]


def fixed_points_exact_resultant(
    f: HenonMap, n: int = 1, degree_cap: int = 64
) -> ResultantCount:
    """Count the fixed points of the n-th iterate with multiplicity and
    list the rational ones.

    Eliminates x from the pair of fixed-point equations; the y-eliminant
    has degree lambda^n for these maps.  Rational solutions come from
    exact factorization, then back-substitution, then verification by
    exact iteration.  Degrees beyond the cap are refused outright rather
    than attempted.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lam = f.dynamical_degree
    if lam**n > degree_cap:
        raise DegreeCapExceeded(
            f"iterate degree {lam**n} exceeds cap {degree_cap}"
        )
    fn = iterate_map(f, n)
    a, b = fn.expand(degree_cap=2 * lam**n)
    ex = _bipoly_to_sympy(a) - _X
    ey = _bipoly_to_sympy(b) - _Y

    res = sympy.resultant(ex, ey, _X)
    poly = sympy.Poly(sympy.expand(res), _Y)
    count = poly.degree()

    points: list[Point2] = []
    yroots = sympy.roots(poly, filter="Q")
    for y0 in sorted(yroots, key=lambda r: Fraction(int(r.p), int(r.q))):
        yq = Fraction(int(y0.p), int(y0.q))
        # x-values: common roots of both specialized equations
        gx = sympy.gcd(
            sympy.Poly(ex.subs(_Y, y0), _X), sympy.Poly(ey.subs(_Y, y0), _X)
        )
        gx = sympy.Poly(gx, _X)
        if gx.degree() < 1:
            continue
        for x0 in sympy.roots(gx, filter="Q"):
            q = Point2(Fraction(int(x0.p), int(x0.q)), yq)
            if f.evaluate(q, n) == q:
                points.append(q)
    points.sort(key=lambda q: (q.x, q.y))
    return ResultantCount(n, int(count), tuple(points))
