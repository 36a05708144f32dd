"""One-parameter families of composed plane automorphisms.

Every factor coefficient and every delta is a polynomial in a rational
parameter t. Outside the finite excluded set (parameters killing a
delta or a leading coefficient) each specialization is a valid map of
the same composed degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number

from .core import ElementaryHenon, HenonMap, NumericFactor, NumericHenon, Point2
from .poly import UniPoly, rational_roots
from .rationals import Rational, format_rational, parse_rational


@dataclass(frozen=True)
class FamilyFactor:
    """Elementary factor with coefficients in Q[t]: p_t(y) = sum c_j(t) y^j."""

    coeff_polys: tuple[UniPoly, ...]  # ascending in y, each a poly in t
    delta_poly: UniPoly

    def __post_init__(self):
        if len(self.coeff_polys) < 3:
            raise ValueError("factor degree must be >= 2")
        if self.coeff_polys[-1].is_zero:
            raise ValueError("leading coefficient vanishes identically")
        if self.delta_poly.is_zero:
            raise ValueError("delta vanishes identically")

    @property
    def degree(self) -> int:
        return len(self.coeff_polys) - 1


@dataclass(frozen=True)
class HenonFamily:
    """Composition of parameter-dependent elementary factors."""

    factors: tuple[FamilyFactor, ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("need at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def dynamical_degree(self) -> int:
        d = 1
        for a in self.factors:
            d *= a.degree
        return d

    @property
    def excluded_params(self) -> tuple[Rational, ...]:
        """Rational parameters where some delta or leading coefficient vanishes."""
        bad = set()
        for a in self.factors:
            if a.delta_poly.degree >= 1:
                bad.update(rational_roots(a.delta_poly))
            if a.coeff_polys[-1].degree >= 1:
                bad.update(rational_roots(a.coeff_polys[-1]))
        return tuple(sorted(bad))

    def jacobian_map(self) -> UniPoly:
        """Jacobian determinant of the specialization, as a polynomial in t."""
        j = UniPoly([1])
        for a in self.factors:
            j = j * a.delta_poly
        return j

    def exclusion_reason(self, b: Rational) -> str | None:
        for i, a in enumerate(self.factors):
            if a.delta_poly(b) == 0:
                return f"delta of factor {i} vanishes at t = {format_rational(b)}"
            if a.coeff_polys[-1](b) == 0:
                return (
                    f"leading coefficient of factor {i} vanishes at "
                    f"t = {format_rational(b)}"
                )
        return None

    def specialize(self, b):
        """Member map at t = b: HenonMap for exact rational b, NumericHenon
        for float/complex b. Excluded parameters raise ValueError naming
        the vanishing quantity."""
        if isinstance(b, (Fraction, int, str)):
            b = parse_rational(b)
            reason = self.exclusion_reason(b)
            if reason is not None:
                raise ValueError(f"excluded parameter: {reason}")
            return HenonMap(
                tuple(
                    ElementaryHenon(
                        UniPoly([c(b) for c in a.coeff_polys]), a.delta_poly(b)
                    )
                    for a in self.factors
                )
            )
        if isinstance(b, Number):
            b = complex(b)
            for i, a in enumerate(self.factors):
                if abs(complex(a.delta_poly(b))) < 1e-14:
                    raise ValueError(
                        f"excluded parameter: delta of factor {i} vanishes at t = {b}"
                    )
                if abs(complex(a.coeff_polys[-1](b))) < 1e-14:
                    raise ValueError(
                        f"excluded parameter: leading coefficient of factor {i} "
                        f"vanishes at t = {b}"
                    )
            return NumericHenon(
                tuple(
                    NumericFactor(
                        tuple(complex(c(b)) for c in a.coeff_polys),
                        complex(a.delta_poly(b)),
                    )
                    for a in self.factors
                )
            )
        raise TypeError(f"parameter must be rational or complex, got {type(b).__name__}")

    def evaluate_symbolic(self, q: Point2) -> tuple[UniPoly, UniPoly]:
        """One application of the family to an exact point, as polynomials
        in t. Specialization commutes: evaluating these at b equals
        specialize(b).evaluate(q)."""
        if not q.is_exact:
            raise ValueError("symbolic evaluation needs an exact point")
        x, y = UniPoly([q.x]), UniPoly([q.y])
        for a in self.factors:
            acc = UniPoly([])
            for c in reversed(a.coeff_polys):
                acc = acc * y + c
            x, y = y, acc - a.delta_poly * x
        return x, y


# -- jacobian classification ------------------------------------------


@dataclass(frozen=True)
class DissipationReport:
    """Per-sample modulus-vs-1 verdicts; the family verdict is explicitly
    sampling-based, never a proof."""

    samples: tuple
    verdicts: tuple[str, ...]  # "dissipative" | "unit" | "expanding"
    moduli: tuple[float, ...]
    family_verdict: str


def classify_dissipative(family: HenonFamily, samples) -> DissipationReport:
    """Compare |Jac|(b) with 1 at each sample.

    Exact rational samples get an exact trichotomy; complex samples use a
    1e-12 tolerance around modulus 1.
    """
    jac = family.jacobian_map()
    verdicts = []
    moduli = []
    for b in samples:
        if isinstance(b, (Fraction, int, str)):
            value = jac(parse_rational(b))
            mod = abs(value)
            verdict = "dissipative" if mod < 1 else ("unit" if mod == 1 else "expanding")
            moduli.append(float(mod))
        else:
            mod = abs(complex(jac(complex(b))))
            if mod < 1 - 1e-12:
                verdict = "dissipative"
            elif mod > 1 + 1e-12:
                verdict = "expanding"
            else:
                verdict = "unit"
            moduli.append(mod)
        verdicts.append(verdict)
    kinds = set(verdicts)
    if not verdicts:
        family_verdict = "no samples"
    elif kinds == {"dissipative"}:
        family_verdict = "dissipative on samples"
    elif kinds == {"unit"}:
        family_verdict = "unit on samples"
    elif kinds == {"expanding"}:
        family_verdict = "expanding on samples"
    else:
        family_verdict = "mixed on samples"
    return DissipationReport(tuple(samples), tuple(verdicts), tuple(moduli), family_verdict)


# -- unit-locus intersection grid -------------------------------------


@dataclass(frozen=True)
class UnitLocusResult:
    """Grid scan of {|Jac F| = 1} ∩ {|Jac G| = 1} in the complex parameter.

    Cells are flagged when both modulus-1 loci meet them (sign change of
    |Jac| - 1 over the cell corners). Counts at three nested resolutions
    drive the discreteness heuristic: a curve of intersection keeps
    multiplying flagged cells under refinement, isolated points do not.
    """

    box: tuple[float, float, float, float]
    resolutions: tuple[int, int, int]
    counts: tuple[int, int, int]
    cells: tuple[tuple[int, int], ...]  # flagged (i, j) at the finest resolution
    component_count: int
    verdict: str  # "empty" | "likely-discrete" | "likely-non-discrete"


def _flag_cells(jac_f: UniPoly, jac_g: UniPoly, box, res: int):
    re0, re1, im0, im1 = box
    corners_f = {}
    corners_g = {}
    for i in range(res + 1):
        for j in range(res + 1):
            b = complex(
                re0 + (re1 - re0) * i / res,
                im0 + (im1 - im0) * j / res,
            )
            corners_f[(i, j)] = abs(complex(jac_f(b))) - 1.0
            corners_g[(i, j)] = abs(complex(jac_g(b))) - 1.0
    flagged = []
    for i in range(res):
        for j in range(res):
            quad = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
            fv = [corners_f[k] for k in quad]
            gv = [corners_g[k] for k in quad]
            if min(fv) <= 0 <= max(fv) and min(gv) <= 0 <= max(gv):
                flagged.append((i, j))
    return flagged


def _component_count(cells) -> int:
    todo = set(cells)
    comps = 0
    while todo:
        comps += 1
        stack = [todo.pop()]
        while stack:
            i, j = stack.pop()
            for nb in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
                if nb in todo:
                    todo.remove(nb)
                    stack.append(nb)
    return comps


def unit_locus_grid(
    family_f: HenonFamily,
    family_g: HenonFamily,
    box=(-2.0, 2.0, -2.0, 2.0),
    resolution: int = 16,
) -> UnitLocusResult:
    """Scan at resolution, 2x and 4x; flagged-cell growth beyond 2x across
    the two doublings reads as a positive-dimensional intersection."""
    jf, jg = family_f.jacobian_map(), family_g.jacobian_map()
    resolutions = (resolution, 2 * resolution, 4 * resolution)
    all_cells = [_flag_cells(jf, jg, box, r) for r in resolutions]
    counts = tuple(len(c) for c in all_cells)
    finest = tuple(sorted(all_cells[-1]))
    if counts[-1] == 0:
        verdict = "empty"
    elif counts[-1] > 2 * max(counts[0], 1):
        verdict = "likely-non-discrete"
    else:
        verdict = "likely-discrete"
    return UnitLocusResult(
        box=tuple(float(v) for v in box),
        resolutions=resolutions,
        counts=counts,
        cells=finest,
        component_count=_component_count(finest),
        verdict=verdict,
    )


# -- common periodic sweep --------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    param: Rational
    count: int
    points: tuple[Point2, ...]
    max_pair_height: float | None
    shared_iterate: tuple[int, int] | None
    excluded: str | None = None
    error: str | None = None


@dataclass(frozen=True)
class SweepReport:
    """Per-parameter common periodic counts with exceptional-parameter flags.

    d_observed aggregates over rows without a shared-iterate flag; it is
    an empirical lower bound for the uniform count over the family, not
    a proof of one.
    """

    rows: tuple[SweepRow, ...]
    d_observed: int
    max_period: int
    eps: float
    seed: int
    exceptional: tuple[Rational, ...] = field(default_factory=tuple)

    def row(self, b) -> SweepRow:
        b = parse_rational(b)
        for r in self.rows:
            if r.param == b:
                return r
        raise KeyError(f"parameter {b} not in sweep")


def sweep_common_periodic(
    family_f: HenonFamily,
    family_g: HenonFamily,
    params,
    max_period: int = 2,
    eps: float = 1e-6,
    seed: int = 0,
    primes: tuple[int, int] = (101, 103),
    height_bound: int = 10**6,
    detect_bounds: tuple[int, int] = (3, 3),
) -> SweepReport:
    """Count exact common periodic points of the two member maps at each
    parameter; screen every reported point by the sum of its canonical
    heights under both maps. A failing parameter is recorded, never fatal.
    """
    from .heights import pair_small_height
    from .periodic import common_periodic

    rows = []
    exceptional = []
    for b in sorted(parse_rational(p) for p in params):
        reason = family_f.exclusion_reason(b) or family_g.exclusion_reason(b)
        if reason is not None:
            rows.append(
                SweepRow(b, 0, (), None, None, excluded=reason)
            )
            exceptional.append(b)
            continue
        try:
            fb = family_f.specialize(b)
            gb = family_g.specialize(b)
            found = common_periodic(
                fb,
                gb,
                max_period=max_period,
                primes=primes,
                height_bound=height_bound,
                detect_bounds=detect_bounds,
            )
            kept = []
            heights = []
            for q in found.exact_points:
                small, value = pair_small_height(fb, gb, q, eps=eps)
                if small:
                    kept.append(q)
                    heights.append(value)
            rows.append(
                SweepRow(
                    b,
                    len(kept),
                    tuple(kept),
                    max(heights) if heights else None,
                    found.shared_iterate,
                )
            )
            if found.shared_iterate is not None:
                exceptional.append(b)
        except Exception as exc:  # isolate per-parameter failures
            rows.append(SweepRow(b, 0, (), None, None, error=str(exc)))
            exceptional.append(b)
    d_observed = 0
    for r in rows:
        if r.shared_iterate is None and r.excluded is None and r.error is None:
            d_observed = max(d_observed, r.count)
    return SweepReport(
        rows=tuple(rows),
        d_observed=d_observed,
        max_period=max_period,
        eps=eps,
        seed=seed,
        exceptional=tuple(exceptional),
    )
