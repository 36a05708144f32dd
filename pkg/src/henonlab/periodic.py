"""Periodic-point enumeration, exact and numeric.

Exact route: reduce the map over a small prime field, read every cycle
off the finite orbit table, Newton-lift candidate cycles to high prime
power precision, reconstruct rationals, and keep only points that close
up under exact iteration.  Everything reported by this route is
certified; completeness is approached by intersecting the results of
two independent primes.

Numeric route: damped-free Newton on f^n(z) - z from seeded random
starts inside the escape radius, with multiplier-based classification.
Coverage is heuristic and reported as found/expected.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import hypot

import numpy as np
import sympy

from . import kernels
from .core import (
    HenonMap,
    NumericHenon,
    Point2,
    as_numeric_map,
    common_iterate_detect,
    equal_symbolic,
)
from .green import escape_data

__all__ = [
    "Cycle",
    "ModPCycle",
    "ModPCycleSet",
    "LiftOutcome",
    "RationalPeriodicReport",
    "NumericPeriodicResult",
    "CommonPeriodicResult",
    "periodic_modp",
    "hensel_lift",
    "rational_periodic_points",
    "periodic_numeric",
    "common_periodic",
]


@dataclass(frozen=True)
class Cycle:
    """One periodic orbit; points listed in orbit order, period minimal."""

    points: tuple[Point2, ...]
    period: int
    multipliers: tuple[float, float] | None = None
    classification: str = "undetermined"

    def __post_init__(self):
        if self.period != len(self.points):
            raise ValueError("period must equal the number of orbit points")


@dataclass(frozen=True)
class ModPCycle:
    prime: int
    points: tuple[tuple[int, int], ...]  # orbit order, starts at smallest index

    @property
    def length(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class ModPCycleSet:
    prime: int
    cycles: tuple[ModPCycle, ...]
    good_reduction: bool

    @property
    def total_length(self) -> int:
        return sum(c.length for c in self.cycles)

    def up_to(self, max_period: int) -> tuple[ModPCycle, ...]:
        return tuple(c for c in self.cycles if c.length <= max_period)


def _reduced_arrays(f: HenonMap, p: int):
    degs, off, cmod, dmod = [], [], [], []
    pos = 0
    good = True
    for a in f.factors:
        if a.delta.denominator % p == 0 or a.delta.numerator % p == 0:
            good = False
        for c in a.poly.coeffs + (a.delta,):
            if c.denominator % p == 0:
                raise ValueError(
                    f"map is not reducible mod {p}: denominator {c.denominator}"
                )
        degs.append(a.poly.degree)
        off.append(pos)
        for c in a.poly.coeffs:
            cmod.append((c.numerator * pow(c.denominator, -1, p)) % p)
        pos += a.poly.degree + 1
        dmod.append((a.delta.numerator * pow(a.delta.denominator, -1, p)) % p)
    to_arr = lambda v: np.asarray(v, dtype=np.int64)
    return to_arr(degs), to_arr(off), to_arr(cmod), to_arr(dmod), good


def periodic_modp(f: HenonMap, p: int, max_period: int | None = None) -> ModPCycleSet:
    """All cycles of the reduction of f over the p-element field.

    With invertible reduction the table is a permutation of the p^2
    points and cycle lengths sum to p^2; a delta that vanishes mod p
    drops invertibility and the sum may fall short (flagged by
    good_reduction=False).
    """
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    degs, off, cmod, dmod, good = _reduced_arrays(f, p)
    table = np.asarray(kernels.modp_next_table(p, degs, off, cmod, dmod))
    if f.transposed:
        # conjugate by the coordinate swap: g(x,y) = swap(F(y,x))
        idx = np.arange(p * p, dtype=np.int64)
        swapped = (idx % p) * p + idx // p
        img = table[swapped]
        table = (img % p) * p + img // p

    color = np.zeros(p * p, dtype=np.uint8)  # 0 new, 1 on path, 2 done
    cycles = []
    for start in range(p * p):
        if color[start]:
            continue
        path = []
        pos: dict[int, int] = {}
        v = start
        while True:
            if color[v] == 2:
                break
            if color[v] == 1:
                cycles.append(path[pos[v] :])
                break
            color[v] = 1
            pos[v] = len(path)
            path.append(v)
            v = int(table[v])
        for u in path:
            color[u] = 2

    canon = []
    for cyc in cycles:
        k = cyc.index(min(cyc))
        rotated = cyc[k:] + cyc[:k]
        canon.append(
            ModPCycle(p, tuple((v // p, v % p) for v in rotated))
        )
    canon.sort(key=lambda c: (c.length, c.points[0]))
    out = ModPCycleSet(p, tuple(canon), good)
    if max_period is not None:
        return ModPCycleSet(p, out.up_to(max_period), good)
    return out


# ---------------------------------------------------------------------------
# modular evaluation at prime-power precision


def _mod_factors(f: HenonMap, m: int):
    fac = []
    for a in f.factors:
        coeffs = tuple(
            (c.numerator * pow(c.denominator, -1, m)) % m for c in a.poly.coeffs
        )
        delta = (a.delta.numerator * pow(a.delta.denominator, -1, m)) % m
        fac.append((coeffs, delta))
    return fac


def _apply_mod(fac, transposed: bool, x: int, y: int, m: int) -> tuple[int, int]:
    if transposed:
        x, y = y, x
    for coeffs, delta in fac:
        acc = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            acc = (acc * y + c) % m
        x, y = y, (acc - delta * x) % m
    if transposed:
        x, y = y, x
    return x, y


def _iterate_with_diff_mod(fac, transposed, x, y, m, n):
    """n-fold image and the 2x2 differential of the n-th iterate, mod m."""
    a, b, c, d = 1, 0, 0, 1
    if transposed:
        x, y = y, x
    for _ in range(n):
        for coeffs, delta in fac:
            dp = 0
            for j in range(len(coeffs) - 1, 0, -1):
                dp = (dp * y + j * coeffs[j]) % m
            # left-multiply by the factor differential [[0,1],[-delta,dp]]
            a, b, c, d = c, d, (-delta * a + dp * c) % m, (-delta * b + dp * d) % m
            acc = coeffs[-1]
            for cf in reversed(coeffs[:-1]):
                acc = (acc * y + cf) % m
            x, y = y, (acc - delta * x) % m
    if transposed:
        x, y = y, x
        a, b, c, d = d, c, b, a
    return x, y, (a, b, c, d)


@dataclass(frozen=True)
class LiftOutcome:
    """Result of lifting one mod-p cycle at one target period."""

    cycle: ModPCycle
    period: int
    points: tuple[Point2, ...]
    skipped: bool = False
    reason: str | None = None


def _rational_reconstruct(t: int, m: int):
    # half-extended Euclid; success iff numerator and denominator fit
    # under sqrt(m/2)
    from .rationals import rational_reconstruct

    return rational_reconstruct(t, m)


def hensel_lift(
    f: HenonMap,
    cycle: ModPCycle,
    precision_bits: int | None = None,
    height_bound: int = 10**6,
    period: int | None = None,
) -> LiftOutcome:
    """Lift a mod-p cycle to an exact rational cycle, or learn there is
    none at this height.

    Newton precision doubles until the modulus exceeds twice the square
    of the height bound, which makes rational reconstruction injective
    on the candidates it can represent.  Returned points are verified by
    exact iteration, so a non-empty result is a certificate.  A cycle
    whose linearization is singular mod p cannot be lifted this way and
    is reported as skipped.
    """
    p = cycle.prime
    n = cycle.length if period is None else period
    if n % cycle.length != 0:
        raise ValueError("target period must be a multiple of the cycle length")
    target = 2 * height_bound * height_bound + 1
    if precision_bits is not None:
        target = max(target, 1 << precision_bits)

    x, y = cycle.points[0]
    fac = _mod_factors(f, p)
    fx, fy, (a, b, c, d) = _iterate_with_diff_mod(fac, f.transposed, x, y, p, n)
    if (fx - x) % p or (fy - y) % p:
        raise ValueError("cycle does not close mod p at the target period")
    det = ((a - 1) * (d - 1) - b * c) % p
    if det == 0:
        return LiftOutcome(
            cycle, n, (), skipped=True,
            reason=f"singular linearization mod {p} at period {n}",
        )

    m = p
    while m < target:
        m = m * m
        fac_m = _mod_factors(f, m)
        fx, fy, (a, b, c, d) = _iterate_with_diff_mod(fac_m, f.transposed, x, y, m, n)
        rx, ry = (fx - x) % m, (fy - y) % m
        ja, jb, jc, jd = (a - 1) % m, b % m, c % m, (d - 1) % m
        inv_det = pow((ja * jd - jb * jc) % m, -1, m)
        ux = (inv_det * (jd * rx - jb * ry)) % m
        uy = (inv_det * (-jc * rx + ja * ry)) % m
        x, y = (x - ux) % m, (y - uy) % m

    recon_x = _rational_reconstruct(x, m)
    recon_y = _rational_reconstruct(y, m)
    if recon_x is None or recon_y is None:
        return LiftOutcome(cycle, n, ())  # no rational point of this height
    q = Point2(Fraction(*recon_x), Fraction(*recon_y))

    orbit = [q]
    z = q
    for _ in range(n - 1):
        z = f.evaluate(z)
        orbit.append(z)
    if f.evaluate(z) != q:
        return LiftOutcome(cycle, n, ())
    # trim to the minimal period (a divisor of n)
    t = n
    for div in range(1, n):
        if n % div == 0 and orbit[div] == q:
            t = div
            break
    return LiftOutcome(cycle, n, tuple(orbit[:t]))


def _orbit_cycle(f: HenonMap, q: Point2, max_period: int) -> Cycle | None:
    """Exact orbit of q as a Cycle if it closes within max_period."""
    orbit = [q]
    z = q
    for _ in range(max_period):
        z = f.evaluate(z)
        if z == q:
            break
        orbit.append(z)
    else:
        return None
    mult, cls = _classify_exact(f, orbit)
    return Cycle(tuple(orbit), len(orbit), mult, cls)


def _classify_exact(f: HenonMap, orbit) -> tuple[tuple[float, float], str]:
    # multipliers from the exact differential around the orbit
    m = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    for z in orbit:
        j = f.differential(z)
        m = (
            (
                j[0][0] * m[0][0] + j[0][1] * m[1][0],
                j[0][0] * m[0][1] + j[0][1] * m[1][1],
            ),
            (
                j[1][0] * m[0][0] + j[1][1] * m[1][0],
                j[1][0] * m[0][1] + j[1][1] * m[1][1],
            ),
        )
    tr = complex(m[0][0] + m[1][1])
    det = complex(m[0][0] * m[1][1] - m[0][1] * m[1][0])
    return _eig_classify(tr, det)


def _eig_classify(tr: complex, det: complex) -> tuple[tuple[float, float], str]:
    disc = (tr * tr - 4 * det) ** 0.5
    e1, e2 = (tr + disc) / 2, (tr - disc) / 2
    mags = sorted((abs(e1), abs(e2)), reverse=True)
    hi, lo = mags
    if hi > 1 + 1e-6 and lo < 1 - 1e-6:
        cls = "saddle"
    elif hi < 1 - 1e-6:
        cls = "attracting"
    elif lo > 1 + 1e-6:
        cls = "repelling-like"
    else:
        cls = "undetermined"
    return (hi, lo), cls


@dataclass(frozen=True)
class RationalPeriodicReport:
    cycles: tuple[Cycle, ...]
    primes: tuple[int, ...]
    max_period: int
    height_bound: int
    skipped: tuple[str, ...] = ()

    @property
    def points(self) -> tuple[Point2, ...]:
        out = []
        for c in self.cycles:
            out.extend(c.points)
        return tuple(sorted(out, key=lambda q: (q.x, q.y)))


def rational_periodic_points(
    f: HenonMap,
    max_period: int = 2,
    primes: tuple[int, ...] = (101, 103),
    height_bound: int = 10**6,
) -> RationalPeriodicReport:
    """Certified rational periodic points of period <= max_period.

    Each prime independently produces a verified candidate set; the
    report carries their intersection, since a rational periodic point
    of bounded height must show up at every good prime.  Singular-
    linearization skips are listed so a thin intersection can be told
    apart from a certified-empty one.
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    sets: list[set[Point2]] = []
    skipped: list[str] = []
    usable: list[int] = []
    for p in primes:
        if not sympy.isprime(p):
            raise ValueError(f"{p} is not prime")
        try:
            mps = periodic_modp(f, p)
        except ValueError as exc:
            # coefficient denominator divisible by p: no reduction exists
            skipped.append(f"prime {p}: {exc}")
            continue
        if not mps.good_reduction:
            skipped.append(f"prime {p}: bad reduction, not used for certification")
            continue
        usable.append(p)
        pts: set[Point2] = set()
        for cyc in mps.up_to(max_period):
            for n in range(cyc.length, max_period + 1, cyc.length):
                outcome = hensel_lift(f, cyc, height_bound=height_bound, period=n)
                if outcome.skipped:
                    skipped.append(outcome.reason)
                pts.update(outcome.points)
        sets.append(pts)
    if not sets:
        raise ValueError("no usable prime: all reductions were bad")
    common = set.intersection(*sets)

    cycles = []
    seen: set[Point2] = set()
    for q in sorted(common, key=lambda q: (q.x, q.y)):
        if q in seen:
            continue
        cyc = _orbit_cycle(f, q, max_period)
        if cyc is None:
            continue  # orbit leaves the intersection-certified set
        seen.update(cyc.points)
        cycles.append(cyc)
    cycles.sort(key=lambda c: (c.period, c.points[0].x, c.points[0].y))
    return RationalPeriodicReport(
        tuple(cycles), tuple(usable), max_period, height_bound, tuple(skipped)
    )


# ---------------------------------------------------------------------------
# numeric route


def _numeric_step_with_diff(fn: NumericHenon, x, y, a, b, c, d):
    """One application of the numeric map, differential carried along."""
    if fn.transposed:
        x, y = y, x
        a, b, c, d = d, c, b, a
    for fac in fn.factors:
        cs = fac.coeffs
        dp = 0j
        for j in range(len(cs) - 1, 0, -1):
            dp = dp * y + j * cs[j]
        a, b, c, d = c, d, -fac.delta * a + dp * c, -fac.delta * b + dp * d
        acc = cs[-1]
        for cf in reversed(cs[:-1]):
            acc = acc * y + cf
        x, y = y, acc - fac.delta * x
    if fn.transposed:
        x, y = y, x
        a, b, c, d = d, c, b, a
    return x, y, a, b, c, d


def _numeric_iterate_diff(fn: NumericHenon, x, y, n):
    a, b, c, d = 1 + 0j, 0j, 0j, 1 + 0j
    for _ in range(n):
        x, y, a, b, c, d = _numeric_step_with_diff(fn, x, y, a, b, c, d)
        if not (abs(x) < 1e100 and abs(y) < 1e100):
            return None
    return x, y, a, b, c, d


@dataclass(frozen=True)
class NumericPeriodicResult:
    """Cycles of period dividing n found by Newton, with heuristic
    coverage = solutions found / expected count with multiplicity."""

    cycles: tuple[Cycle, ...]
    period: int
    expected: int
    found: int
    seed: int

    @property
    def coverage(self) -> float:
        return self.found / self.expected if self.expected else 1.0

    def __iter__(self):
        return iter(self.cycles)

    def __len__(self):
        return len(self.cycles)


def _shooting_newton(fn: NumericHenon, n: int, init, step_cap: float):
    """Newton on the cyclic orbit system f(z_k) = z_{k+1 mod n}.

    Solving for the whole orbit at once keeps the linearization
    conditioned like one application of the map instead of n of them,
    which is what lets far-away starts converge at all for larger n.
    """
    z = np.empty(2 * n, dtype=np.complex128)
    for k, (x, y) in enumerate(init):
        z[2 * k] = x
        z[2 * k + 1] = y
    for _ in range(80):
        rhs = np.empty(2 * n, dtype=np.complex128)
        jac = np.zeros((2 * n, 2 * n), dtype=np.complex128)
        for k in range(n):
            x, y = complex(z[2 * k]), complex(z[2 * k + 1])
            px, py, a, b, c, d = _numeric_step_with_diff(
                fn, x, y, 1 + 0j, 0j, 0j, 1 + 0j
            )
            nxt = (k + 1) % n
            rhs[2 * k] = px - z[2 * nxt]
            rhs[2 * k + 1] = py - z[2 * nxt + 1]
            jac[2 * k, 2 * k] += a
            jac[2 * k, 2 * k + 1] += b
            jac[2 * k + 1, 2 * k] += c
            jac[2 * k + 1, 2 * k + 1] += d
            jac[2 * k, 2 * nxt] -= 1
            jac[2 * k + 1, 2 * nxt + 1] -= 1
        if not (np.all(np.isfinite(rhs.view(np.float64)))
                and np.all(np.isfinite(jac.view(np.float64)))):
            return None
        try:
            u = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError:
            return None
        s = float(np.max(np.abs(u)))
        if s > step_cap:
            u *= step_cap / s
        z -= u
        if float(np.max(np.abs(z))) > 1e8:
            return None
        if s < 1e-13 * (1.0 + float(np.max(np.abs(z)))):
            return complex(z[0]), complex(z[1])
    return None


def periodic_numeric(
    f,
    n: int,
    tol: float = 1e-9,
    n_starts: int = 64,
    seed: int = 0,
) -> NumericPeriodicResult:
    """Newton solves f^n(z) = z from seeded random complex starts.

    One cyclic-shooting sweep runs per divisor of n, so points of every
    minimal period dividing n are searched at their natural window
    length.  Roots are deduplicated at 10*tol, grouped into orbits, and
    classified by the multiplier magnitudes of the differential around
    the cycle.  Heuristic completeness only.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    fn = as_numeric_map(f)
    r_box = 1.0
    try:
        r_box = max(
            escape_data(f, "plus").radius, escape_data(f, "minus").radius
        )
    except (TypeError, ValueError):
        pass
    rng = np.random.default_rng(seed)

    def draw():
        sx, sy, tx, ty = rng.uniform(-r_box, r_box, size=4)
        return complex(sx, 0.5 * tx), complex(sy, 0.5 * ty)

    roots: list[tuple[complex, complex]] = []
    step_cap = 1.0 + 0.25 * r_box
    # every minimal period divides n, and a short cycle seen through the
    # length-n system can have a thin Newton basin (its diagonal replica is
    # a degenerate direction); sweep each divisor with its own window
    for window in (d for d in range(1, n + 1) if n % d == 0):
        for _ in range(n_starts):
            # rough pseudo-orbit as the initial guess; escapes are replaced
            # by fresh draws so every slot starts inside the radius
            x, y = draw()
            init = []
            for _ in range(window):
                init.append((x, y))
                q = fn._apply_once(Point2(x, y))
                if q.escaped or max(abs(q.x), abs(q.y)) > 2 * r_box:
                    x, y = draw()
                else:
                    x, y = q.x, q.y
            got = _shooting_newton(fn, window, init, step_cap)
            if got is None:
                continue
            x, y = got
            state = _numeric_iterate_diff(fn, x, y, window)
            if state is None:
                continue
            px, py = state[0], state[1]
            if hypot(abs(px - x), abs(py - y)) > tol:
                continue
            if any(
                abs(x - rx0) + abs(y - ry0) <= 10 * tol for rx0, ry0 in roots
            ):
                continue
            roots.append((x, y))

    # group into orbits of minimal period
    cycles: list[Cycle] = []
    used = [False] * len(roots)
    order = sorted(
        range(len(roots)),
        key=lambda i: (round(roots[i][0].real, 9), round(roots[i][0].imag, 9),
                       round(roots[i][1].real, 9), round(roots[i][1].imag, 9)),
    )
    for i in order:
        if used[i]:
            continue
        x, y = roots[i]
        t = n
        for div in range(1, n):
            if n % div:
                continue
            st = _numeric_iterate_diff(fn, x, y, div)
            if st is not None and abs(st[0] - x) + abs(st[1] - y) <= 10 * tol:
                t = div
                break
        orbit = [(x, y)]
        cx, cy = x, y
        for _ in range(t - 1):
            st = _numeric_iterate_diff(fn, cx, cy, 1)
            cx, cy = st[0], st[1]
            orbit.append((cx, cy))
        for ox, oy in orbit:
            for j, (rx0, ry0) in enumerate(roots):
                if abs(ox - rx0) + abs(oy - ry0) <= 10 * tol:
                    used[j] = True
        st = _numeric_iterate_diff(fn, x, y, t)
        mult, cls = _eig_classify(st[2] + st[5], st[2] * st[5] - st[3] * st[4])
        cycles.append(
            Cycle(tuple(Point2(ox, oy) for ox, oy in orbit), t, mult, cls)
        )
    cycles.sort(
        key=lambda cc: (
            cc.period,
            round(cc.points[0].x.real, 9),
            round(cc.points[0].x.imag, 9),
            round(cc.points[0].y.real, 9),
            round(cc.points[0].y.imag, 9),
        )
    )
    lam = fn.dynamical_degree
    expected = lam**n
    found = sum(c.period for c in cycles if n % c.period == 0)
    return NumericPeriodicResult(tuple(cycles), n, expected, found, seed)


# ---------------------------------------------------------------------------
# common periodic points of a pair


@dataclass(frozen=True)
class CommonPeriodicResult:
    exact_points: tuple[Point2, ...]
    shared_iterate: tuple[int, int] | None
    numeric_matches: tuple[Point2, ...]
    method: str
    max_period: int


def common_periodic(
    f: HenonMap,
    g: HenonMap,
    max_period: int = 1,
    tol: float = 1e-9,
    primes: tuple[int, ...] = (101, 103),
    height_bound: int = 10**6,
    detect_bounds: tuple[int, int] = (3, 3),
    numeric: bool = False,
    n_starts: int = 64,
    seed: int = 0,
) -> CommonPeriodicResult:
    """Intersection of the periodic-point sets of two maps.

    When the maps share an iterate (checked symbolically first) the
    whole sets coincide, so a flag is returned instead of a list.  The
    exact pipeline intersects certified rational sets; the optional
    numeric pipeline pairs complex cycles of the two maps within tol.
    """
    if equal_symbolic(f, g):
        return CommonPeriodicResult((), (1, 1), (), "shared-iterate", max_period)
    hit = common_iterate_detect(f, g, detect_bounds[0], detect_bounds[1])
    if hit is not None:
        return CommonPeriodicResult((), hit, (), "shared-iterate", max_period)

    rf = rational_periodic_points(f, max_period, primes, height_bound)
    rg = rational_periodic_points(g, max_period, primes, height_bound)
    exact = tuple(sorted(set(rf.points) & set(rg.points), key=lambda q: (q.x, q.y)))

    matches: tuple[Point2, ...] = ()
    method = "exact"
    if numeric:
        nf = periodic_numeric(f, max_period, tol=tol, n_starts=n_starts, seed=seed)
        ng = periodic_numeric(g, max_period, tol=tol, n_starts=n_starts, seed=seed + 1)
        fpts = [q for c in nf.cycles for q in c.points]
        gpts = [q for c in ng.cycles for q in c.points]
        paired = []
        for qf in fpts:
            for qg in gpts:
                if abs(qf.x - qg.x) + abs(qf.y - qg.y) <= tol:
                    paired.append(qf)
                    break
        matches = tuple(
            sorted(
                paired,
                key=lambda q: (q.x.real, q.x.imag, q.y.real, q.y.imag),
            )
        )
        method = "exact+numeric"
    return CommonPeriodicResult(exact, None, matches, method, max_period)
