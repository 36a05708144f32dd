"""Archimedean escape-rate (Green) functions.

G_plus(q) = lim λ^{-n} log+ ||f^n(q)||, max-norm on C^2, and G_minus
the same for the inverse. The computation is two-phase (complex-double
orbit until certified escape, then a log-magnitude recursion with a
rigorous error budget); the per-map work lives in the kernel backend.

Escape is certified through the region V_R = {|y| >= max(|x|, R)}: R
is the smallest power of 2 making every elementary factor at least
double |y| on V_R and keep the lower-order terms below half the
leading one, so V_R is forward-invariant and norms grow geometrically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import ceil, log, log2

import numpy as np

from . import kernels
from .core import NumericHenon, Point2, as_numeric_map
from .poly import UniPoly


@dataclass(frozen=True)
class EscapeData:
    """Certified escape region data for a composed map.

    radius: entering {|y| >= max(|x|, R)} certifies escape; every
    elementary factor at least doubles |y| there.
    tail_constant: C with |λ^{-(n+1)} log+||f^{n+1}q|| -
    λ^{-n} log+||f^n q||| <= C λ^{-n} along escaping orbits in the
    region, so the telescoped tail after n steps is C λ^{-n}/(λ-1).
    """

    radius: float
    tail_constant: float


@dataclass(frozen=True)
class GreenValue:
    value: float
    error: float
    escaped: bool
    escape_iterate: int | None
    n_used: int
    direction: str

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("escape-rate values are nonnegative")


class _KernelMap:
    """Precomputed kernel arrays and constants for one composed map
    (untransposed core)."""

    __slots__ = (
        "m",
        "degs",
        "off",
        "cre",
        "cim",
        "cabs",
        "dre",
        "dim",
        "dabs",
        "abs_lead",
        "log_lead",
        "wfac",
        "lam",
        "r_enter",
        "r_switch",
        "e_bound",
        "c_up",
    )

    def __init__(self, h: NumericHenon):
        degs = [a.degree for a in h.factors]
        m = len(degs)
        off = []
        cre, cim, cabs = [], [], []
        pos = 0
        for a in h.factors:
            off.append(pos)
            for c in a.coeffs:
                cre.append(c.real)
                cim.append(c.imag)
                cabs.append(abs(c))
            pos += len(a.coeffs)
        self.m = m
        self.degs = np.array(degs, dtype=np.int64)
        self.off = np.array(off, dtype=np.int64)
        self.cre = np.array(cre, dtype=np.float64)
        self.cim = np.array(cim, dtype=np.float64)
        self.cabs = np.array(cabs, dtype=np.float64)
        self.dre = np.array([a.delta.real for a in h.factors], dtype=np.float64)
        self.dim = np.array([a.delta.imag for a in h.factors], dtype=np.float64)
        self.dabs = np.array([abs(a.delta) for a in h.factors], dtype=np.float64)
        lam = 1
        for d in degs:
            lam *= d
        self.lam = lam
        # weights: a log-deviation introduced at factor k is amplified by
        # the degrees of all later factors within the same map application
        wf = []
        for k in range(m):
            w = 1
            for d in degs[k + 1 :]:
                w *= d
            wf.append(float(w))
        self.wfac = np.array(wf, dtype=np.float64)
        abs_lead = []
        log_lead = []
        s_low = []
        r_req = 1.0
        for a in h.factors:
            al = abs(a.coeffs[-1])
            if al == 0.0:
                raise ValueError("zero leading coefficient")
            s = sum(abs(c) for c in a.coeffs[:-1]) + abs(a.delta)
            abs_lead.append(al)
            log_lead.append(log(al))
            s_low.append(s)
            d = a.degree
            # |y'| >= |y| (|lead| |y|^{d-1} - S) >= 2|y|  and  S/|y| <= |lead|/2
            r1 = ((2.0 + s) / al) ** (1.0 / (d - 1))
            r2 = 2.0 * s / al
            r_req = max(r_req, r1, r2)
        self.abs_lead = np.array(abs_lead, dtype=np.float64)
        self.log_lead = np.array(log_lead, dtype=np.float64)
        self.r_enter = float(2.0 ** ceil(log2(r_req)))
        # keep one further full map application representable in doubles
        self.r_switch = max(self.r_enter * 2.0, min(1e10, 10.0 ** (250.0 / lam)))
        # |log||f q|| - λ log||q||| on the region: factor deviation between
        # log(|lead|/2) and log(|lead| + S), amplified by wfac
        e = 0.0
        c1 = 0.0
        for k in range(m):
            e += wf[k] * (abs(log_lead[k]) + log(2.0))
            c1 += wf[k] * max(0.0, log(abs_lead[k] + s_low[k]))
        self.e_bound = e
        self.c_up = c1 / (lam - 1.0) if lam > 1 else c1

    def escape_data(self) -> EscapeData:
        return EscapeData(radius=self.r_enter, tail_constant=self.e_bound / self.lam)


@lru_cache(maxsize=256)
def _kernel_map_cached(h: NumericHenon) -> _KernelMap:
    return _KernelMap(h)


def _resolve(f, direction: str) -> tuple[NumericHenon, bool]:
    """Numeric core map (untransposed) plus whether inputs must be swapped.

    The coordinate swap preserves the max-norm, so the escape rate of
    the swap-conjugated map at q is the core map's escape rate at the
    swapped point.
    """
    if direction not in ("plus", "minus"):
        raise ValueError(f"direction must be 'plus' or 'minus', got {direction!r}")
    h = as_numeric_map(f)
    if direction == "minus":
        h = h.inverse()
    swap = h.transposed
    if swap:
        h = NumericHenon(h.factors, transposed=False)
    return h, swap


def escape_data(f, direction: str = "plus") -> EscapeData:
    h, _ = _resolve(f, direction)
    return _kernel_map_cached(h).escape_data()


def green(
    f,
    q: Point2,
    direction: str = "plus",
    tol: float = 1e-9,
    n_max: int = 2048,
) -> GreenValue:
    """Escape rate of one point with a certified error bound (<= tol for
    escaping orbits; bounded verdicts are N_max-relative with a
    telescoped error estimate)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    h, swap = _resolve(f, direction)
    km = _kernel_map_cached(h)
    qn = q.to_numeric()
    if qn.escaped:
        raise ValueError("cannot evaluate at an overflowed point")
    x, y = (qn.y, qn.x) if swap else (qn.x, qn.y)
    value, err, escaped, n_escape, n_used = kernels.green_escape(
        km.m,
        km.degs,
        km.off,
        km.cre,
        km.cim,
        km.cabs,
        km.dre,
        km.dim,
        km.dabs,
        km.abs_lead,
        km.log_lead,
        km.wfac,
        float(km.lam),
        km.r_enter,
        km.r_switch,
        km.e_bound,
        km.c_up,
        x.real,
        x.imag,
        y.real,
        y.imag,
        n_max,
        tol,
    )
    return GreenValue(
        value=max(0.0, value),
        error=err,
        escaped=bool(escaped),
        escape_iterate=n_escape if n_escape >= 0 else None,
        n_used=n_used,
        direction=direction,
    )


def green_total(f, q: Point2, tol: float = 1e-9, n_max: int = 2048) -> GreenValue:
    """G_plus + G_minus with summed error bounds."""
    gp = green(f, q, "plus", tol, n_max)
    gm = green(f, q, "minus", tol, n_max)
    return GreenValue(
        value=gp.value + gm.value,
        error=gp.error + gm.error,
        escaped=gp.escaped or gm.escaped,
        escape_iterate=None,
        n_used=max(gp.n_used, gm.n_used),
        direction="total",
    )


# -- polynomial curves and their escape-rate mass ----------------------


@dataclass(frozen=True)
class CurveParam:
    """Polynomial parameterization t |-> (x(t), y(t)) of an affine curve."""

    x: UniPoly
    y: UniPoly

    def __post_init__(self):
        if self.x.is_zero and self.y.is_zero:
            raise ValueError("curve must be nonconstant")

    def at(self, t: complex) -> Point2:
        return Point2.numeric(complex(self.x(t)), complex(self.y(t)))


@dataclass(frozen=True)
class CurveMass:
    """Slope of the circle-average of G_plus on a polynomial curve against
    log r. For curves meeting the line at infinity only at the forward
    indeterminacy point, the slope is the intersection degree there (a
    positive integer); irregular growth (pair-slope spread above 10%)
    flags the curve as meeting infinity near the backward point."""

    mass: float
    pair_slopes: tuple[float, ...]
    spread: float
    flagged_nonconvergent: bool
    mean_green_error: float
    radii: tuple[float, ...]
    averages: tuple[float, ...]


def curve_green_mass(
    f,
    curve: CurveParam,
    r_lo: float = 1e3,
    r_hi: float = 1e6,
    n_radii: int = 8,
    n_theta: int = 512,
    tol: float = 1e-9,
    n_max: int = 2048,
) -> CurveMass:
    """Least-squares slope of A(r) = mean_theta G_plus(curve(r e^{i theta}))
    over >= 8 log-spaced radii, 512-point trapezoid circle averages."""
    if not (r_hi > r_lo > 0):
        raise ValueError("need r_hi > r_lo > 0")
    if n_radii < 2:
        raise ValueError("need at least 2 radii")
    radii = [
        r_lo * (r_hi / r_lo) ** (k / (n_radii - 1)) for k in range(n_radii)
    ]
    averages = []
    err_sum = 0.0
    count = 0
    for r in radii:
        acc = 0.0
        for k in range(n_theta):
            theta = 2.0 * np.pi * k / n_theta
            t = r * complex(np.cos(theta), np.sin(theta))
            g = green(f, curve.at(t), "plus", tol, n_max)
            acc += g.value
            err_sum += g.error
            count += 1
        averages.append(acc / n_theta)
    xs = [log(r) for r in radii]
    xbar = sum(xs) / len(xs)
    ybar = sum(averages) / len(averages)
    sxx = sum((x - xbar) ** 2 for x in xs)
    sxy = sum((x - xbar) * (y - ybar) for x, y in zip(xs, averages))
    mass = sxy / sxx
    pair = tuple(
        (averages[k + 1] - averages[k]) / (xs[k + 1] - xs[k])
        for k in range(len(xs) - 1)
    )
    scale = max(abs(mass), 1e-12)
    spread = (max(pair) - min(pair)) / scale if pair else 0.0
    return CurveMass(
        mass=mass,
        pair_slopes=pair,
        spread=spread,
        flagged_nonconvergent=spread > 0.10,
        mean_green_error=err_sum / max(count, 1),
        radii=tuple(radii),
        averages=tuple(averages),
    )


def green_grid(
    f,
    x_range: tuple[float, float, int],
    y_range: tuple[float, float, int],
    tol: float = 1e-9,
    n_max: int = 2048,
):
    """Rows (re, im, G_plus, G_minus, err) over a real (x, y) grid, row-major
    in y then x, for CSV plotting output."""
    x0, x1, nx = x_range
    y0, y1, ny = y_range
    rows = []
    for i in range(int(nx)):
        x = x0 + (x1 - x0) * i / max(int(nx) - 1, 1)
        for j in range(int(ny)):
            y = y0 + (y1 - y0) * j / max(int(ny) - 1, 1)
            q = Point2.numeric(x, y)
            gp = green(f, q, "plus", tol, n_max)
            gm = green(f, q, "minus", tol, n_max)
            rows.append((x, y, gp.value, gm.value, gp.error + gm.error))
    return rows
