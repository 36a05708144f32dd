"""Sampling stand-ins for the equilibrium measure and the probes built
on them.

The sample is the uniform distribution on numerically found saddle
cycles; attracting cycles never enter it.  Everything downstream reports
sample statistics, not measure-theoretic claims: support containment is
a max of escape rates, closeness of two samples is an energy distance
between point clouds, and harmonicity of a Green combination along a
curve is a mean-value defect on disks.
"""

from __future__ import annotations

from cmath import exp as cexp
from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .core import Point2
from .green import CurveParam, green, green_total
from .periodic import periodic_numeric

__all__ = [
    "MeasureSample",
    "SupportCheck",
    "HarmonicityReport",
    "measure_from_periodic",
    "support_check",
    "measure_discrepancy",
    "harmonicity_probe",
]


@dataclass(frozen=True)
class MeasureSample:
    """Equal-weight cloud of saddle periodic points."""

    points: tuple[Point2, ...]
    period: int
    seed: int
    low_quality: bool

    @property
    def vacuous(self) -> bool:
        return not self.points

    @property
    def weight(self) -> float:
        return 1.0 / len(self.points) if self.points else 0.0


def measure_from_periodic(
    f,
    n: int,
    tol: float = 1e-9,
    n_starts: int = 64,
    seed: int = 0,
) -> MeasureSample:
    """Uniform sample on the saddle cycles of period dividing n.

    Fewer than 4 saddle points marks the sample low-quality; callers
    should treat statistics from such samples as indicative only.
    """
    result = periodic_numeric(f, n, tol=tol, n_starts=n_starts, seed=seed)
    pts: list[Point2] = []
    for cycle in result.cycles:
        if cycle.classification != "saddle":
            continue
        pts.extend(cycle.points)
    return MeasureSample(tuple(pts), n, seed, low_quality=len(pts) < 4)


@dataclass(frozen=True)
class SupportCheck:
    max_green: float
    threshold: float
    vacuous: bool

    @property
    def passed(self) -> bool:
        return self.vacuous or self.max_green <= self.threshold


def support_check(f, sample: MeasureSample, tol: float = 1e-4) -> SupportCheck:
    """Largest total escape rate over the sample; a genuine equilibrium
    sample stays at 0 within tolerance since both rates vanish on it."""
    if sample.vacuous:
        return SupportCheck(0.0, tol, True)
    worst = 0.0
    for q in sample.points:
        worst = max(worst, green_total(f, q).value)
    return SupportCheck(worst, tol, False)


def _cloud(sample: MeasureSample) -> np.ndarray:
    rows = []
    for q in sample.points:
        x, y = complex(q.x), complex(q.y)
        rows.append((x.real, x.imag, y.real, y.imag))
    return np.asarray(rows, dtype=np.float64)


def measure_discrepancy(s1: MeasureSample, s2: MeasureSample) -> float:
    """Energy distance between the two equal-weight clouds in R^4.

    Zero exactly when the clouds agree as distributions; symmetric and
    triangle-respecting, so usable as a closeness score.  Values near
    zero are a trigger to look for a shared iterate symbolically, never
    a conclusion by themselves.
    """
    if s1.vacuous or s2.vacuous:
        raise ValueError("discrepancy needs two non-vacuous samples")
    a = _cloud(s1)
    b = _cloud(s2)
    # canonical argument order keeps the float summation identical both
    # ways, so symmetry holds bit-exactly, not just up to rounding
    if (a.shape[0], a.tobytes()) > (b.shape[0], b.tobytes()):
        a, b = b, a
    dab = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2).mean()
    daa = np.linalg.norm(a[:, None, :] - a[None, :, :], axis=2).mean()
    dbb = np.linalg.norm(b[:, None, :] - b[None, :, :], axis=2).mean()
    return sqrt(max(0.0, 2.0 * dab - daa - dbb))


@dataclass(frozen=True)
class HarmonicityReport:
    alpha: float
    defects: tuple[float, ...]
    max_defect: float
    quad_points: int


def harmonicity_probe(
    f,
    alpha: float,
    curve: CurveParam,
    disks,
    quad_points: int = 64,
    tol: float = 1e-9,
) -> HarmonicityReport:
    """Mean-value defect of G_plus - alpha*G_minus along a curve.

    For each disk in the parameter plane, compares the average of the
    pulled-back combination over the circle with its center value.  A
    harmonic combination has zero defect; a persistent defect at every
    alpha is evidence that no such combination exists.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    defects = []
    for center, radius in disks:
        c = complex(center)
        r = float(radius)
        if r <= 0:
            raise ValueError("disk radius must be positive")
        avg = 0.0
        for k in range(quad_points):
            t = c + r * cexp(2j * pi * k / quad_points)
            avg += _combo(f, curve, t, alpha, tol)
        avg /= quad_points
        defects.append(abs(avg - _combo(f, curve, c, alpha, tol)))
    mx = max(defects) if defects else 0.0
    return HarmonicityReport(alpha, tuple(defects), mx, quad_points)


def _combo(f, curve: CurveParam, t: complex, alpha: float, tol: float) -> float:
    q = curve.at(t)
    gp = green(f, q, "plus", tol=tol)
    gm = green(f, q, "minus", tol=tol)
    return gp.value - alpha * gm.value
