from fractions import Fraction

import pytest

from henonlab.core import ElementaryHenon, HenonMap, Point2, iterate_map
from henonlab.green import CurveParam
from henonlab.measure import (
    MeasureSample,
    harmonicity_probe,
    measure_discrepancy,
    measure_from_periodic,
    support_check,
)
from henonlab.poly import UniPoly

F = Fraction


@pytest.fixture
def benchmark_map():
    return HenonMap((ElementaryHenon(UniPoly([-1, 0, 1]), F(3, 10)),))


def test_sample_collects_saddles(benchmark_map):
    s = measure_from_periodic(benchmark_map, 6, n_starts=256)
    assert len(s.points) >= 32
    assert not s.low_quality
    assert s.period == 6


def test_sample_low_quality_flag(benchmark_map):
    s = measure_from_periodic(benchmark_map, 1, n_starts=16)
    # a single saddle fixed point: too few points for a stable cloud
    assert len(s.points) == 1
    assert s.low_quality


def test_support_check(benchmark_map):
    s = measure_from_periodic(benchmark_map, 6, n_starts=256)
    chk = support_check(benchmark_map, s, tol=1e-4)
    assert chk.passed
    assert chk.max_green <= 1e-4


def test_support_check_rejects_escaping_point(benchmark_map):
    s = measure_from_periodic(benchmark_map, 6, n_starts=256)
    spiked = MeasureSample(
        s.points + (Point2.numeric(0.0, 50.0),), s.period, s.seed, s.low_quality
    )
    chk = support_check(benchmark_map, spiked, tol=1e-4)
    assert not chk.passed
    assert chk.max_green > 1.0


def test_discrepancy_zero_for_same_sample(benchmark_map):
    s = measure_from_periodic(benchmark_map, 6, n_starts=256)
    assert measure_discrepancy(s, s) == 0.0


def test_discrepancy_symmetry(benchmark_map):
    a = measure_from_periodic(benchmark_map, 5, n_starts=256)
    b = measure_from_periodic(benchmark_map, 6, n_starts=256)
    assert measure_discrepancy(a, b) == measure_discrepancy(b, a)


def test_discrepancy_vacuous_rejected(benchmark_map):
    a = measure_from_periodic(benchmark_map, 6, n_starts=256)
    empty = MeasureSample((), 3, 0, low_quality=True)
    with pytest.raises(ValueError):
        measure_discrepancy(a, empty)


def test_map_and_square_share_measure(benchmark_map):
    # the square has the same saddle set through period 6 = lcm covered
    a = measure_from_periodic(benchmark_map, 6, n_starts=256)
    b = measure_from_periodic(iterate_map(benchmark_map, 2), 3, n_starts=256)
    d = measure_discrepancy(a, b)
    assert d <= 1e-2


def test_harmonicity_probe_in_escape_region(benchmark_map):
    # far out along the vertical axis G_minus vanishes and G_plus is
    # pluriharmonic: mean-value defects at alpha=1 are tiny
    curve = CurveParam(UniPoly([0]), UniPoly([0, 1]))
    rep = harmonicity_probe(
        benchmark_map,
        1.0,
        curve,
        disks=[(1e4, 0.5), (3e4, 1.0)],
        quad_points=32,
    )
    assert rep.max_defect <= 1e-6


def test_harmonicity_validation(benchmark_map):
    curve = CurveParam(UniPoly([0]), UniPoly([0, 1]))
    with pytest.raises(ValueError):
        harmonicity_probe(benchmark_map, 0.0, curve, disks=[(1.0, 0.5)])
    with pytest.raises(ValueError):
        harmonicity_probe(benchmark_map, 1.0, curve, disks=[(1.0, 0.0)])
