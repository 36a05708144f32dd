"""Computational dynamics of composed plane polynomial automorphisms over Q.

Exact map algebra, archimedean and p-adic escape-rate (Green)
functions, canonical heights, certified rational periodic points,
one-parameter family sweeps, and equilibrium-measure probes.
"""

from .core import (
    ElementaryHenon,
    HenonMap,
    NumericHenon,
    Point2,
    common_iterate_detect,
    compose,
    equal_symbolic,
    iterate_map,
)
from .poly import BiPoly, DegreeCapExceeded, UniPoly
from .rationals import Rational, parse_rational

__version__ = "0.1.0"

__all__ = [
    "BiPoly",
    "DegreeCapExceeded",
    "ElementaryHenon",
    "HenonMap",
    "NumericHenon",
    "Point2",
    "Rational",
    "UniPoly",
    "common_iterate_detect",
    "compose",
    "equal_symbolic",
    "iterate_map",
    "parse_rational",
    "__version__",
]
