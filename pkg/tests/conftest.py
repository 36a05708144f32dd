from fractions import Fraction
from pathlib import Path

import pytest

from henonlab.core import ElementaryHenon, HenonMap
from henonlab.poly import UniPoly

REPO = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO


@pytest.fixture(scope="session")
def maps_dir() -> Path:
    return REPO / "maps"


@pytest.fixture(scope="session")
def families_dir() -> Path:
    return REPO / "families"


@pytest.fixture
def dissipative() -> HenonMap:
    # (x, y) -> (y, y^2 + 1/2 - x/2); fixed points (1,1), (1/2,1/2)
    return HenonMap(
        (ElementaryHenon(UniPoly([Fraction(1, 2), 0, 1]), Fraction(1, 2)),)
    )


@pytest.fixture
def conservative() -> HenonMap:
    # (x, y) -> (y, y^2 - x)
    return HenonMap((ElementaryHenon(UniPoly([0, 0, 1]), Fraction(1)),))


@pytest.fixture
def composite() -> HenonMap:
    # two factors, dynamical degree 6, Jacobian -1/6
    return HenonMap(
        (
            ElementaryHenon(UniPoly([1, 0, 1]), Fraction(1, 2)),
            ElementaryHenon(UniPoly([0, -1, 0, 1]), Fraction(-1, 3)),
        )
    )
