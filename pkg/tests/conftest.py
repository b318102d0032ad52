import random
from fractions import Fraction

import pytest

from sgpareto import oracle
from sgpareto.geometry import Direction, DwcSet, dwc_hull


def frac(x) -> Fraction:
    return Fraction(x)


def box(*corner) -> DwcSet:
    pts = [tuple(Fraction(c) for c in corner)]
    return DwcSet.from_points(pts)


def random_direction(rng: random.Random, dim: int) -> Direction:
    while True:
        coords = [Fraction(rng.randint(0, 8), rng.randint(1, 8)) for _ in range(dim)]
        if any(c > 0 for c in coords):
            return Direction(coords)


def random_piece_points(rng: random.Random, dim: int, count: int):
    return [
        tuple(Fraction(rng.randint(0, 6), 6) for _ in range(dim)) for _ in range(count)
    ]


@pytest.fixture(scope="session")
def cycle_game():
    return oracle.fixture("ec-cycle")


@pytest.fixture(scope="session")
def alpha():
    return box("1/2", "9/10")


@pytest.fixture(scope="session")
def beta():
    return box("9/10", "1/2")


@pytest.fixture(scope="session")
def gamma():
    return DwcSet.from_points(
        [(Fraction(1, 2), Fraction(9, 10)), (Fraction(9, 10), Fraction(1, 2))]
    )
