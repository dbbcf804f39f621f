from fractions import Fraction

import pytest

from cutout_packing.geometry import CutOutSet, SelfSimilarSystem
from cutout_packing.sequences import BlockGeometric, Explicit, PowerLaw


@pytest.fixture
def half_third():
    return SelfSimilarSystem((Fraction(1, 2), Fraction(1, 3)), (Fraction(1, 6),))


@pytest.fixture
def middle_third():
    return SelfSimilarSystem((Fraction(1, 3), Fraction(1, 3)), (Fraction(1, 3),))


@pytest.fixture
def ternary_seq():
    return BlockGeometric(Fraction(1, 3), 2, 1)


@pytest.fixture
def ternary_set(ternary_seq):
    return CutOutSet(ternary_seq)


@pytest.fixture
def gamma_half():
    return PowerLaw(1.0, 0.5)


@pytest.fixture
def dyadic():
    """l_j = 2**-j, stored exactly for 40 terms plus the exact remainder."""
    return Explicit([Fraction(1, 2**j) for j in range(1, 41)], Fraction(1, 2**40))
