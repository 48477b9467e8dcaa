from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.dyadic import DyadicTime, dyadic_grid


def test_canonical_form():
    assert DyadicTime.of(2, 1) == DyadicTime.of(1)
    assert DyadicTime.of(12, 3).to_pair() == [3, 1]
    assert DyadicTime.of(6).to_pair() == [6, 0]


def test_addition_and_halving():
    half, quarter = DyadicTime.of(1, 1), DyadicTime.of(1, 2)
    assert half + half == DyadicTime.of(1)
    assert quarter + half == DyadicTime.of(3, 2)
    assert DyadicTime.of(3, 2).halve() == DyadicTime.of(3, 3)
    assert half.double() == DyadicTime.of(1)


def test_level_of():
    one = DyadicTime.of(1)
    assert one.level_of(DyadicTime.of(1, 3)) == 3
    assert one.level_of(one) == 0
    assert one.level_of(DyadicTime.of(3, 2)) == -1
    assert DyadicTime.of(1, 2).level_of(one) == -1


def test_from_fraction():
    assert DyadicTime.from_fraction(Fraction(3, 4)) == DyadicTime.of(3, 2)
    with pytest.raises(ValueError):
        DyadicTime.from_fraction(Fraction(1, 3))
    with pytest.raises(ValueError):
        DyadicTime.from_fraction(Fraction(0))


def test_invalid_times():
    with pytest.raises(ValueError):
        DyadicTime.of(0)
    with pytest.raises(ValueError):
        DyadicTime.from_pair([1, 2, 3])


def test_ordering_and_grid():
    grid = dyadic_grid(DyadicTime.of(1), 2)
    assert grid == [DyadicTime.of(1), DyadicTime.of(1, 1), DyadicTime.of(1, 2)]
    assert sorted(grid)[0] == DyadicTime.of(1, 2)
    assert float(DyadicTime.of(3, 2)) == 0.75
    assert str(DyadicTime.of(3, 2)) == "3/2^2"


@given(m=st.integers(min_value=1, max_value=10**6), k=st.integers(min_value=0, max_value=40))
def test_canonical_value_preserved(m, k):
    t = DyadicTime.of(m, k)
    assert t.as_fraction() == Fraction(m, 2**k)
    assert t.k == 0 or t.m % 2 == 1
