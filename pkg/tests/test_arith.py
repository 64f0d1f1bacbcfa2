from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

from helpers.arith import ceil_div, certified_series, ilog, is_square, merged_intervals, threshold_exponent, to_fraction
from helpers.errors import HyplabError, PreconditionError, ScheduleError


@given(st.integers(min_value=2, max_value=12), st.integers(min_value=1, max_value=10**40))
def test_ilog_brackets_n(base, n):
    e = ilog(base, n)
    assert base**e <= n < base ** (e + 1)


def test_ilog_powers():
    assert (ilog(3, 80), ilog(3, 81)) == (3, 4)
    assert ilog(10, 10**30) == 30
    with pytest.raises(ValueError):
        ilog(10, 0)


@given(st.integers(min_value=-10**6, max_value=10**6), st.integers(min_value=1, max_value=1000))
def test_ceil_div(a, b):
    assert ceil_div(a, b) == -(-a // b)
    assert ceil_div(a, b) * b >= a


@given(st.integers(min_value=0, max_value=10**12))
def test_is_square(n):
    assert is_square(n * n)
    assert is_square(n * n + 1) == (n == 0)


@given(st.integers(min_value=2, max_value=10), st.fractions(min_value=0, max_value=10**6))
def test_threshold_exponent_is_smallest(base, bound):
    e = threshold_exponent(base, bound)
    assert Fraction(base) ** e > bound
    assert e == 0 or Fraction(base) ** (e - 1) <= bound


def test_to_fraction_is_exact():
    assert to_fraction(0.5) == Fraction(1, 2)
    assert to_fraction("3/4") == Fraction(3, 4)
    with pytest.raises(ValueError):
        to_fraction(float("inf"))


def test_certified_series_geometric():
    total, tail, last = certified_series(
        lambda i: Fraction(1, 2**i), 0, lambda J: Fraction(1, 2), Fraction(1, 10**6)
    )
    assert tail < Fraction(1, 10**6)
    assert total < 2 <= total + tail
    assert last >= 20


def test_merged_intervals_joins_adjacent():
    assert merged_intervals([(5, 7), (0, 2), (3, 4), (10, 10)]) == [(0, 7), (10, 10)]
    assert merged_intervals([]) == []


def test_errors_carry_witness():
    e = ScheduleError("m_2 too small", {"q": 2, "lhs": Fraction(7, 2), "pair": (1, 2)})
    assert isinstance(e, HyplabError) and isinstance(e, ValueError)
    assert e.to_dict() == {
        "error": "ScheduleError",
        "message": "m_2 too small",
        "witness": {"q": 2, "lhs": "7/2", "pair": [1, 2]},
    }
    assert PreconditionError("x").to_dict()["witness"] == {}
