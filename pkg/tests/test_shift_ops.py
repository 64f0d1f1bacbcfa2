from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

from constructions.bmpp import bmpp_weights
from dynamics.shift_ops import (
    ExponentWeights,
    Space,
    TruncatedVector,
    backward_apply,
    conjugate_from_unweighted,
    conjugate_to_unweighted,
    distance,
    forward_apply,
    from_weights,
    geometric,
    norm,
    orbit_distances,
    orbit_visit_set,
    unweighted,
    weighted_forward_apply,
    within,
)
from helpers.errors import PrecisionBudgetError, PreconditionError
from models.params import ConstructionParams

WEIGHTS = {
    "unweighted": unweighted(),
    "2^n": geometric(2),
    "(1/2)^n": geometric(Fraction(1, 2)),
    "(n+1)/n": from_weights(lambda n: Fraction(n + 1, n), "(n+1)/n"),
    "bmpp": bmpp_weights(ConstructionParams.desk()),
}

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=50)
vectors = st.dictionaries(st.integers(min_value=0, max_value=40), rationals, max_size=12).map(TruncatedVector.from_entries)
weights = st.sampled_from(sorted(WEIGHTS)).map(WEIGHTS.get)
powers = st.integers(min_value=0, max_value=45)


def test_space_parsing():
    assert Space.parse("c0") == Space.c0()
    assert Space.parse("l2") == Space.lp(2)
    assert Space.parse("lp:3") == Space.lp(3)
    assert str(Space.lp(1)) == "l1"
    with pytest.raises(ValueError):
        Space.parse("l")
    with pytest.raises(ValueError):
        Space(kind="lp")


def test_vectors_drop_zeros():
    x = TruncatedVector.from_entries({0: 1, 3: 0, 5: "1/2"})
    assert x.support == [0, 5]
    assert x[3] == 0 and x[5] == Fraction(1, 2)
    assert x.max_index == 5
    assert TruncatedVector.zero().max_index == -1
    assert not (x - x)
    with pytest.raises(ValueError):
        TruncatedVector.from_entries({-1: 1})


def test_vectors_in_different_spaces_do_not_mix():
    with pytest.raises(PreconditionError):
        TruncatedVector.unit(0) + TruncatedVector.unit(0, Space.lp(2))


def test_norms_are_exact():
    x = TruncatedVector.from_entries({0: 3, 1: -4})
    assert norm(x) == 4
    assert norm(TruncatedVector.from_entries(x.entries, Space.lp(1))) == 7
    assert norm(TruncatedVector.from_entries(x.entries, Space.lp(2))) == 5
    assert isinstance(norm(TruncatedVector.from_entries({0: 1, 1: 1}, Space.lp(2))), float)
    assert within(x, TruncatedVector.zero(), Fraction(41, 10))
    assert not within(x, TruncatedVector.zero(), 4)
    assert distance(x, TruncatedVector.unit(1, value=-4)) == 3


def test_json_form_is_exact():
    x = TruncatedVector.from_entries({2: Fraction(-3, 8), 7: Fraction(5, 3)})
    data = x.to_dict()
    assert data["entries"] == [[2, -3, 1, -3], [7, 5, 3, 0]]
    assert TruncatedVector.from_json(x.to_json()) == x


@pytest.mark.parametrize("name", sorted(WEIGHTS))
def test_weights_are_consecutive_ratios(name):
    w = WEIGHTS[name]
    assert w.varpi(0) == 1
    for n in range(1, 60):
        assert w.varpi(n) / w.varpi(n - 1) == w.weight(n)


def test_weight_constructors():
    assert isinstance(geometric(3), ExponentWeights)
    assert geometric(3).varpi(4) == 81
    assert geometric(Fraction(1, 2)).varpi(3) == Fraction(1, 8)
    assert unweighted().is_c0_operator(100)
    assert not from_weights(lambda n: n).is_c0_operator(10)
    with pytest.raises(PreconditionError):
        ExponentWeights(2, lambda n: 1)
    with pytest.raises(PreconditionError):
        from_weights(lambda n: 0).varpi(3)


def test_threshold_tests_agree_with_varpi():
    w = geometric(2)
    assert w.exceeds(3, 7) and not w.exceeds(3, 8)
    assert w.above_mask(5, Fraction(1, 2)).all()
    assert w.above_mask(5, 4).tolist() == [False, False, False, True, True, True]


def test_backward_apply_formula():
    w = geometric(2)
    x = TruncatedVector.from_entries({1: 1, 4: 3})
    assert backward_apply(w, x, 2) == TruncatedVector.from_entries({2: 12})
    assert backward_apply(w, x, 0) == x
    with pytest.raises(PreconditionError):
        backward_apply(w, x, -1)


@given(weights, vectors, powers, powers)
def test_shift_semigroup(w, x, a, b):
    assert backward_apply(w, backward_apply(w, x, a), b) == backward_apply(w, x, a + b)


@given(weights, vectors, powers)
def test_conjugacy_square(w, x, m):
    assert conjugate_from_unweighted(w, backward_apply(w, x, m)) == backward_apply(
        unweighted(), conjugate_from_unweighted(w, x), m
    )
    u = conjugate_from_unweighted(w, x)
    assert conjugate_to_unweighted(w, backward_apply(unweighted(), u, m)) == backward_apply(w, x, m)
    assert conjugate_to_unweighted(w, u) == x


@given(weights, vectors, powers)
def test_forward_is_right_inverse(w, y, n):
    assert backward_apply(unweighted(), forward_apply(y, n), n) == y
    assert backward_apply(w, weighted_forward_apply(w, y, n), n) == y


def test_precision_budget(monkeypatch):
    import dynamics.shift_ops as shift_ops

    monkeypatch.setattr(shift_ops, "MAX_VARPI_BITS", 16)
    with pytest.raises(PrecisionBudgetError):
        conjugate_to_unweighted(geometric(2), TruncatedVector.unit(40))


def test_orbit_visits_of_a_unit_vector():
    x = TruncatedVector.unit(5)
    center = TruncatedVector.unit(0)
    visits = orbit_visit_set(unweighted(), x, center, Fraction(1, 2), 20)
    assert visits.enumerate_up_to(20) == [5]
    near_zero = orbit_visit_set(unweighted(), x, TruncatedVector.zero(), 2, 20)
    assert near_zero.enumerate_up_to(20) == list(range(21))
    assert orbit_distances(geometric(2), x, center, [4, 5]) == [16, 31]
    with pytest.raises(PreconditionError):
        orbit_visit_set(unweighted(), x, center, 0, 20)
