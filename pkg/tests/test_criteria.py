from fractions import Fraction

import pytest

from dynamics.criteria import (
    check_ahc2_hypotheses,
    check_ahc_hypotheses,
    check_ahc_split_iii,
    check_birkhoff_condition_b,
    check_series_tail,
    check_shift_general,
    check_shift_upper,
    check_shift_upper_per_j,
    shift_operators,
)
from dynamics.index_sets import arithmetic, from_elements, naturals
from dynamics.shift_ops import Space, TruncatedVector, backward_apply, geometric, unweighted
from helpers.errors import OracleError, PreconditionError
from models.reports import ConditionStatus, CriterionId, Verdict


def test_shift_upper_passes_with_growing_weights():
    report = check_shift_upper(geometric(2), arithmetic(10, 10), 1, 100, 1000)
    assert report.criterion_id == CriterionId.SHIFT_UPPER
    assert report.verdict == Verdict.PASS
    assert report.condition("ii").status == ConditionStatus.PASS
    assert report.condition("i").status == ConditionStatus.INCONCLUSIVE


def test_shift_upper_fails_on_the_first_bad_pair():
    report = check_shift_upper(geometric(2), arithmetic(10, 10), 1, 2**11, 1000)
    assert report.verdict == Verdict.FAIL
    witness = report.condition("ii").witness
    assert witness.indices == [20, 10, 1]
    assert witness.value == 2**11
    assert report.witnesses[0] == witness


def test_shift_upper_dense_and_sparse_scans_agree():
    A = arithmetic(3, 3)
    dense = check_shift_upper(geometric(2), A, 1, 2**4, 3000)
    sparse = check_shift_upper(geometric(2), from_elements(A.enumerate_up_to(150)), 1, 2**4, 3000)
    assert dense.verdict == sparse.verdict == Verdict.FAIL
    d, s = dense.condition("ii").witness, sparse.condition("ii").witness
    assert d.indices[0] - d.indices[1] == s.indices[0] - s.indices[1] == 3


def test_shift_upper_preconditions():
    with pytest.raises(PreconditionError):
        check_shift_upper(geometric(2), arithmetic(3), 1, 4, 100)
    with pytest.raises(PreconditionError):
        check_shift_upper(geometric(2), arithmetic(3, 3), 1, 0, 100)


def test_growth_floor_violation_fails_condition_i():
    report = check_shift_upper(unweighted(), arithmetic(10, 10), 1, Fraction(1, 2), 100, growth_floor=2)
    assert report.condition("i").status == ConditionStatus.FAIL
    assert report.condition("ii").status == ConditionStatus.PASS


def test_per_j_checks_every_offset():
    A = arithmetic(10, 10)
    assert check_shift_upper(geometric(2), A, 2, 2**10, 500).verdict == Verdict.PASS
    report = check_shift_upper_per_j(geometric(2), A, 2, 2**10, 500)
    assert report.criterion_id == CriterionId.SHIFT_UPPER_PER_J
    assert report.verdict == Verdict.FAIL
    assert report.condition("ii").witness.indices[2] == 0


def test_shift_general_passes_on_separated_families():
    families = [arithmetic(20, 10), arithmetic(20, 20)]
    report = check_shift_general(geometric(2), families, [4, 8], 2000, growth_floor=2)
    assert report.verdict == Verdict.PASS
    assert [c.name for c in report.conditions] == ["disjoint", "ii", "i[1]", "i[2]"]
    assert report.condition("i[2]").status == ConditionStatus.INCONCLUSIVE


def test_shift_general_reports_collisions():
    report = check_shift_general(geometric(2), [arithmetic(10, 10), arithmetic(20, 20)], [4, 8], 200)
    assert report.condition("disjoint").status == ConditionStatus.FAIL
    assert report.condition("disjoint").witness.indices == [20, 1, 2]
    assert [c.name for c in report.conditions] == ["disjoint", "ii", "i[1]", "i[2]"]


def test_single_family_matches_the_upper_criterion():
    A = arithmetic(10, 10)
    general = check_shift_general(geometric(2), [A], [4], 200)
    upper = check_shift_upper(geometric(2), A, 1, 4, 200)
    assert [c.name for c in general.conditions] == ["disjoint", "ii", "i[1]"]
    assert general.condition("i[1]").status == upper.condition("i").status == ConditionStatus.INCONCLUSIVE
    assert general.condition("ii").status == upper.condition("ii").status == ConditionStatus.PASS
    assert general.verdict == upper.verdict == Verdict.PASS


def test_shift_general_growth_fails_below_the_default_floor():
    shrinking = geometric(Fraction(1, 2))
    report = check_shift_general(shrinking, [arithmetic(10, 10)], [Fraction(1, 2**20)], 100)
    assert report.condition("i[1]").status == ConditionStatus.FAIL
    assert report.condition("i[1]").witness.indices == [51]


def test_shift_general_thresholds():
    families = [arithmetic(20, 10), arithmetic(20, 20)]
    for M in ([8, 4], [4], [4, 4], [0, 4]):
        with pytest.raises(PreconditionError):
            check_shift_general(geometric(2), families, M, 100)


def test_series_tail():
    ok = check_series_tail(geometric(2), naturals(), 0, Space.c0(), 100, Fraction(1, 1000))
    assert ok.verdict == Verdict.INCONCLUSIVE
    assert ok.condition("tail").details["cutoff"] == 10
    bad = check_series_tail(unweighted(), naturals(), 0, Space.c0(), 100, Fraction(1, 1000))
    assert bad.verdict == Verdict.FAIL
    l1 = check_series_tail(geometric(2), naturals(), 0, Space.lp(1), 100, Fraction(1, 1000))
    assert l1.condition("tail").details["cutoff"] == 11
    with pytest.raises(PreconditionError):
        check_series_tail(geometric(2), naturals(), 0, Space.c0(), 100, 0)


def test_ahc_hypotheses_on_a_geometric_shift():
    T, S = shift_operators(geometric(2))
    x = TruncatedVector.from_entries({0: 1, 1: 1})
    y = TruncatedVector.unit(0)
    A = arithmetic(5, 5)
    report = check_ahc_hypotheses(T, S, [x], [y], A, lambda B: B.count(40) == 8, Fraction(1, 10), 40)
    assert report.criterion_id == CriterionId.AHC
    assert report.verdict == Verdict.PASS
    assert report.condition("i[0]").status == ConditionStatus.PASS
    assert report.condition("ii[0]").status == ConditionStatus.INCONCLUSIVE
    assert report.condition("iii[0]").status == ConditionStatus.PASS


def test_ahc_density_check_failure_has_witness():
    T, S = shift_operators(geometric(2))
    report = check_ahc_hypotheses(
        T, S, [TruncatedVector.unit(0)], [], arithmetic(5, 5), lambda B: False, Fraction(1, 10), 40
    )
    assert report.verdict == Verdict.FAIL
    assert report.condition("i[0]").witness.indices == [0, 5, 10, 15, 20, 25, 30, 35, 40]


def test_oracle_failures_are_wrapped():
    def T(n, x):
        if n == 10:
            raise ZeroDivisionError("boom")
        return x

    with pytest.raises(OracleError) as info:
        check_ahc_hypotheses(T, T, [TruncatedVector.unit(0)], [], arithmetic(5, 5), lambda B: True, 1, 40)
    assert info.value.witness == {"n": 10}


def test_ahc_split_iii():
    T, S = shift_operators(geometric(2))
    report = check_ahc_split_iii(T, S, [TruncatedVector.unit(0)], arithmetic(5, 5), Fraction(1, 10), 40)
    assert report.verdict == Verdict.PASS
    assert report.condition("iiia[0]").status == ConditionStatus.PASS
    assert report.condition("iiib[0]").status == ConditionStatus.PASS
    assert report.condition("iiic[0]").status == ConditionStatus.INCONCLUSIVE
    tight = check_ahc_split_iii(T, S, [TruncatedVector.unit(0)], arithmetic(5, 5), Fraction(1, 32), 40)
    assert tight.condition("iiib[0]").status == ConditionStatus.FAIL


def test_ahc2_hypotheses():
    T, S = shift_operators(geometric(2))
    y = TruncatedVector.unit(0)
    report = check_ahc2_hypotheses(T, S, [y], [arithmetic(5, 5)], [Fraction(1, 10)], 20, f_max=2)
    assert report.criterion_id == CriterionId.AHC2
    assert report.verdict == Verdict.PASS
    assert report.condition("ii[0,1]").status == ConditionStatus.PASS
    assert report.condition("iii[0]").status == ConditionStatus.INCONCLUSIVE
    with pytest.raises(PreconditionError):
        check_ahc2_hypotheses(T, S, [y], [arithmetic(5, 5)], [], 20)


def test_birkhoff_condition_b_finds_a_witness():
    T = lambda n, x: backward_apply(unweighted(), x, n)
    zero = TruncatedVector.zero()
    report = check_birkhoff_condition_b(T, zero, 2, zero, Fraction(1, 2), Fraction(1, 2), [TruncatedVector.unit(3)], 20)
    assert report.verdict == Verdict.PASS
    assert report.witnesses[0].indices == [0, 8]
    banach = check_birkhoff_condition_b(
        T, zero, 2, zero, Fraction(1, 2), Fraction(9, 10), [TruncatedVector.unit(3)], 20, mode="banach", window_lengths=[4]
    )
    assert banach.verdict == Verdict.PASS


def test_birkhoff_condition_b_preconditions():
    T = lambda n, x: x
    zero = TruncatedVector.zero()
    e = [TruncatedVector.unit(0, value=5)]
    assert check_birkhoff_condition_b(T, zero, 1, zero, 1, 1, [zero], 5).verdict == Verdict.FAIL
    assert check_birkhoff_condition_b(T, zero, 1, zero, 1, Fraction(1, 2), e, 5).verdict == Verdict.FAIL
    never = check_birkhoff_condition_b(T, zero, 10, zero, 1, Fraction(1, 2), e, 5)
    assert never.verdict == Verdict.INCONCLUSIVE
    with pytest.raises(PreconditionError):
        check_birkhoff_condition_b(T, zero, 1, zero, 1, Fraction(1, 2), [zero], 5, mode="banach")
    with pytest.raises(ValueError):
        check_birkhoff_condition_b(T, zero, 1, zero, 1, Fraction(1, 2), [zero], 5, mode="upper")
