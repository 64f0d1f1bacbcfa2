from fractions import Fraction

import pytest

from constructions import BGConstruction, BMPPConstruction
from dynamics.hvector import (
    TargetSchedule,
    build_vector,
    check_schedule,
    epsilon_schedule,
    grid_targets,
    schedule_distances,
    verify_orbit,
)
from dynamics.index_sets import empty, from_elements
from dynamics.shift_ops import Space, TruncatedVector, unweighted
from helpers.errors import BlockCollisionError, PreconditionError
from models.reports import ConditionStatus, CriterionId, Verdict

Y1 = TruncatedVector.from_entries({0: Fraction(-1, 4), 1: Fraction(-1, 4)})
Y2 = TruncatedVector.from_entries({0: Fraction(-1, 4)})


def test_epsilon_schedule():
    assert epsilon_schedule(2) == [Fraction(1, 8), Fraction(1, 96)]
    assert epsilon_schedule(2, sup_weight=2) == [Fraction(1, 16), Fraction(1, 384)]


def test_grid_targets():
    targets = grid_targets(3, Fraction(1, 4))
    assert targets[:2] == [Y1, Y2]
    assert targets[2] == TruncatedVector.from_entries({0: Fraction(-1, 4), 1: Fraction(1, 4)})
    assert all(y.max_index <= p for p, y in enumerate(targets, start=1))
    with pytest.raises(PreconditionError):
        grid_targets(0)


def test_target_schedule_validation():
    schedule = TargetSchedule(targets=[Y1], families=[from_elements([10])])
    assert schedule.epsilon == [Fraction(1, 8)]
    assert schedule.p_max == 1 and schedule.slack == Fraction(1, 2)
    with pytest.raises(ValueError):
        TargetSchedule(targets=[Y1, Y2], families=[from_elements([10])])
    with pytest.raises(ValueError):
        TargetSchedule(targets=[TruncatedVector.unit(0, Space.lp(2))], families=[from_elements([10])])


def test_check_schedule_failures():
    gap = check_schedule(TargetSchedule(targets=[Y1, Y2], families=[from_elements([10]), from_elements([11])]), 100)
    assert gap.criterion_id == CriterionId.SCHEDULE
    assert gap.condition("gap").witness.indices == [10, 11, 1]
    same = check_schedule(TargetSchedule(targets=[Y1, Y2], families=[from_elements([10]), from_elements([10])]), 100)
    assert same.condition("disjoint").witness.indices == [10, 1, 2]
    wide = check_schedule(TargetSchedule(targets=[TruncatedVector.unit(3)], families=[empty()]), 100)
    assert wide.condition("support").status == ConditionStatus.FAIL
    big = check_schedule(TargetSchedule(targets=[TruncatedVector.unit(0, value=2)], families=[empty()]), 100)
    assert big.condition("entry_bound").witness.indices == [1]


def test_build_vector_detects_collisions():
    schedule = TargetSchedule(targets=[Y1, Y2], families=[from_elements([10]), from_elements([11])])
    with pytest.raises(BlockCollisionError) as info:
        build_vector(schedule, unweighted(), 100)
    assert info.value.witness == {"index": 11, "first": [10, 1], "second": [11, 2]}


def test_build_vector_rejects_a_bad_schedule():
    schedule = TargetSchedule(targets=[TruncatedVector.unit(0, value=2)], families=[from_elements([10])])
    with pytest.raises(PreconditionError):
        build_vector(schedule, unweighted(), 100)


def test_unweighted_vector_reproduces_targets():
    schedule = TargetSchedule(targets=[Y1], families=[from_elements([10, 20])])
    x = build_vector(schedule, unweighted(), 100)
    assert x.entries == {10: Fraction(-1, 4), 11: Fraction(-1, 4), 20: Fraction(-1, 4), 21: Fraction(-1, 4)}
    assert schedule_distances(schedule, unweighted(), x, 1, [10, 20]) == [Fraction(1, 4), 0]


def test_empty_family_is_inconclusive():
    schedule = TargetSchedule(targets=[Y1], families=[empty()])
    report = verify_orbit(schedule, unweighted(), TruncatedVector.zero(), 100)
    assert report.verdict == Verdict.INCONCLUSIVE


def test_for_construction_needs_families(desk):
    with pytest.raises(PreconditionError):
        TargetSchedule.for_construction(BMPPConstruction(desk), 2)


def test_hypercyclic_vector_on_the_block_shift(desk):
    bg = BGConstruction(desk)
    schedule = TargetSchedule.for_construction(bg, 2)
    assert schedule.targets == [Y1, Y2]
    assert schedule.slack == Fraction(1, 4)
    x = build_vector(schedule, bg.weights, 10**4)
    assert x[3] == Fraction(-1, 4) / 2**3
    report = verify_orbit(schedule, bg.weights, x, 10**4)
    assert report.criterion_id == CriterionId.ORBIT
    assert report.verdict == Verdict.PASS
    assert report.parameters["safe_horizon"] == 10**4 - 2
    for q in (1, 2):
        condition = report.condition(f"orbit_{q}")
        assert condition.status == ConditionStatus.PASS
        assert condition.witness.value <= Fraction(1, 2**q) + Fraction(1, 4)
        assert condition.details["bound"] == str(Fraction(1, 2**q) + Fraction(1, 4))
