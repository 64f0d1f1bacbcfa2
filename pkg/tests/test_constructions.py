from fractions import Fraction

import numpy as np
import pytest

from constructions import CONSTRUCTIONS, BGConstruction, BMPPConstruction, VFHCConstruction, getConstruction
from constructions.bg import runs
from constructions.bmpp import (
    bmpp_exponent,
    bmpp_exponent_array,
    bmpp_hitting_set,
    hitting_schedule,
    level_count_bound,
    pair_threshold,
)
from constructions.br import br_exponent, br_exponent_array, br_hitting_set, square_interval
from dynamics.criteria import check_shift_general
from dynamics.densities import banach_density_at
from helpers.errors import CapExceededError, PreconditionError, ScheduleError
from models.params import ConstructionParams
from models.reports import ConditionStatus, Verdict

ORACLE_HORIZON = 10**4


def assert_oracles_agree(A, N):
    """Closed-form membership agrees with the enumeration and the mask on [0, N]."""
    listed = A.enumerate_up_to(N)
    assert [n for n in range(N + 1) if A.contains(n)] == listed
    assert np.flatnonzero(A.mask(N)).tolist() == listed
    assert A.count(N) == len(listed)


def test_registry():
    assert sorted(CONSTRUCTIONS) == ["bg", "bmpp", "br", "vfhc"]
    assert isinstance(getConstruction("vfhc", ConstructionParams.desk()), VFHCConstruction)
    with pytest.raises(PreconditionError) as info:
        getConstruction("bgg")
    assert info.value.witness["construction"] == "bgg"


def test_named_set_suggests_a_name(desk):
    bg = BGConstruction(desk)
    assert bg.named_set("A", p=1).label == "A_1"
    with pytest.raises(PreconditionError):
        bg.named_set("Z", p=1)


# ------------------------------------------------------------------ bmpp


def test_bmpp_exponent_examples():
    assert (bmpp_exponent(10, 9), bmpp_exponent(10, 11), bmpp_exponent(10, 100)) == (0, 2, 2)
    assert bmpp_exponent_array(3, 10).tolist() == [0, 0, 0, 1, 2, 0, 1, 2, 1, 2, 3]
    dense = bmpp_exponent_array(3, 2000)
    assert dense.tolist() == [bmpp_exponent(3, n) for n in range(2001)]


def test_bmpp_hitting_set(desk):
    A = bmpp_hitting_set(desk, 1)
    assert A.enumerate_up_to(1000) == [27, 30, 729, 732, 735]
    assert bmpp_hitting_set(desk, 2).count(ORACLE_HORIZON) == 0
    assert hitting_schedule(desk, 1)(4) == 12
    with pytest.raises(PreconditionError):
        bmpp_hitting_set(desk, -1)


def test_bmpp_rejects_a_short_schedule(desk):
    with pytest.raises(ScheduleError) as info:
        BMPPConstruction(desk.with_updates(j_schedule=[2]))
    assert info.value.witness == {"m": 1, "j_m": 2, "bound": 3}


def test_bmpp_verifies_at_desk_scale(desk):
    report = BMPPConstruction(desk).verify(ORACLE_HORIZON)
    assert report.verdict == Verdict.PASS
    assert report.construction == "bmpp"
    pairs = report.check("hitting_pairs")
    assert [c.parameters["k"] for c in pairs] == [1, 2]
    assert "vacuous" in pairs[1].note
    assert all(c.holds for c in report.check("level_set_count"))
    assert len(report.reports) == 2


def test_bmpp_hitting_windows_reach_the_spacing_density(desk):
    A = bmpp_hitting_set(desk, 1)
    for N in (2, 5, 8):
        assert banach_density_at(A, N, 3**9) == Fraction(1, 3)
    windows = BMPPConstruction(desk).verify(ORACLE_HORIZON).check("hitting_window_density")
    assert [c.parameters["N"] for c in windows] == [2, 5]
    assert all(c.holds and c.lhs == Fraction(1, 3) for c in windows)


def test_level_count_bound_matches_brute_force():
    # intervals of generation j > 1 meeting [0, 100] for base 3
    expected = sum(2 * j + 1 for j in range(2, 6) for l in range(1, 200) if l * 3**j - j <= 100)
    assert level_count_bound(3, 1, 100) == expected


def test_pair_threshold():
    assert pair_threshold(2, 1) == 3
    assert pair_threshold(2, 0) == Fraction(1, 2)


def test_weight_table_columns(desk):
    df = BMPPConstruction(desk).weight_table(10)
    assert list(df.columns) == ["n", "nu", "weight_exponent"]
    assert df["nu"].tolist() == [bmpp_exponent(3, n) for n in range(11)]
    assert df["weight_exponent"].tolist() == [0, 0, 0, 1, 1, -2, 1, 1, -1, 1, 1]


def test_verify_horizon_bounds(desk):
    bmpp = BMPPConstruction(desk)
    with pytest.raises(PreconditionError):
        bmpp.verify(0)
    with pytest.raises(CapExceededError):
        BMPPConstruction(desk.with_updates(max_horizon=100)).verify(1000)


# ------------------------------------------------------------------ br


def test_br_square_intervals(desk):
    assert square_interval(3, 4) == (54, 108)
    assert br_exponent(3, 108) == 54
    assert br_exponent_array(3, 3000).tolist() == [br_exponent(3, n) for n in range(3001)]


def test_br_hitting_density_at_desk_scale(desk):
    A = br_hitting_set(desk, 1)
    assert A.enumerate_up_to(200) == list(range(81, 109, 3))
    N = 3**4 + 3**3
    assert A.count(N) == 10
    assert Fraction(A.count(N), N + 1) >= Fraction(3 ** (4 - 1 - 1), N + 1)
    report = getConstruction("br", desk, levels=(1,)).verify(ORACLE_HORIZON)
    counts = report.check("hitting_count")
    assert counts[0].parameters == {"k": 1, "q": 2, "N": 108}
    assert counts[0].lhs == 10 and counts[0].holds
    assert all(c.holds for c in report.check("hitting_upper_density"))
    assert all(c.holds for c in report.check("level_set_inclusion"))


# ------------------------------------------------------------------ bg


def test_bg_schedule(desk):
    bg = BGConstruction(desk)
    assert [bg.a(k) for k in range(4)] == [0, 15, 420, 98835]
    assert [bg.step(p) for p in (1, 2, 3)] == [3, 81, 19683]
    assert bg.Y_start(3) == 19261
    assert bg.block_of(14) == 1 and bg.block_of(15) == 2
    assert bg.weights.exponent(15) == 0 and bg.weights.exponent(14) == 14


def test_bg_sets(desk):
    bg = BGConstruction(desk)
    assert bg.X().enumerate_up_to(1000) == [0, 15, 16, 420, 421, 422]
    assert bg.A(1).enumerate_up_to(20) == [3, 6, 9, 12, 18]
    assert bg.A(2).enumerate_up_to(ORACLE_HORIZON) == list(range(81, ORACLE_HORIZON + 1, 81))
    assert bg.Y(2).contains(81 * 2 + 14)
    assert bg.Y(2).contains(81 * 2 - 15)
    with pytest.raises(PreconditionError):
        bg.Y(1)


def test_bg_boundary_scan(desk):
    bg = BGConstruction(desk)
    assert bg.boundary.violations == []
    assert bg.boundary.coincidences[0] == (5, 1, 2)


def test_bg_rejects_a_multiple_at_a_block_end():
    with pytest.raises(ScheduleError) as info:
        BGConstruction(ConstructionParams(base=2, weight_base=2, coefficient=1))
    assert info.value.witness == {"l": 1, "p": 2, "k": 2}
    with pytest.raises(PreconditionError):
        BGConstruction(levels=(0,))


def test_bg_thresholds(desk):
    bg = BGConstruction(desk)
    assert bg.thresholds() == [Fraction(1, 2), 1]
    assert bg.thresholds(shift=1) == [1, 2]


def test_bg_literal_thresholds_fail_on_block_starts(desk):
    bg = BGConstruction(desk)
    families = [bg.A(1), bg.A(2)]
    report = check_shift_general(bg.weights, families, bg.thresholds(shift=1), ORACLE_HORIZON)
    assert report.verdict == Verdict.FAIL
    witness = report.condition("ii").witness
    assert witness.value <= 2
    passing = check_shift_general(bg.weights, families, bg.thresholds(), ORACLE_HORIZON)
    assert passing.verdict == Verdict.PASS
    assert passing.condition("i[1]").status == passing.condition("i[2]").status == ConditionStatus.INCONCLUSIVE


def test_bg_verifies_at_desk_scale(desk):
    report = BGConstruction(desk).verify(ORACLE_HORIZON)
    assert report.verdict == Verdict.PASS, [c.name for c in report.failed()]
    assert report.reports[0].condition("disjoint").status == ConditionStatus.PASS
    assert [c.lhs for c in report.check("X_count")] == [6, 6]
    floors = report.check("A_density_floor")
    assert all(c.holds for c in floors)
    assert {c.name for c in report.informational()} >= {"eq_ak_boundary"}


def test_bg_density_bound_is_small(desk):
    bg = BGConstruction(desk)
    assert bg.Y_density_bound(1) < Fraction(1, 3)
    assert bg.Y_density_bound(2) < bg.Y_density_bound(1)


def test_runs():
    starts, ends = runs(np.array([True, True, False, True, False, True]))
    assert starts.tolist() == [0, 3, 5]
    assert ends.tolist() == [1, 3, 5]


# ------------------------------------------------------------------ vfhc


def test_vfhc_schedule(desk):
    v = VFHCConstruction(desk)
    assert [v.m(q) for q in (1, 2, 3, 4)] == [1, 4, 10, 17]
    assert [v.a(k) for k in (1, 2, 3)] == [15, 420, 295665]
    assert [v.d(q) for q in (2, 3, 4)] == [0, 80, 79]
    assert [v.h(q) for q in (2, 3, 4)] == [17, 503, 295748]
    assert (v.L(2), v.L(3)) == (41, 1009)
    assert (v.hindman_depth(1, 2), v.hindman_depth(1, 3)) == (44, 1012)
    assert [v._eq_mk_lhs(q) for q in (2, 3, 4)] == [43, 1089, 768485]


def test_vfhc_schedule_preconditions(desk):
    with pytest.raises(ScheduleError) as info:
        VFHCConstruction(desk.with_updates(m_schedule=[1, 2]))
    assert info.value.witness["q"] == 2
    with pytest.raises(PreconditionError):
        VFHCConstruction(desk, r=2)
    with pytest.raises(PreconditionError):
        VFHCConstruction(desk).m(0)
    with pytest.raises(ValueError):
        desk.with_updates(m_schedule=[2, 4])


def test_vfhc_sets(desk):
    v = VFHCConstruction(desk)
    assert v.B(1).enumerate_up_to(70) == list(range(3, 64, 3))
    family = v.family(1)
    assert family.r == 3 and family.N_r == 1012
    assert set(v.sets(1)) == {"C", "X", "Y", "A", "B", "hindman"}
    with pytest.raises(PreconditionError):
        v.family(2, r=2)


def test_vfhc_hindman_inclusion(desk):
    v = VFHCConstruction(desk)
    for r in (2, 3):
        shadowed, unshadowed = v.hindman_exceptions(1, r, ORACLE_HORIZON)
        assert not unshadowed.any()
    violations, where = v.right_gap(1, ORACLE_HORIZON)
    assert (violations, where) == (0, None)


def test_vfhc_declared_tail(desk):
    v = VFHCConstruction(desk)
    assert v.declared_tail(2) == Fraction(2 * 503 + 1, 3**10) + Fraction(1, 80)
    assert v.declared_tail(3) == Fraction(1, 80)


# ------------------------------------------------------------------ oracle equivalence


@pytest.mark.parametrize(
    "name, key, levels",
    [
        ("bmpp", "hitting", {"k": 1}),
        ("bmpp", "level", {"k": 1}),
        ("bmpp", "S", {"k": 1}),
        ("br", "hitting", {"k": 1}),
        ("br", "level", {"k": 1}),
        ("br", "D", {"k": 1}),
        ("br", "R", {"k": 1}),
        ("bg", "C", {"p": 1}),
        ("bg", "X", {"p": 1}),
        ("bg", "Y", {"p": 1}),
        ("bg", "A", {"p": 1}),
        ("bg", "A", {"p": 2}),
        ("vfhc", "Y", {"p": 1}),
        ("vfhc", "A", {"p": 1}),
        ("vfhc", "B", {"p": 1}),
        ("vfhc", "B", {"p": 2}),
    ],
)
def test_membership_oracles_match_enumeration(desk, name, key, levels):
    A = getConstruction(name, desk).named_set(key, **levels)
    assert_oracles_agree(A, ORACLE_HORIZON)


def test_interval_formulas_match_brute_force(desk):
    bg = BGConstruction(desk)
    Y2 = bg.Y(2)
    brute = set()
    for l in range(1, ORACLE_HORIZON // 81 + 2):
        for ak in (bg.a(0), bg.a(1)):
            brute |= set(range(81 * l + ak - 2, 81 * l + ak + 2))
            brute |= set(range(81 * l - ak - 1, 81 * l - ak + 3))
    assert Y2.enumerate_up_to(ORACLE_HORIZON) == sorted(n for n in brute if 0 <= n <= ORACLE_HORIZON)
    v = VFHCConstruction(desk)
    brute = {n for l in range(1, 130) for n in range(81 * l - 17, 81 * l + 18)}
    assert v.Y(2).enumerate_up_to(ORACLE_HORIZON) == sorted(n for n in brute if n <= ORACLE_HORIZON)
