"""
End-to-end checks at desk scale (base 3, weight base 2, coefficient 5, m_schedule 1, 4, 10).

Horizons of 10**6 are marked slow; run them with `pytest -m slow`.
"""
from fractions import Fraction

import pytest

from constructions import BGConstruction, VFHCConstruction
from constructions.bmpp import bmpp_hitting_set, bmpp_level_set, bmpp_weights, level_density_series, min_pair_margin
from constructions.br import br_hitting_set
from dynamics.criteria import check_shift_general
from dynamics.densities import counts_at, hindman_profile, natural_density_profile
from dynamics.hvector import TargetSchedule, build_vector, verify_orbit
from models.reports import ConditionStatus, Verdict


@pytest.mark.parametrize("k, horizon", [(1, 10**4), (2, 10**4), (2, 10**5)])
def test_hitting_set_pairs_clear_the_bound(desk, k, horizon):
    w = bmpp_weights(desk)
    elements = bmpp_hitting_set(desk, k).enumerate_up_to(horizon)
    margin, where = min_pair_margin(w, elements, k)
    if len(elements) < 2:
        assert margin is None
        return
    assert margin >= 0
    n, m, p = where
    assert w.varpi(n - m + p) >= 2 ** (k + p)


@pytest.mark.slow
@pytest.mark.parametrize("k", [1, 2])
def test_level_set_counts_stay_below_the_series_bound(desk, k):
    Ns = [10**3, 10**4, 10**5, 10**6]
    s1, s2 = level_density_series(desk.base, k)
    for N, c in zip(Ns, counts_at(bmpp_level_set(desk, 2 * k + 1), Ns)):
        assert c <= (N + 1) * s1 + s2


def test_widened_hitting_set_density_floor(desk):
    q, k, b = 2, 1, desk.base
    N = b ** (q * q) + b ** (q * q - 1)
    count = br_hitting_set(desk, k).count(N)
    assert Fraction(count, N + 1) >= Fraction(b ** (q * q - 1 - k), N + 1)


def test_block_shift_criterion_passes(desk):
    bg = BGConstruction(desk)
    assert bg.boundary.violations == []
    report = check_shift_general(bg.weights, [bg.A(1), bg.A(2)], bg.thresholds(), 10**4, growth_floor=desk.weight_base)
    assert report.verdict == Verdict.PASS
    assert report.condition("ii").status == ConditionStatus.PASS
    assert report.condition("disjoint").status == ConditionStatus.PASS


@pytest.mark.slow
def test_block_shift_lower_density_floor(desk):
    bg = BGConstruction(desk)
    N = 10**6
    x, y, a = (counts_at(S, [N])[0] for S in (bg.X(), bg.Y_union(1), bg.A(1)))
    delta = bg.Y_density_bound(1)
    slack = Fraction(1 + x, N + 1) + max(Fraction(0), Fraction(y, N + 1) - delta)
    profile = natural_density_profile(bg.A(1), [N], mode="lower")
    assert profile.value_at(N) == Fraction(a, N + 1)
    assert profile.running_inf[-1] >= Fraction(1, bg.step(1)) - delta - slack


def test_hypercyclic_vector_orbit_bounds(desk):
    bg = BGConstruction(desk)
    schedule = TargetSchedule.for_construction(bg, 2)
    x = build_vector(schedule, bg.weights, 10**4)
    report = verify_orbit(schedule, bg.weights, x, 10**4)
    assert report.verdict == Verdict.PASS
    assert schedule.slack <= Fraction(1, 2 ** (schedule.p_max - 1))


@pytest.mark.slow
def test_hindman_profile_floor(desk):
    v = VFHCConstruction(desk)
    N = 10**6
    floors = {}
    for r in (2, 3):
        profile = hindman_profile(v.B(1), v.hindman_depth(1, r), [N])
        deep = v.Y_union(r).count(N)
        floors[r] = 1 - Fraction(deep, N + 1) - v.declared_tail(r)
        assert profile.last >= floors[r]
    assert floors[3] > Fraction(9, 10)
