"""
Variant of the interval-offset shift in which the first interval of every square
generation j = q*q is widened to

    [b**j - b**(j-1), b**j + b**(j-1)].

The widened intervals form the region R; they make the hitting sets of positive upper
(not only upper Banach) density while the level sets E_j stay inside D_j ∪ R, so their
lower density still vanishes.
"""
import math
from typing import Iterator

import numpy as np

from config import DENSE_ARRAY_LIMIT
from constructions.abstractconstruction import AbstractConstruction
from constructions.bmpp import (
    bmpp_exponent,
    bmpp_exponent_array,
    bmpp_level_set,
    level_set,
    min_pair_margin,
    pair_threshold,
)
from dynamics.criteria import check_shift_upper
from dynamics.index_sets import IndexSet, IntervalFamily, difference, from_intervals, union
from dynamics.shift_ops import ExponentWeights
from helpers.arith import Q, ilog, is_square
from helpers.errors import PreconditionError
from models.params import ConstructionParams
from models.reports import BoundCheck, CriterionReport


def square_interval(base: int, j: int) -> tuple[int, int]:
    return base**j - base ** (j - 1), base**j + base ** (j - 1)


def _square_candidates(base: int, n: int) -> list[tuple[int, int]]:
    """Widened intervals that may contain n: only generations ilog(n) and ilog(n) + 1."""
    if n < 1:
        return []
    e = ilog(base, n)
    return [square_interval(base, j) for j in (e, e + 1) if j >= 1 and is_square(j)]


def br_exponent(base: int, n: int) -> int:
    """
    nu(n) for the widened family. A widened interval contains the interval it replaces
    and starts earlier, so its offsets dominate and nu is a max over both families.
    """
    best = bmpp_exponent(base, n)
    for lo, hi in _square_candidates(base, n):
        if lo <= n <= hi:
            best = max(best, n - lo)
    return best


def br_exponent_array(base: int, N: int) -> np.ndarray:
    arr = bmpp_exponent_array(base, N)
    q = 1
    while square_interval(base, q * q)[0] <= N:
        lo, hi = square_interval(base, q * q)
        top = min(hi, N)
        view = arr[lo : top + 1]
        np.maximum(view, np.arange(top - lo + 1, dtype=np.int64), out=view)
        q += 1
    return arr


def br_weights(params: ConstructionParams) -> ExponentWeights:
    b = params.base
    return ExponentWeights(
        params.weight_base,
        lambda n: br_exponent(b, n),
        exponent_array=lambda N: br_exponent_array(b, N),
        label=f"br(b={b})",
        sup_bound=params.weight_base,
    )


def br_hitting_set(params: ConstructionParams, k: int) -> IndexSet:
    """A = {b**(q*q) + l*b**k : 0 <= l <= b**(q*q-1-k), q >= k+1}, generated block by block."""
    if k < 0:
        raise PreconditionError("hitting set level k must be >= 0", {"k": k})
    b = params.base
    spacing = b**k

    def _blocks(N: int) -> Iterator[tuple[int, int]]:
        q = k + 1
        while b ** (q * q) <= N:
            yield b ** (q * q), b ** (q * q - 1)
            q += 1

    def _contains(n: int) -> bool:
        if n < b ** ((k + 1) ** 2):
            return False
        e = ilog(b, n)
        if not is_square(e) or math.isqrt(e) < k + 1:
            return False
        offset = n - b**e
        return offset <= b ** (e - 1) and offset % spacing == 0

    def _elements(N: int) -> Iterator[int]:
        for start, width in _blocks(N):
            yield from range(start, min(N, start + width) + 1, spacing)

    def _count(N: int) -> int:
        return sum((min(N, start + width) - start) // spacing + 1 for start, width in _blocks(N))

    return IndexSet(_contains, f"br-hitting(b={b},k={k})", elements=_elements, counter=_count)


def br_level_set(params: ConstructionParams, j: int) -> IndexSet:
    return level_set(br_weights(params), j, f"E_{j}(b={params.base})")


def br_square_family(params: ConstructionParams) -> IntervalFamily:
    b = params.base
    return IntervalFamily(
        lambda q: iter([square_interval(b, q * q)]),
        start_bound=lambda q: square_interval(b, q * q)[0],
        cover=lambda n: _square_candidates(b, n),
        label=f"R(b={b})",
    )


def br_square_region(params: ConstructionParams) -> IndexSet:
    """R = ∪_(q>=1) [b**(q*q) - b**(q*q-1), b**(q*q) + b**(q*q-1)]."""
    return from_intervals(br_square_family(params))


def square_region_bound(base: int, q: int) -> int:
    """Points of R below b**(q*q) - b**(q*q-1): at most sum_(j<q) (2*b**(j*j-1) + 1)."""
    return sum(2 * base ** (j * j - 1) + 1 for j in range(1, q))


class BRConstruction(AbstractConstruction):
    """
    The widened-square shift. `sets(k=...)` returns the hitting set of level k, the
    level set E_(2k+1), the bmpp level set D_(2k+1) and the region R.
    """

    name = "br"
    level_names = ("k",)

    def __init__(self, params: ConstructionParams | None = None, levels: tuple[int, ...] = (1, 2)):
        self.check_levels = tuple(levels)
        super().__init__(params)

    @property
    def weights(self) -> ExponentWeights:
        return br_weights(self.params)

    def sets(self, k: int = 1) -> dict[str, IndexSet]:
        return {
            "hitting": br_hitting_set(self.params, k),
            "level": br_level_set(self.params, 2 * k + 1),
            "D": bmpp_level_set(self.params, 2 * k + 1),
            "R": br_square_region(self.params),
        }

    def _hitting_checks(self, k: int, horizon: int) -> list[BoundCheck]:
        b = self.params.base
        w = self.weights
        A = br_hitting_set(self.params, k)
        checks = []
        q = k + 1
        while b ** (q * q) + b ** (q * q - 1) <= horizon:
            N = b ** (q * q) + b ** (q * q - 1)
            c = A.count(N)
            checks.append(BoundCheck.compare("hitting_count", c, b ** (q * q - 1 - k), ">=", k=k, q=q, N=N))
            checks.append(
                BoundCheck.compare(
                    "hitting_upper_density",
                    Q(c, N + 1),
                    Q(1, b**k * (b + 1)),
                    ">=",
                    note="finite estimate above the limit b^-k/(b+1)",
                    k=k,
                    q=q,
                )
            )
            q += 1
        elements = A.enumerate_up_to(horizon)
        growth = min((w.exponent(n) - b ** (ilog(b, n) - 1) for n in elements), default=0)
        checks.append(BoundCheck.compare("hitting_growth", growth, 0, ">=", note="nu(n) >= b^(q^2-1) on block q", k=k))
        margin, where = min_pair_margin(w, elements, k)
        checks.append(
            BoundCheck.compare(
                "hitting_pairs",
                0 if margin is None else margin,
                0,
                ">=",
                note="vacuous: fewer than two elements" if margin is None else f"tightest (n, m, p) = {where}",
                k=k,
                elements=len(elements),
            )
        )
        return checks

    def _region_checks(self, horizon: int) -> list[BoundCheck]:
        b = self.params.base
        R = br_square_region(self.params)
        checks = []
        ratios = []
        q = 2
        while b ** (q * q) - b ** (q * q - 1) - 1 <= horizon:
            N = b ** (q * q) - b ** (q * q - 1) - 1
            c = R.count(N)
            checks.append(BoundCheck.compare("square_region_count", c, square_region_bound(b, q), q=q, N=N))
            checks.append(
                BoundCheck.compare(
                    "square_region_count_coarse",
                    c,
                    Q(b ** (q * q - 2 * q + 1), 3),
                    required=False,
                    note="coarse geometric bound, tight only for large bases",
                    q=q,
                )
            )
            ratios.append((q, Q(c, N + 1)))
            q += 1
        for (q0, r0), (q1, r1) in zip(ratios, ratios[1:]):
            checks.append(BoundCheck.compare("square_region_density_decay", r1, r0, "<", q=q1))
        return checks

    def _inclusion_checks(self, horizon: int) -> list[BoundCheck]:
        top = min(horizon, DENSE_ARRAY_LIMIT)
        R = br_square_region(self.params)
        checks = []
        for j in sorted({1} | {2 * k + 1 for k in self.check_levels}):
            E = br_level_set(self.params, j)
            D = bmpp_level_set(self.params, j)
            outside = difference(E, union(D, R)).count(top)
            checks.append(BoundCheck.compare("level_set_inclusion", outside, 0, "==", note="E_j inside D_j ∪ R", j=j, horizon=top))
        return checks

    def _bound_checks(self, horizon: int) -> list[BoundCheck]:
        checks = []
        for k in self.check_levels:
            checks += self._hitting_checks(k, horizon)
        return checks + self._region_checks(horizon) + self._inclusion_checks(horizon)

    def _criterion_reports(self, horizon: int) -> list[CriterionReport]:
        wb = self.params.weight_base
        return [
            check_shift_upper(self.weights, br_hitting_set(self.params, k), k, pair_threshold(wb, k), horizon)
            for k in self.check_levels
        ]
