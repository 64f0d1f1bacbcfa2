"""
A weighted backward shift on c0 whose hitting sets have positive upper Banach density
while the level sets D_j = {n >= 1 : varpi_n >= weight_base**j} become sparse.

The weights come from the intervals

    S_(j,l) = [l*b**j - j, l*b**j + j],   j, l >= 1,

with varpi_n = weight_base ** nu, nu the largest offset n - (l*b**j - j) over the intervals
containing n (nu = 0 when n lies in none of them). Only the two intervals of generation j
with l in {floor((n+j)/b**j) - 1, floor((n+j)/b**j)} can contain n, so membership and
weights are decided in O(log n) integer operations.
"""
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from config import DENSE_ARRAY_LIMIT
from constructions.abstractconstruction import AbstractConstruction
from dynamics.criteria import check_shift_upper
from dynamics.densities import banach_density_at, counts_at, decade_horizons
from dynamics.index_sets import IndexSet, IntervalFamily, difference, from_intervals
from dynamics.shift_ops import ExponentWeights
from helpers.arith import Q, certified_series, ilog
from helpers.errors import PreconditionError, ScheduleError
from models.params import ConstructionParams
from models.reports import BoundCheck, CriterionReport

SERIES_TOLERANCE = Fraction(1, 10**9)


def bmpp_exponent(base: int, n: int) -> int:
    """
    nu(n): largest offset of n inside an interval S_(j,l), 0 if n is in none.

    Examples (base 10):
        >>> bmpp_exponent(10, 9), bmpp_exponent(10, 11), bmpp_exponent(10, 100)
        (0, 2, 2)
    """
    best = 0
    j = 1
    while base**j - j <= n:
        step = base**j
        top = (n + j) // step
        for l in (top - 1, top):
            start = l * step - j
            if l >= 1 and start <= n <= l * step + j:
                best = max(best, n - start)
        j += 1
    return best


def bmpp_exponent_array(base: int, N: int) -> np.ndarray:
    arr = np.zeros(N + 1, dtype=np.int64)
    j = 1
    while base**j - j <= N:
        step = base**j
        for nu in range(2 * j + 1):
            start = step - j + nu
            if start > N:
                break
            view = arr[start::step]
            np.maximum(view, nu, out=view)
        j += 1
    return arr


def bmpp_intervals(params: ConstructionParams, min_level: int = 1) -> IntervalFamily:
    """The intervals S_(j,l) with j >= min_level; generation g holds j = min_level + g - 1."""
    b = params.base

    def _generation(g: int) -> Iterator[tuple[int, int]]:
        j = min_level + g - 1
        step = b**j
        l = 1
        while True:
            yield l * step - j, l * step + j
            l += 1

    def _cover(n: int) -> list[tuple[int, int]]:
        found = []
        j = max(min_level, 1)
        while b**j - j <= n:
            step = b**j
            top = (n + j) // step
            found.extend((l * step - j, l * step + j) for l in (top - 1, top) if l >= 1)
            j += 1
        return found

    return IntervalFamily(
        _generation,
        start_bound=lambda g: b ** (min_level + g - 1) - (min_level + g - 1),
        cover=_cover,
        label=f"S_(j,l), j>={min_level}",
    )


def bmpp_weights(params: ConstructionParams) -> ExponentWeights:
    b = params.base
    return ExponentWeights(
        params.weight_base,
        lambda n: bmpp_exponent(b, n),
        exponent_array=lambda N: bmpp_exponent_array(b, N),
        label=f"bmpp(b={b})",
        sup_bound=params.weight_base,
    )


def hitting_schedule(params: ConstructionParams, k: int):
    """
    m -> j_m for the hitting set of level k.

    The explicit `j_schedule` prefix is used first; later entries are max(m*b**k, j_(m-1) + 1).

    Raises:
        ScheduleError: an explicit entry has j_m < m * b**k.
    """
    spacing = params.base**k
    explicit = list(params.j_schedule or [])
    for m, j in enumerate(explicit, start=1):
        if j < m * spacing:
            raise ScheduleError(
                f"j_{m} = {j} is below m*b^k = {m * spacing}", {"m": m, "j_m": j, "bound": m * spacing}
            )

    @lru_cache(maxsize=None)
    def j_of(m: int) -> int:
        if m <= len(explicit):
            return explicit[m - 1]
        previous = j_of(m - 1) if m > 1 else 0
        return max(m * spacing, previous + 1)

    return j_of


def bmpp_hitting_set(params: ConstructionParams, k: int) -> IndexSet:
    """
    A = {b**j_m + l*b**k : 0 <= l <= m, m >= 1}.

    The block of m lies in [b**j_m, b**(j_m + 1)), so n is located by its integer
    logarithm. Elements are generated block by block (sparse).
    """
    if k < 0:
        raise PreconditionError("hitting set level k must be >= 0", {"k": k})
    b = params.base
    spacing = b**k
    j_of = hitting_schedule(params, k)

    def _blocks(N: int) -> Iterator[tuple[int, int]]:
        m = 1
        while b ** j_of(m) <= N:
            yield m, b ** j_of(m)
            m += 1

    def _contains(n: int) -> bool:
        if n < b ** j_of(1):
            return False
        e = ilog(b, n)
        m = 1
        while j_of(m) < e:
            m += 1
        if j_of(m) != e:
            return False
        offset = n - b**e
        return offset <= m * spacing and offset % spacing == 0

    def _elements(N: int) -> Iterator[int]:
        for m, start in _blocks(N):
            yield from range(start, min(N, start + m * spacing) + 1, spacing)

    def _count(N: int) -> int:
        return sum(min(m, (N - start) // spacing) + 1 for m, start in _blocks(N))

    return IndexSet(_contains, f"bmpp-hitting(b={b},k={k})", elements=_elements, counter=_count)


def level_set(w: ExponentWeights, j: int, label: str) -> IndexSet:
    """{n >= 1 : varpi_n >= weight_base**j}."""
    if j < 1:
        raise PreconditionError("level set threshold must be >= 1", {"j": j})

    def _mask(N: int) -> np.ndarray:
        arr = w.exponents(N) >= j
        arr[0] = False
        return arr

    return IndexSet(lambda n: n >= 1 and w.exponent(n) >= j, label, mask=_mask)


def bmpp_level_set(params: ConstructionParams, j_threshold: int) -> IndexSet:
    return level_set(bmpp_weights(params), j_threshold, f"D_{j_threshold}(b={params.base})")


def level_count_bound(base: int, k: int, N: int) -> int:
    """Number of points of the intervals S_(j,l), j > k, meeting [0, N]: sum (2j+1) * floor((N+j)/b**j)."""
    total = 0
    j = k + 1
    while base**j <= N + j:
        total += (2 * j + 1) * ((N + j) // base**j)
        j += 1
    return total


def level_density_series(base: int, k: int) -> tuple[Fraction, Fraction]:
    """
    Certified values (with remainders) of

        S1 = sum_(j>k) (2j+1)/b**j,   S2 = sum_(j>k) 2j**2/b**j

    returned as upper bounds S1 + tail1, S2 + tail2.
    """
    s1, t1, _ = certified_series(
        lambda j: Q(2 * j + 1, base**j),
        k + 1,
        lambda J: Q(2 * J + 3, (2 * J + 1) * base),
        SERIES_TOLERANCE,
    )
    s2, t2, _ = certified_series(
        lambda j: Q(2 * j * j, base**j),
        k + 1,
        lambda J: Q((J + 1) ** 2, J * J * base),
        SERIES_TOLERANCE,
    )
    return s1 + t1, s2 + t2


def pair_differences(elements: list[int], chunk: int = 256) -> np.ndarray:
    """Distinct differences n - m > 0 over pairs of a sorted list."""
    arr = np.asarray(elements, dtype=np.int64)
    found = np.zeros(0, dtype=np.int64)
    for lo in range(1, len(arr), chunk):
        rows = arr[lo : lo + chunk]
        diffs = np.subtract.outer(rows, arr[: lo + len(rows)])
        found = np.union1d(found, diffs[diffs > 0])
    return found


def min_pair_margin(w: ExponentWeights, elements: list[int], k: int) -> tuple[int | None, tuple[int, int, int] | None]:
    """
    min over pairs n > m and 0 <= p <= k of nu(n - m + p) - (k + p), with a minimizing (n, m, p).

    The margin only depends on n - m, so each distinct difference is evaluated once.
    """
    best, where = None, None
    for d in pair_differences(elements).tolist():
        for p in range(k + 1):
            margin = w.exponent(d + p) - (k + p)
            if best is None or margin < best:
                best, where = margin, (d, p)
    if where is None:
        return None, None
    d, p = where
    members = set(elements)
    n = next(n for n in elements if n - d in members)
    return best, (n, n - d, p)


class BMPPConstruction(AbstractConstruction):
    """
    The interval-offset shift with sparse hitting sets.

    `sets(k=...)` returns the hitting set of level k, the level set D_(2k+1) and the
    interval union S of generations j > k that must contain it.
    """

    name = "bmpp"
    level_names = ("k",)

    def __init__(self, params: ConstructionParams | None = None, levels: tuple[int, ...] = (1, 2)):
        self.check_levels = tuple(levels)
        super().__init__(params)

    def _validate(self) -> None:
        for k in self.check_levels:
            hitting_schedule(self.params, k)

    @property
    def weights(self) -> ExponentWeights:
        return bmpp_weights(self.params)

    def sets(self, k: int = 1) -> dict[str, IndexSet]:
        return {
            "hitting": bmpp_hitting_set(self.params, k),
            "level": bmpp_level_set(self.params, 2 * k + 1),
            "S": from_intervals(bmpp_intervals(self.params, k + 1)),
        }

    def _hitting_checks(self, k: int, horizon: int) -> list[BoundCheck]:
        b = self.params.base
        w = self.weights
        A = bmpp_hitting_set(self.params, k)
        j_of = hitting_schedule(self.params, k)
        elements = A.enumerate_up_to(horizon)
        checks = [
            BoundCheck.compare("hitting_min", b ** j_of(1), k, ">=", note="A lies in [k, oo)", k=k),
        ]
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
        # the block of m starts at b**j_m, so j_m = ilog(b, n)
        growth = min((w.exponent(n) - ilog(b, n) for n in elements), default=0)
        checks.append(
            BoundCheck.compare("hitting_growth", growth, 0, ">=", note="nu(n) >= j_m on block m", k=k)
        )
        m = 1
        while b ** j_of(m) + m * b**k <= horizon:
            m += 1
        # block m - 1 is the last complete one; a window of i spacings holds i of its elements
        for i in range(1, m):
            N = i * b**k - 1
            checks.append(
                BoundCheck.compare(
                    "hitting_window_density",
                    banach_density_at(A, N, horizon - N),
                    Q(1, b**k),
                    ">=",
                    note=f"best window of length {N + 1} in [0, {horizon}]",
                    k=k,
                    N=N,
                )
            )
        return checks

    def _level_checks(self, k: int, horizon: int) -> list[BoundCheck]:
        b = self.params.base
        top = min(horizon, DENSE_ARRAY_LIMIT)
        D = bmpp_level_set(self.params, 2 * k + 1)
        S = from_intervals(bmpp_intervals(self.params, k + 1))
        outside = difference(D, S).count(top)
        checks = [BoundCheck.compare("level_set_cover", outside, 0, "==", note="D_(2k+1) inside S_(j,l), j > k", k=k, horizon=top)]
        s1, s2 = level_density_series(b, k)
        Ns = decade_horizons(top)
        for N, c in zip(Ns, counts_at(D, Ns)):
            checks.append(BoundCheck.compare("level_set_count", c, level_count_bound(b, k, N), k=k, N=N))
            checks.append(BoundCheck.compare("level_set_density", c, (N + 1) * s1 + s2, k=k, N=N))
        checks.append(
            BoundCheck.compare(
                "level_set_limit",
                s1,
                Q(1),
                "<",
                note=f"upper density of D_(2k+1) <= {float(s1):.3g}",
                required=False,
                k=k,
            )
        )
        return checks

    def _bound_checks(self, horizon: int) -> list[BoundCheck]:
        checks = []
        for k in self.check_levels:
            checks += self._hitting_checks(k, horizon)
            checks += self._level_checks(k, horizon)
        return checks

    def _criterion_reports(self, horizon: int) -> list[CriterionReport]:
        wb = self.params.weight_base
        return [
            check_shift_upper(self.weights, bmpp_hitting_set(self.params, k), k, pair_threshold(wb, k), horizon)
            for k in self.check_levels
        ]


def pair_threshold(weight_base: int, k: int) -> Fraction:
    """A threshold M < weight_base**(2k), the pair bound certified for p = k."""
    return Q(weight_base ** (2 * k)) - 1 if k else Q(1, 2)
