"""
Block weights: varpi_n = weight_base ** (n - a_(k-1)) on [a_(k-1), a_k), so varpi drops back
to 1 at every block start a_k and the shift is not chaotic, with

    a_0 = 0,   a_k = c * (b**1 + b**4 + ... + b**(k*k)).

The frequently hypercyclic families are thinned multiples of b**(p*p):

    C_p = {l * b**(p*p) : l >= 1}
    X   = ∪_(k>=0) [a_k, a_k + k]
    Y_q = ∪_(l>=1) ∪_(k<q) [l*b**(q*q) + a_k - q, l*b**(q*q) + a_k + q)
                           ∪ (l*b**(q*q) - a_k - q, l*b**(q*q) - a_k + q]
    A_p = C_p \\ (X ∪ ∪_(q>p) Y_q)

Only k < q matters in Y_q because a_k = m*b**(q*q) + a_(q-1) for k >= q; every set here
decides membership by integer division against those q offsets.
"""
import threading
from fractions import Fraction
from typing import Callable, Iterator, NamedTuple

import numpy as np

from config import DENSE_ARRAY_LIMIT
from constructions.abstractconstruction import AbstractConstruction
from dynamics.criteria import check_shift_general
from dynamics.densities import counts_at, decade_horizons
from dynamics.index_sets import (
    IndexSet,
    IntervalFamily,
    arithmetic,
    difference,
    from_intervals,
    intersection,
    union,
    union_of_levels,
)
from dynamics.shift_ops import ExponentWeights
from helpers.arith import Q, ceil_div, certified_series
from helpers.errors import PreconditionError, ScheduleError
from models.params import ConstructionParams
from models.reports import BoundCheck, CriterionReport

SERIES_TOLERANCE = Fraction(1, 10**9)


class BGSets(NamedTuple):
    p: int
    C: IndexSet
    X: IndexSet
    Y: Callable[[int], IndexSet]
    """q -> Y_q, for q >= 2"""
    Y_union: IndexSet
    """∪_(q>p) Y_q"""
    A: IndexSet


class BoundaryScan(NamedTuple):
    violations: list[tuple[int, int, int]]
    """(l, p, k) with a multiple l*step(p) too close to a block end"""
    coincidences: list[tuple[int, int, int]]
    """(l, p, k) with l*step(p) == a_(k-1) exactly"""


def block_exponent_array(a: Callable[[int], int], N: int) -> np.ndarray:
    arr = np.zeros(N + 1, dtype=np.int64)
    k = 1
    while a(k - 1) <= N:
        lo, hi = a(k - 1), min(a(k), N + 1)
        arr[lo:hi] = np.arange(hi - lo, dtype=np.int64)
        k += 1
    return arr


def runs(mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Starts and ends of the maximal runs of True in a boolean mask."""
    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.diff(padded)
    return np.flatnonzero(edges == 1), np.flatnonzero(edges == -1) - 1


class BGConstruction(AbstractConstruction):
    """
    Frequently hypercyclic, non-chaotic block shift.

    Subclasses change the block ends `a(k)`, the step of `C_p` and the sets `Y_q`; the
    weights, X, A_p, the boundary pre-check and the criterion run are shared.
    """

    name = "bg"
    level_names = ("p",)

    def __init__(self, params: ConstructionParams | None = None, levels: tuple[int, ...] = (1, 2)):
        if not levels or min(levels) < 1:
            raise PreconditionError("family levels must be >= 1", {"levels": list(levels)})
        self.check_levels = tuple(sorted(levels))
        self._lock = threading.RLock()
        self._ends: list[int] = [0]
        self._Y: dict[int, IndexSet] = {}
        self.boundary: BoundaryScan | None = None
        super().__init__(params)

    # ------------------------------------------------------------------ schedule

    def block_term(self, k: int) -> int:
        """a_k - a_(k-1)."""
        return self.params.coefficient * self.params.base ** (k * k)

    def a(self, k: int) -> int:
        with self._lock:
            while len(self._ends) <= k:
                self._ends.append(self._ends[-1] + self.block_term(len(self._ends)))
            return self._ends[k]

    def step(self, p: int) -> int:
        """Spacing of C_p."""
        return self.params.base ** (p * p)

    def block_of(self, n: int) -> int:
        """The k >= 1 with a_(k-1) <= n < a_k."""
        k = 1
        while self.a(k) <= n:
            k += 1
        return k

    def _validate(self) -> None:
        self.boundary = self.scan_boundaries()
        if self.boundary.violations:
            l, p, k = self.boundary.violations[0]
            raise ScheduleError(
                f"multiple {l}*{self.step(p)} lies within {p} of the ends of block {k}",
                {"l": l, "p": p, "k": k},
            )

    def scan_boundaries(self) -> BoundaryScan:
        """
        For every p, k in range: the multiples l*step(p) in [a_(k-1), a_k) must satisfy
        a_(k-1) + p <= l*step(p) and l*step(p) + p < a_k. Only the first and the last
        multiple of each block can fail. A multiple equal to a_(k-1) is recorded as a
        coincidence, any other failure as a violation.
        """
        cap = self.params.max_horizon
        violations, coincidences = [], []
        p = 1
        while p <= self.params.max_level and self.step(p) <= cap:
            s = self.step(p)
            k = 1
            while self.a(k - 1) <= cap and k <= self.params.max_level:
                lo, hi = self.a(k - 1), self.a(k)
                first = max(s, ceil_div(lo, s) * s)
                last = (hi - 1) // s * s
                if first <= last:
                    if first < lo + p:
                        (coincidences if first == lo else violations).append((first // s, p, k))
                    if last + p >= hi:
                        violations.append((last // s, p, k))
                k += 1
            p += 1
        return BoundaryScan(violations, coincidences)

    # ------------------------------------------------------------------ weights and sets

    @property
    def weights(self) -> ExponentWeights:
        return ExponentWeights(
            self.params.weight_base,
            lambda n: n - self.a(self.block_of(n) - 1),
            exponent_array=lambda N: block_exponent_array(self.a, N),
            label=f"{self.name}(b={self.params.base},c={self.params.coefficient})",
            sup_bound=self.params.weight_base,
        )

    def C(self, p: int) -> IndexSet:
        s = self.step(p)
        return arithmetic(s, s, label=f"C_{p}")

    def X(self) -> IndexSet:
        def _cover(n: int) -> list[tuple[int, int]]:
            k = self.block_of(n) - 1
            return [(self.a(k), self.a(k) + k)]

        family = IntervalFamily(
            lambda g: iter([(self.a(g - 1), self.a(g - 1) + g - 1)]),
            start_bound=lambda g: self.a(g - 1),
            cover=_cover,
            label="X",
        )
        return from_intervals(family)

    def Y_start(self, q: int) -> int:
        """A lower bound for min Y_q, nondecreasing in q."""
        return max(0, self.step(q) - self.a(q - 1) - q + 1)

    def _make_Y(self, q: int) -> IndexSet:
        s = self.step(q)
        offsets = [self.a(k) for k in range(q)]

        def _generation(l: int) -> Iterator[tuple[int, int]]:
            c = l * s
            intervals = [(c + ak - q, c + ak + q - 1) for ak in offsets]
            intervals += [(c - ak - q + 1, c - ak + q) for ak in offsets]
            return iter(sorted(intervals))

        def _cover(n: int) -> list[tuple[int, int]]:
            found = []
            for ak in offsets:
                l = (n - ak + q) // s
                if l >= 1:
                    found.append((l * s + ak - q, l * s + ak + q - 1))
                l = (n + ak + q - 1) // s
                if l >= 1:
                    found.append((l * s - ak - q + 1, l * s - ak + q))
            return found

        family = IntervalFamily(
            _generation,
            start_bound=lambda l: l * s - offsets[-1] - q + 1,
            cover=_cover,
            label=f"Y_{q}",
        )
        return from_intervals(family)

    def Y(self, q: int) -> IndexSet:
        if q < 2:
            raise PreconditionError("Y_q is defined for q >= 2", {"q": q})
        with self._lock:
            cached = self._Y.get(q)
        if cached is None:
            cached = self._make_Y(q)
            with self._lock:
                self._Y.setdefault(q, cached)
        return cached

    def Y_union(self, p: int) -> IndexSet:
        """∪_(q>p) Y_q."""
        return union_of_levels(self.Y, max(p + 1, 2), self.Y_start, f"∪_(q>{p}) Y_q")

    def A(self, p: int) -> IndexSet:
        return difference(self.C(p), union(self.X(), self.Y_union(p))).relabeled(f"A_{p}")

    def sets(self, p: int = 1) -> dict[str, IndexSet]:
        return {"C": self.C(p), "X": self.X(), "Y": self.Y_union(p), "A": self.A(p)}

    def family(self, p: int) -> BGSets:
        return BGSets(p=p, C=self.C(p), X=self.X(), Y=self.Y, Y_union=self.Y_union(p), A=self.A(p))

    def thresholds(self, levels: tuple[int, ...] | None = None, shift: int = 2) -> list[Fraction]:
        """M_p = weight_base**(p - shift); shift = 2 keeps M_1 below the boundary value 1."""
        wb = self.params.weight_base
        return [Q(wb) ** (p - shift) for p in (levels or self.check_levels)]

    # ------------------------------------------------------------------ density bounds

    def Y_density_bound(self, p: int) -> Fraction:
        """Upper density bound of ∪_(q>p) Y_q: sum_(q>p) 4q^2 / b^(q^2), certified."""
        b = self.params.base
        first = max(p + 1, 2)
        total, tail, _ = certified_series(
            lambda q: Q(4 * q * q, b ** (q * q)),
            first,
            lambda J: Q((J + 1) ** 2, J * J * b ** (2 * J + 1)),
            SERIES_TOLERANCE,
        )
        return total + tail

    def Y_count_bound(self, p: int, N: int) -> int:
        """Exact finite bound on card(∪_(q>p) Y_q ∩ [0, N]): 2q points per interval meeting [0, N]."""
        total = 0
        q = max(p + 1, 2)
        while self.Y_start(q) <= N:
            s = self.step(q)
            for k in range(q):
                ak = self.a(k)
                total += 2 * q * (max(0, (N + q - ak) // s) + (N + ak + q - 1) // s)
            q += 1
        return total

    def _schedule_checks(self, horizon: int) -> list[BoundCheck]:
        b, c = self.params.base, self.params.coefficient
        checks = []
        q = 2
        while self.Y_start(q) <= horizon:
            checks.append(
                BoundCheck.compare("Y_reduction", self.a(q - 1), q, ">", note="a_(q-1) > q", q=q)
            )
            checks.append(BoundCheck.compare("a_growth", self.a(q - 1), (c + 1) * b ** ((q - 1) ** 2), q=q))
            checks.append(
                BoundCheck.compare(
                    "a_growth_coarse", self.a(q - 1), 12 * c * b ** (q * q - 2 * q), required=False, q=q
                )
            )
            q += 1
        for p in self.check_levels:
            checks.append(BoundCheck.compare("p_vs_base", p, b ** ((p - 1) ** 2), note="p <= b^((p-1)^2)", p=p))
        return checks

    def _boundary_checks(self) -> list[BoundCheck]:
        scan = self.boundary or self.scan_boundaries()
        return [
            BoundCheck.compare("eq_ak", len(scan.violations), 0, "=="),
            BoundCheck.compare(
                "eq_ak_boundary",
                len(scan.coincidences),
                0,
                "==",
                required=False,
                note=f"l*step(p) == a_(k-1) at (l, p, k) = {scan.coincidences[:3]}; M_1 < 1 absorbs them",
            ),
        ]

    def _set_checks(self, horizon: int) -> list[BoundCheck]:
        top = min(horizon, DENSE_ARRAY_LIMIT)
        checks = []
        for k in range(4):
            checks.append(BoundCheck.compare("non_chaotic", self.weights.exponent(self.a(k)), 0, "==", k=k))
        families = {p: self.A(p) for p in self.check_levels}
        for p in self.check_levels:
            for q in self.check_levels:
                if p < q:
                    both = intersection(families[p], families[q]).count(top)
                    checks.append(BoundCheck.compare("disjoint", both, 0, "==", p=p, q=q, horizon=top))
        q = 2
        while self.Y_start(q) <= top:
            outside = difference(self.C(q), self.Y(q)).count(top)
            checks.append(BoundCheck.compare("C_in_Y", outside, 0, "==", q=q, horizon=top))
            q += 1
        X = self.X()
        Ns = decade_horizons(top)
        for N, cX in zip(Ns, counts_at(X, Ns)):
            expected = 0
            k = 0
            while self.a(k) <= N:
                expected += min(k, N - self.a(k)) + 1
                k += 1
            checks.append(BoundCheck.compare("X_count", cX, expected, "==", N=N))
        return checks

    def _density_checks(self, horizon: int) -> list[BoundCheck]:
        top = min(horizon, DENSE_ARRAY_LIMIT)
        Ns = decade_horizons(top)
        X = self.X()
        cX = counts_at(X, Ns)
        checks = []
        for p in self.check_levels:
            delta = self.Y_density_bound(p)
            floor = Q(1, self.step(p)) - delta
            checks.append(BoundCheck.compare("A_density_floor", floor, 0, ">", p=p))
            checks.append(
                BoundCheck.compare(
                    "Y_density_coarse",
                    delta,
                    Q(1, 9 * self.step(p)),
                    required=False,
                    note="upper density of ∪_(q>p) Y_q against b^(-p^2)/9",
                    p=p,
                )
            )
            Yu = self.Y_union(p)
            cY = counts_at(Yu, Ns)
            cA = counts_at(self.A(p), Ns)
            for N, x, y, a in zip(Ns, cX, cY, cA):
                checks.append(BoundCheck.compare("Y_count", y, self.Y_count_bound(p, N), p=p, N=N))
                slack = Q(1 + x, N + 1) + max(Q(0), Q(y, N + 1) - delta)
                checks.append(BoundCheck.compare("A_density", Q(a, N + 1), floor - slack, ">=", p=p, N=N))
            checks.append(
                BoundCheck.compare(
                    "A_density_coarse",
                    Q(cA[-1], Ns[-1] + 1),
                    Q(8, 9 * self.step(p)),
                    ">=",
                    required=False,
                    p=p,
                    N=Ns[-1],
                )
            )
        return checks

    def _bound_checks(self, horizon: int) -> list[BoundCheck]:
        return (
            self._boundary_checks()
            + self._schedule_checks(horizon)
            + self._set_checks(horizon)
            + self._density_checks(horizon)
        )

    def _criterion_reports(self, horizon: int) -> list[CriterionReport]:
        levels = tuple(range(1, max(self.check_levels) + 1))
        return [
            check_shift_general(
                self.weights,
                [self.A(p) for p in levels],
                self.thresholds(levels),
                min(horizon, DENSE_ARRAY_LIMIT),
                growth_floor=self.params.weight_base,
            )
        ]


def bg_weights(params: ConstructionParams) -> ExponentWeights:
    return BGConstruction(params).weights


def bg_sets(params: ConstructionParams, p: int) -> BGSets:
    return BGConstruction(params, levels=(p,)).family(p)
