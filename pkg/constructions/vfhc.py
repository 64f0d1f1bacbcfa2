"""
Very frequently hypercyclic variant of the block shift. Block ends and the steps of C_p
follow an exponent schedule m_1 = 1 < m_2 < ...:

    a_k = c * (b**m_1 + ... + b**m_k),     C_p = b**m_p * N,
    Y_q = ∪_(l>=1) [l*b**m_q - h_q, l*b**m_q + h_q],   h_q = d_q + a_(q-1) + q,

with d_2 = 0 and d_q = (d_(q-1) - 1) mod b**m_(q-1), which makes the left ends of every
Y_q line up on multiples of b**m_(q-1). B_p = C_p \\ ∪_(q>p) Y_q is the set whose depth-N_r
left-shift union covers N_0 outside ∪_(q>r) Y_q.

An explicit `m_schedule` prefix must satisfy

    2 * (a_(q-1) + q) + 3 * b**m_(q-1) < b**m_q;

past the prefix, m_q is the smallest exponent satisfying it with
b**m_q >= 10 * 2**q * (2*h_q + 1), so the density of ∪_(q>Q) Y_q is at most 1/(10 * 2**Q).
"""
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from config import DENSE_ARRAY_LIMIT
from constructions.bg import BGConstruction, runs
from dynamics.densities import counts_at, decade_horizons, hindman_profile
from dynamics.index_sets import IndexSet, IntervalFamily, difference, from_intervals, window_union
from helpers.arith import Q
from helpers.errors import CapExceededError, PreconditionError, ScheduleError
from models.params import ConstructionParams
from models.reports import BoundCheck


class VFHCSets(NamedTuple):
    p: int
    r: int
    C: IndexSet
    X: IndexSet
    Y: Callable[[int], IndexSet]
    Y_union: IndexSet
    A: IndexSet
    B: IndexSet
    N_r: int


class VFHCConstruction(BGConstruction):
    """
    Block shift whose sets B_p have Hindman lower density 1.

    `r` fixes the Hindman depth level checked for every p; by default levels p + 1 and
    p + 2 are checked.
    """

    name = "vfhc"
    level_names = ("p", "r")

    def __init__(
        self,
        params: ConstructionParams | None = None,
        levels: tuple[int, ...] = (1, 2),
        r: int | None = None,
    ):
        params = params or ConstructionParams()
        self.explicit = list(params.m_schedule or [1])
        self._m: list[int] = list(self.explicit)
        self.r = r
        super().__init__(params, levels)

    # ------------------------------------------------------------------ schedule

    def m(self, q: int) -> int:
        if q < 1:
            raise PreconditionError("schedule index q must be >= 1", {"q": q})
        if q > self.params.max_level:
            raise CapExceededError(f"schedule level {q} is above max_level", {"q": q, "max_level": self.params.max_level})
        with self._lock:
            while len(self._m) < q:
                self._m.append(self._next_exponent(len(self._m) + 1))
            return self._m[q - 1]

    def _eq_mk_lhs(self, q: int) -> int:
        return 2 * (self.a(q - 1) + q) + 3 * self.step(q - 1)

    def _next_exponent(self, q: int) -> int:
        b = self.params.base
        floor = 10 * 2**q * (2 * self.h(q) + 1)
        m = self.m(q - 1) + 1
        while b**m <= self._eq_mk_lhs(q) or b**m < floor:
            m += 1
        return m

    def block_term(self, k: int) -> int:
        return self.params.coefficient * self.params.base ** self.m(k)

    def step(self, p: int) -> int:
        return self.params.base ** self.m(p)

    def d(self, q: int) -> int:
        d = 0
        for i in range(3, q + 1):
            d = (d - 1) % self.step(i - 1)
        return d

    def h(self, q: int) -> int:
        """Half width of the Y_q intervals."""
        if q < 2:
            raise PreconditionError("h_q is defined for q >= 2", {"q": q})
        return self.d(q) + self.a(q - 1) + q

    def L(self, r: int) -> int:
        return 2 * (self.step(r - 1) + self.a(r - 1) + r) + 1

    def hindman_depth(self, p: int, r: int) -> int:
        """N_r = b**m_p + L_r."""
        return self.step(p) + self.L(r)

    def _validate(self) -> None:
        for q in range(2, len(self.explicit) + 1):
            if not self._eq_mk_lhs(q) < self.step(q):
                raise ScheduleError(
                    f"m_{q} = {self.m(q)} is too small for the block ends",
                    {"q": q, "lhs": self._eq_mk_lhs(q), "b^m_q": self.step(q)},
                )
        if self.r is not None and self.r <= max(self.check_levels):
            raise PreconditionError("Hindman level r must exceed every p", {"r": self.r, "levels": list(self.check_levels)})
        super()._validate()

    # ------------------------------------------------------------------ sets

    def Y_start(self, q: int) -> int:
        return self.step(q) - self.h(q)

    def _make_Y(self, q: int) -> IndexSet:
        s, h = self.step(q), self.h(q)

        def _cover(n: int) -> list[tuple[int, int]]:
            l = (n + h) // s
            return [(l * s - h, l * s + h)] if l >= 1 else []

        family = IntervalFamily(
            lambda l: iter([(l * s - h, l * s + h)]),
            start_bound=lambda l: l * s - h,
            cover=_cover,
            label=f"Y_{q}",
        )
        return from_intervals(family)

    def B(self, p: int) -> IndexSet:
        return difference(self.C(p), self.Y_union(p)).relabeled(f"B_{p}")

    def depths(self, p: int) -> list[int]:
        if self.r is not None:
            return [self.r]
        return [p + 1, p + 2]

    def sets(self, p: int = 1, r: int | None = None) -> dict[str, IndexSet]:
        sets = super().sets(p)
        sets["B"] = self.B(p)
        r = r or self.r or p + 2
        if r > p:
            sets["hindman"] = window_union(sets["B"], self.hindman_depth(p, r))
        return sets

    def family(self, p: int, r: int | None = None) -> VFHCSets:
        r = r or self.r or p + 2
        if r <= p:
            raise PreconditionError("Hindman level r must exceed p", {"p": p, "r": r})
        return VFHCSets(
            p=p,
            r=r,
            C=self.C(p),
            X=self.X(),
            Y=self.Y,
            Y_union=self.Y_union(p),
            A=self.A(p),
            B=self.B(p),
            N_r=self.hindman_depth(p, r),
        )

    # ------------------------------------------------------------------ bounds

    def declared_tail(self, r: int) -> Fraction:
        """Upper density bound of ∪_(q>r) Y_q: exact terms up to the explicit prefix, then 1/(10 * 2**Q)."""
        last = max(r, len(self.explicit))
        total = sum((Q(2 * self.h(q) + 1, self.step(q)) for q in range(r + 1, last + 1)), Q(0))
        return total + Q(1, 10 * 2**last)

    def Y_density_bound(self, p: int) -> Fraction:
        return self.declared_tail(p)

    def Y_count_bound(self, p: int, N: int) -> int:
        total = 0
        q = p + 1
        while self.Y_start(q) <= N:
            h = self.h(q)
            total += (2 * h + 1) * ((N + h) // self.step(q))
            q += 1
        return total

    def _schedule_checks(self, horizon: int) -> list[BoundCheck]:
        checks = []
        q = 2
        while q <= len(self.explicit) or self.step(q - 1) <= horizon:
            B, B_prev, h = self.step(q), self.step(q - 1), self.h(q)
            checks.append(BoundCheck.compare("eq_mk", self._eq_mk_lhs(q), B, "<", q=q))
            if q > len(self.explicit):
                checks.append(BoundCheck.compare("schedule_tail", B, 10 * 2**q * (2 * h + 1), ">=", q=q))
            if q >= 3:
                shift = (B - h) - (B_prev - self.h(q - 1))
                checks.append(
                    BoundCheck.compare("alignment", shift % B_prev, 0, "==", note="left ends of Y_q on multiples of b^m_(q-1)", q=q)
                )
            t = h // B_prev + 1
            checks.append(BoundCheck.compare("gap_has_C", t * B_prev, B - h, "<", q=q))
            checks.append(BoundCheck.compare("interval_size", 2 * h + 1, self.L(q), q=q))
            checks.append(BoundCheck.compare("interval_size_coarse", 2 * h + 1, 17 * B_prev, required=False, q=q))
            q += 1
        return checks

    def right_gap(self, p: int, top: int) -> tuple[int, tuple[int, int] | None]:
        """
        Scan the maximal intervals of ∪_(q>p) Y_q within [0, top]: the first multiple of
        b**m_p after each right end must come before the next interval starts.

        Returns:
            (violations, first (end, next start) pair violating)
        """
        starts, ends = runs(self.Y_union(p).mask(top))
        if len(starts) < 2:
            return 0, None
        s = self.step(p)
        nxt = (ends[:-1] // s + 1) * s
        bad = np.flatnonzero(nxt >= starts[1:])
        if not len(bad):
            return 0, None
        i = int(bad[0])
        return len(bad), (int(ends[i]), int(starts[i + 1]))

    def hindman_exceptions(self, p: int, r: int, top: int) -> tuple[np.ndarray, np.ndarray]:
        """
        Points k in [0, top] outside both ∪_(n<=N_r) (B_p - n) and ∪_(q>r) Y_q, split into
        shadowed ones (the window [k, k + N_r] meets ∪_(q>r) Y_q) and the rest.

        Returns:
            (shadowed mask, unshadowed mask)
        """
        depth = self.hindman_depth(p, r)
        if top + depth > DENSE_ARRAY_LIMIT:
            raise CapExceededError("Hindman window above the dense array limit", {"top": top, "N_r": depth})
        covered = window_union(self.B(p), depth).mask(top)
        deep = self.Y_union(r).mask(top + depth)
        exceptions = ~covered & ~deep[: top + 1]
        prefix = np.concatenate(([0], np.cumsum(deep, dtype=np.int64)))
        ks = np.arange(top + 1)
        near = prefix[ks + depth + 1] - prefix[ks] > 0
        return exceptions & near, exceptions & ~near

    def _hindman_checks(self, p: int, r: int, top: int) -> list[BoundCheck]:
        depth = self.hindman_depth(p, r)
        shadowed, unshadowed = self.hindman_exceptions(p, r, top)
        first = np.flatnonzero(unshadowed)
        checks = [
            BoundCheck.compare(
                "hindman_inclusion",
                int(unshadowed.sum()),
                0,
                "==",
                note=f"first exception {int(first[0])}" if len(first) else "",
                p=p,
                r=r,
                N_r=depth,
            ),
            BoundCheck.compare("hindman_shadowed", int(shadowed.sum()), 0, "==", required=False, p=p, r=r),
        ]
        Ns = decade_horizons(top)
        profile = hindman_profile(self.B(p), depth, Ns)
        deep = self.Y_union(r)
        cY = counts_at(deep, Ns)
        shadow_prefix = np.cumsum(shadowed, dtype=np.int64)
        for N, value, y in zip(Ns, profile.values, cY):
            floor = 1 - Q(y + int(shadow_prefix[N]), N + 1)
            checks.append(BoundCheck.compare("hindman_floor", value, floor, ">=", p=p, r=r, N=N))
        tau = self.declared_tail(r)
        declared = 1 - Q(cY[-1], Ns[-1] + 1) - tau
        checks.append(
            BoundCheck.compare(
                "hindman_floor_declared", profile.values[-1], declared, ">=", required=False, p=p, r=r, N=Ns[-1]
            )
        )
        checks.append(BoundCheck.compare("hindman_floor_margin", declared, Q(9, 10), ">", required=False, p=p, r=r))
        return checks

    def _tail_checks(self, r: int, top: int) -> list[BoundCheck]:
        Ns = decade_horizons(top)
        checks = []
        for N, c in zip(Ns, counts_at(self.Y_union(r), Ns)):
            checks.append(BoundCheck.compare("tail_count", c, self.Y_count_bound(r, N), r=r, N=N))
            coarse = 0
            q = r + 1
            while self.Y_start(q) <= N:
                coarse += 17 * self.step(q - 1) * ((N + self.h(q)) // self.step(q))
                q += 1
            checks.append(BoundCheck.compare("tail_count_coarse", c, coarse, required=False, r=r, N=N))
        return checks

    def _bound_checks(self, horizon: int) -> list[BoundCheck]:
        top = min(horizon, DENSE_ARRAY_LIMIT)
        checks = self._boundary_checks() + self._schedule_checks(horizon) + self._set_checks(horizon)
        for p in self.check_levels:
            violations, where = self.right_gap(p, top)
            checks.append(
                BoundCheck.compare("right_gap", violations, 0, "==", note=f"first (end, next start) = {where}" if where else "", p=p)
            )
            for r in self.depths(p):
                checks += self._hindman_checks(p, r, top)
        for r in sorted({r for p in self.check_levels for r in self.depths(p)}):
            checks += self._tail_checks(r, top)
        return checks


def vfhc_weights(params: ConstructionParams):
    return VFHCConstruction(params).weights


def vfhc_sets(params: ConstructionParams, p: int, r: int | None = None) -> VFHCSets:
    return VFHCConstruction(params, levels=(p,), r=r).family(p, r)
