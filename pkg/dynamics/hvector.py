"""
Explicit hypercyclic vectors built from a family schedule, and exact verification of
their orbit guarantees on truncations.

Given targets y^(p) supported on [0, p] and disjoint index sets A_p, the vector is

    u = sum_p sum_(n in A_p) sum_(j<=p) y^(p)_j e_(n+j)

in the unweighted frame. For the weighted shift B_w the vector lives in the weighted
frame, x_(n+j) = y^(p)_j / varpi_(n+j), and ||B_w^m x - y|| is computed as the
varpi-weighted sup norm of B^m u - y. For m in A_q the blocks before m vanish by the
gap condition and block q reproduces y^(q), so the distance comes from later blocks only.

Only c0 is supported: the seminorm ladder of a Fréchet space collapses to the sup norm.
"""
import itertools
import logging
from collections import defaultdict
from fractions import Fraction
from typing import Iterator

import numpy as np
from pydantic import ConfigDict, Field, model_validator

from dynamics.index_sets import IndexSet
from dynamics.shift_ops import (
    ExponentWeights,
    Space,
    TruncatedVector,
    WeightSequence,
    conjugate_from_unweighted,
    conjugate_to_unweighted,
)
from helpers.arith import Q, to_fraction
from helpers.errors import BlockCollisionError, PreconditionError
from helpers.utils import run_parallel_exec_but_return_in_order, timed
from models.basemodel import BaseModel, ExactRational
from models.reports import ConditionResult, ConditionStatus, CriterionId, CriterionReport, Witness


def epsilon_schedule(p_max: int, sup_weight=1) -> list[Fraction]:
    """eps_p = 1 / (p (p+1) 4**p), scaled by sup|w|**-p when sup|w| > 1."""
    s = max(to_fraction(sup_weight), Fraction(1))
    return [Q(1, p * (p + 1) * 4**p) / s**p for p in range(1, p_max + 1)]


def _grid_points() -> Iterator[tuple[Fraction, ...]]:
    for k in itertools.count(1):
        axis = [Q(i, k) for i in range(-k * k, k * k + 1)]
        yield from itertools.product(axis, repeat=k + 1)


def grid_targets(p_max: int, scale=1) -> list[TruncatedVector]:
    """
    The first p_max points of an enumeration of ∪_k ((1/k)Z ∩ [-k, k])**(k+1), times `scale`.

    The enumeration is dense in finitely supported vectors, and point p comes from a grid
    k <= p, so y^(p) is supported on [0, p] with entries bounded by p when scale <= 1.
    """
    if p_max < 1:
        raise PreconditionError("p_max must be >= 1", {"p_max": p_max})
    scale = to_fraction(scale)
    return [
        TruncatedVector.from_entries({j: scale * v for j, v in enumerate(point)})
        for point in itertools.islice(_grid_points(), p_max)
    ]


class TargetSchedule(BaseModel):
    """Targets y^(p), families A_p and tolerances eps_p, for p = 1..p_max."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    targets: list[TruncatedVector]
    families: list[IndexSet] = Field(exclude=True)
    epsilon: list[ExactRational] = []

    @model_validator(mode="after")
    def _check_lengths(self):
        if len(self.targets) != len(self.families):
            raise ValueError("need one target per family")
        if not self.epsilon:
            self.epsilon = epsilon_schedule(len(self.targets)) if self.targets else []
        if len(self.epsilon) != len(self.targets):
            raise ValueError("need one epsilon per family")
        if any(y.space.kind != "c0" for y in self.targets):
            raise ValueError("targets must live in c0")
        return self

    @property
    def p_max(self) -> int:
        return len(self.targets)

    @property
    def slack(self) -> Fraction:
        """sum_(p > p_max) 2**-p: the families left out of the schedule."""
        return Q(1, 2**self.p_max)

    @classmethod
    def for_construction(cls, construction, p_max: int, scale=Fraction(1, 4)) -> "TargetSchedule":
        """Grid targets on the families A_1..A_p_max of a block construction (bg, vfhc)."""
        if not hasattr(construction, "A"):
            raise PreconditionError(
                f"{construction.name} has no frequently hypercyclic families A_p", {"construction": construction.name}
            )
        sup = construction.weights.sup_bound or 1
        return cls(
            targets=grid_targets(p_max, scale),
            families=[construction.A(p) for p in range(1, p_max + 1)],
            epsilon=epsilon_schedule(p_max, sup),
        )


def _owners(schedule: TargetSchedule, horizon: int) -> list[tuple[int, int]]:
    """(n, p) for n in A_p ∩ [0, horizon], sorted by n."""
    pairs = [(n, p) for p, A in enumerate(schedule.families, start=1) for n in A.iter_up_to(horizon)]
    return sorted(pairs)


def check_schedule(schedule: TargetSchedule, horizon: int) -> CriterionReport:
    """
    Support and entry bounds of the targets, disjointness of the families and the gap
    condition n - m > q for n in A_p, m in A_q, n > m, all within [0, horizon].

    Consecutive elements suffice for the gap: if the next element after m is far enough,
    every later one is.
    """
    conditions = []
    bad = next(
        (p for p, y in enumerate(schedule.targets, start=1) if y.max_index > p or min(y.entries, default=0) < 0),
        None,
    )
    conditions.append(
        ConditionResult(
            name="support",
            status=ConditionStatus.PASS if bad is None else ConditionStatus.FAIL,
            checked=f"{schedule.p_max} targets",
            checks=schedule.p_max,
            witness=None if bad is None else Witness(condition="support", indices=[bad], note=f"y^({bad}) leaves [0, {bad}]"),
        )
    )
    bad = next(
        (p for p, y in enumerate(schedule.targets, start=1) if any(abs(v) > p for v in y.entries.values())),
        None,
    )
    conditions.append(
        ConditionResult(
            name="entry_bound",
            status=ConditionStatus.PASS if bad is None else ConditionStatus.FAIL,
            checked=f"{schedule.p_max} targets",
            checks=schedule.p_max,
            witness=None if bad is None else Witness(condition="entry_bound", indices=[bad], note=f"an entry of y^({bad}) exceeds {bad}"),
        )
    )
    owners = _owners(schedule, horizon)
    checked = f"{len(owners)} elements of {schedule.p_max} families in [0, {horizon}]"
    collision = next(((n, p, q) for (n, p), (m, q) in zip(owners, owners[1:]) if n == m), None)
    conditions.append(
        ConditionResult(
            name="disjoint",
            status=ConditionStatus.PASS if collision is None else ConditionStatus.FAIL,
            checked=checked,
            checks=len(owners),
            witness=None
            if collision is None
            else Witness(condition="disjoint", indices=list(collision), note=f"{collision[0]} lies in two families"),
        )
    )
    gap = next(((m, n, q) for (m, q), (n, _) in zip(owners, owners[1:]) if n != m and n - m <= q), None)
    conditions.append(
        ConditionResult(
            name="gap",
            status=ConditionStatus.PASS if gap is None else ConditionStatus.FAIL,
            checked=checked,
            checks=max(0, len(owners) - 1),
            witness=None if gap is None else Witness(condition="gap", indices=list(gap), note=f"{gap[1]} - {gap[0]} <= {gap[2]}"),
        )
    )
    return CriterionReport.from_conditions(CriterionId.SCHEDULE, conditions, horizon, {"p_max": schedule.p_max})


def build_vector(schedule: TargetSchedule, w: WeightSequence, horizon: int) -> TruncatedVector:
    """
    The truncated hypercyclic vector x with x_(n+j) = y^(p)_j / varpi_(n+j) for n in A_p ∩ [0, horizon].

    Raises:
        BlockCollisionError: two blocks {n + j : j <= p} share an index.
        PreconditionError: the schedule fails its support, bound or gap checks.
    """
    entries: dict[int, Fraction] = {}
    owner: dict[int, tuple[int, int]] = {}
    for n, p in _owners(schedule, horizon):
        y = schedule.targets[p - 1]
        for j in range(p + 1):
            k = n + j
            if k in owner:
                raise BlockCollisionError(
                    f"blocks of {owner[k]} and {(n, p)} collide at {k}",
                    {"index": k, "first": list(owner[k]), "second": [n, p]},
                )
            owner[k] = (n, p)
            if y[j]:
                entries[k] = y[j]
    report = check_schedule(schedule, horizon)
    if not report.passed:
        witness = report.witnesses[0]
        raise PreconditionError(f"schedule fails {witness.condition}: {witness.note}", {"indices": witness.indices})
    u = TruncatedVector.from_entries(entries, Space.c0())
    logging.info(f"hypercyclic vector: {len(owner)} block indices, {len(entries)} nonzero entries up to {horizon}")
    return conjugate_to_unweighted(w, u)


class _OrbitFrame:
    """The unweighted-frame vector u, grouped by |u_k| for fast weighted sup norms of its shifts."""

    def __init__(self, u: TruncatedVector, w: WeightSequence, top: int):
        self.u = u
        self.w = w
        self.exponents = w.exponents(top) if isinstance(w, ExponentWeights) else None
        groups: dict[Fraction, list[int]] = defaultdict(list)
        for k, v in u.entries.items():
            groups[abs(v)].append(k)
        self.groups = {v: np.array(ks, dtype=np.int64) for v, ks in groups.items()}

    def _abs_varpi(self, n: int) -> Fraction:
        return abs(self.w.varpi(n))

    def tail_sup(self, start: int, m: int) -> Fraction:
        """max |u_k| / |varpi_(k-m)| over k >= start."""
        best = Fraction(0)
        for v, ks in self.groups.items():
            sel = ks[ks >= start]
            if not len(sel):
                continue
            if self.exponents is not None:
                e = int(self.exponents[sel - m].min())
                cand = v / Fraction(self.w.base) ** e
            else:
                cand = max(v / self._abs_varpi(int(k) - m) for k in sel)
            best = max(best, cand)
        return best

    def distance(self, m: int, y: TruncatedVector, q: int) -> Fraction:
        """||B_w^m x - y'||, y' the weighted image of y, as the varpi-weighted sup norm of B^m u - y."""
        head = max((abs(y[j] - self.u[m + j]) / self._abs_varpi(j) for j in range(q + 1)), default=Fraction(0))
        return max(head, self.tail_sup(m + q + 1, m))


def schedule_distances(
    schedule: TargetSchedule, w: WeightSequence, x: TruncatedVector, q: int, ms: list[int]
) -> list[Fraction]:
    """Exact orbit distances ||B_w^m x - y^(q)|| for the given m."""
    top = max([x.max_index, 0] + [m + q for m in ms])
    frame = _OrbitFrame(conjugate_from_unweighted(w, x), w, top)
    return [frame.distance(m, schedule.targets[q - 1], q) for m in ms]


def verify_orbit(schedule: TargetSchedule, w: WeightSequence, x: TruncatedVector, horizon: int) -> CriterionReport:
    """
    For every q and every m in A_q ∩ [0, horizon - p_max], check
    ||B_w^m x - y^(q)|| <= 2**-q + slack exactly, slack = 2**-p_max for the families left out.

    Elements of A_q above the safe horizon are skipped and counted in the details.
    """
    safe = horizon - schedule.p_max
    top = max(x.max_index, horizon, 0)
    frame = _OrbitFrame(conjugate_from_unweighted(w, x), w, top)
    slack = schedule.slack

    def _family(q: int) -> ConditionResult:
        A = schedule.families[q - 1]
        y = schedule.targets[q - 1]
        ms = A.enumerate_up_to(safe)
        skipped = A.count(horizon) - len(ms) if safe >= 0 else A.count(horizon)
        bound = Q(1, 2**q) + slack
        worst, worst_m, failed = Fraction(0), None, None
        for m in ms:
            d = frame.distance(m, y, q)
            if d > worst or worst_m is None:
                worst, worst_m = d, m
            if d > bound and failed is None:
                failed = (m, d)
        if failed is not None:
            status = ConditionStatus.FAIL
            witness = Witness(condition=f"orbit_{q}", indices=[failed[0]], value=failed[1], note=f"distance above {bound}")
        elif ms:
            status = ConditionStatus.PASS
            witness = Witness(condition=f"orbit_{q}", indices=[worst_m], value=worst, note="largest distance")
        else:
            status, witness = ConditionStatus.INCONCLUSIVE, None
        return ConditionResult(
            name=f"orbit_{q}",
            status=status,
            checked=f"{len(ms)} m in A_{q} ∩ [0, {safe}]",
            checks=len(ms),
            witness=witness,
            details={
                "bound": str(bound),
                "max_distance": str(worst),
                "epsilon": str(schedule.epsilon[q - 1]),
                "skipped": skipped,
            },
        )

    with timed(f"orbit verification of {schedule.p_max} families up to {horizon}"):
        conditions = run_parallel_exec_but_return_in_order(_family, range(1, schedule.p_max + 1))
    return CriterionReport.from_conditions(
        CriterionId.ORBIT,
        conditions,
        horizon,
        {"weights": w.label, "p_max": schedule.p_max, "slack": str(slack), "safe_horizon": safe},
    )
