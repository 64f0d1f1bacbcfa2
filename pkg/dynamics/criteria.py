"""
Finite-horizon checkers for hypercyclicity criteria of (weighted backward) shifts and
of general operator sequences.

Every checker returns a `CriterionReport` made of one `ConditionResult` per condition:

- finite conditions (pairwise weight bounds, disjointness, (iii)-type orbit bounds) are
  checked exhaustively within the horizon and pass or fail with a concrete witness,
- asymptotic conditions (growth of the weight products, convergence of series, sup -> 0)
  can never pass finitely: they fail on a concrete violation and are otherwise
  `inconclusive`, with the checked range recorded.

Pair bounds |varpi_{d}| > M are evaluated through a `_Threshold`: a prefix count of
violations over a boolean mask when the differences fit in memory, an exact per-index
test (memoized) for sparse sets whose elements lie far beyond mask range.
"""
import itertools
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from config import DENSE_ARRAY_LIMIT
from dynamics.index_sets import IndexSet, from_elements
from dynamics.shift_ops import (
    Space,
    TruncatedVector,
    WeightSequence,
    backward_apply,
    norm,
    weighted_forward_apply,
    within,
)
from helpers.arith import to_fraction
from helpers.errors import OracleError, PreconditionError
from helpers.utils import run_parallel_exec_but_return_in_order, timed
from models.reports import ConditionResult, ConditionStatus, CriterionId, CriterionReport, Witness

Operator = Callable[[int, TruncatedVector], TruncatedVector]
Floor = Fraction | int | Callable[[int], Fraction]

# below this many elements pairs are tested index by index
DENSE_PAIR_MIN = 200


def _q(value) -> str:
    return str(to_fraction(value))


def _condition(name: str, status: ConditionStatus, checked: str, checks: int = 0, witness: Witness | None = None, **details):
    return ConditionResult(name=name, status=status, checked=checked, checks=checks, witness=witness, details=details)


class _Threshold:
    """Decides |varpi_d| > M for indices d <= top."""

    def __init__(self, w: WeightSequence, M: Fraction, top: int, dense: bool):
        self.w = w
        self.M = to_fraction(M)
        self.dense = dense and top <= DENSE_ARRAY_LIMIT
        if self.dense:
            good = w.above_mask(top, self.M)
            self._bad = np.concatenate(([0], np.cumsum(~good, dtype=np.int64)))
        self._good = lru_cache(maxsize=None)(lambda d: w.exceeds(d, self.M))

    def good(self, d: int) -> bool:
        if self.dense:
            return bool(self._bad[d + 1] == self._bad[d])
        return self._good(d)

    def all_good(self, ds: np.ndarray, lo: int, hi: int) -> np.ndarray:
        """Vectorized (dense mode): every d + j, lo <= j <= hi, is good."""
        return self._bad[ds + hi + 1] - self._bad[ds + lo] == 0

    def first_bad(self, d: int, lo: int, hi: int) -> int | None:
        for j in range(lo, hi + 1):
            if not self.good(d + j):
                return j
        return None


def _scan_pairs(
    th: _Threshold,
    left: Sequence[int],
    right: Sequence[int],
    above: tuple[int, int],
    below: tuple[int, int] | None,
) -> tuple[int, tuple[int, int, int] | None]:
    """
    For n in `left`, m in `right`: if n > m every d + j with j in `above` must be good,
    where d = n - m; if n < m (and `below` is given) every d + j with j in `below`, d = m - n.

    Returns (number of index tests, first violation (n, m, j) or None); violations are
    ordered by n, then m.
    """
    checks = 0
    if th.dense:
        R = np.asarray(right, dtype=np.int64)
        for n in left:
            ds = n - R
            bad_idx = []
            pos = np.flatnonzero(ds > 0)
            checks += pos.size * (above[1] - above[0] + 1)
            if pos.size:
                bad_idx.extend(pos[~th.all_good(ds[pos], *above)].tolist())
            if below is not None:
                neg = np.flatnonzero(ds < 0)
                checks += neg.size * (below[1] - below[0] + 1)
                if neg.size:
                    bad_idx.extend(neg[~th.all_good(-ds[neg], *below)].tolist())
            if bad_idx:
                m = int(R[min(bad_idx)])
                d, rng = (n - m, above) if n > m else (m - n, below)
                return checks, (int(n), m, th.first_bad(d, *rng))
        return checks, None
    for n in left:
        for m in right:
            if n > m:
                d, rng = n - m, above
            elif n < m and below is not None:
                d, rng = m - n, below
            else:
                continue
            checks += rng[1] - rng[0] + 1
            j = th.first_bad(d, *rng)
            if j is not None:
                return checks, (n, m, j)
    return checks, None


def _floor_fn(floor: Floor) -> Callable[[int], Fraction]:
    if callable(floor):
        return lambda n: to_fraction(floor(n))
    value = to_fraction(floor)
    return lambda n: value


def _growth_condition(
    name: str, w: WeightSequence, indices: Sequence[int], floor: Floor, tail_start: int, horizon: int
) -> ConditionResult:
    """|varpi_n| >= floor(n) along the tail; violations fail, otherwise inconclusive."""
    f = _floor_fn(floor)
    tail = [n for n in indices if n >= tail_start]
    for n in tail:
        v = abs(w.varpi(n))
        if v < f(n):
            return _condition(
                name,
                ConditionStatus.FAIL,
                f"{len(tail)} indices in [{tail_start}, {horizon}]",
                len(tail),
                Witness(condition=name, indices=[n], value=v, note=f"|varpi_{n}| < {f(n)}"),
            )
    return _condition(name, ConditionStatus.INCONCLUSIVE, f"{len(tail)} indices in [{tail_start}, {horizon}]", len(tail))


def _elements_from(A: IndexSet, p: int, horizon: int) -> list[int]:
    elements = A.enumerate_up_to(horizon)
    if elements and elements[0] < p:
        raise PreconditionError(
            f"{A.label!r} has an element below p={p}", {"element": elements[0], "p": p}
        )
    return elements


def _upper_report(
    criterion: CriterionId,
    w: WeightSequence,
    A: IndexSet,
    p: int,
    M: Fraction,
    horizon: int,
    growth_floor: Floor,
    tail_start: int | None,
    j_range: tuple[int, int],
) -> CriterionReport:
    M = to_fraction(M)
    if M <= 0 or p < 0:
        raise PreconditionError("need M > 0 and p >= 0", {"M": M, "p": p})
    elements = _elements_from(A, p, horizon)
    span = (elements[-1] - elements[0]) if elements else 0
    th = _Threshold(w, M, span + p + 1, dense=len(elements) >= DENSE_PAIR_MIN)
    checks, bad = _scan_pairs(th, elements, elements, j_range, None)
    pairs = len(elements) * (len(elements) - 1) // 2
    checked = f"{pairs} pairs n > m in A ∩ [0, {horizon}]"
    if bad is None:
        cond_ii = _condition("ii", ConditionStatus.PASS, checked, checks, M=_q(M))
    else:
        n, m, j = bad
        cond_ii = _condition(
            "ii",
            ConditionStatus.FAIL,
            checked,
            checks,
            Witness(condition="ii", indices=[n, m, j], value=abs(w.varpi(n - m + j)), note=f"|varpi_(n-m+{j})| <= M"),
            M=_q(M),
        )
    start = horizon // 2 if tail_start is None else tail_start
    cond_i = _growth_condition("i", w, elements, growth_floor, start, horizon)
    return CriterionReport.from_conditions(
        criterion,
        [cond_i, cond_ii],
        horizon,
        {"weights": w.label, "set": A.label, "p": p, "M": _q(M), "horizon": horizon},
    )


def check_shift_upper(
    w: WeightSequence,
    A: IndexSet,
    p: int,
    M: Fraction,
    horizon: int,
    growth_floor: Floor = 1,
    tail_start: int | None = None,
) -> CriterionReport:
    """
    Shift criterion for upper families on c0 / l^p, on A ∩ [0, horizon]:

        (i)  |varpi_n| -> infinity along A   (floor check on the tail, inconclusive at best)
        (ii) |varpi_{n-m+p}| > M for all n > m in A   (exact)

    Raises:
        PreconditionError: A has an element below p, M <= 0 or p < 0.
    """
    return _upper_report(CriterionId.SHIFT_UPPER, w, A, p, M, horizon, growth_floor, tail_start, (p, p))


def check_shift_upper_per_j(
    w: WeightSequence,
    A: IndexSet,
    p: int,
    M: Fraction,
    horizon: int,
    growth_floor: Floor = 1,
    tail_start: int | None = None,
) -> CriterionReport:
    """The strengthened pair condition: |varpi_{n-m+j}| > M for all n > m in A and 0 <= j <= p."""
    return _upper_report(CriterionId.SHIFT_UPPER_PER_J, w, A, p, M, horizon, growth_floor, tail_start, (0, p))


def check_shift_general(
    w: WeightSequence,
    families: Sequence[IndexSet],
    M: Sequence[Fraction],
    horizon: int,
    growth_floor: Floor = 1,
    tail_start: int | None = None,
) -> CriterionReport:
    """
    Shift characterization for general families, with families[p-1] = A_p and M[p-1] = M_p.

    Conditions:
        disjoint  the A_p are pairwise disjoint within the horizon,
        ii        for p <= q, n in A_p, m in A_q, n != m:
                  |varpi_{|n-m|+j}| > M_q for j = 0..p if n > m and j = 0..q if n < m,
        i[p]      |varpi_{n+p}| >= growth_floor on the tail of each A_p (fail or inconclusive).

    Family pairs (p, q) are checked in parallel and merged in order.

    Raises:
        PreconditionError: M is not nondecreasing with last > first, or lengths differ.
    """
    Ms = [to_fraction(m) for m in M]
    if len(Ms) != len(families) or not families:
        raise PreconditionError("need one threshold M_p per family", {"families": len(families), "M": len(Ms)})
    if any(b < a for a, b in zip(Ms, Ms[1:])) or (len(Ms) > 1 and not Ms[-1] > Ms[0]) or Ms[0] <= 0:
        raise PreconditionError("M_p must be positive, nondecreasing and growing", {"M": [_q(m) for m in Ms]})
    parameters = {
        "weights": w.label,
        "families": [A.label for A in families],
        "M": [_q(m) for m in Ms],
        "horizon": horizon,
    }
    elements = [A.enumerate_up_to(horizon) for A in families]

    owner: dict[int, int] = {}
    collision = None
    for p, items in enumerate(elements, start=1):
        for n in items:
            if n in owner and collision is None:
                collision = (n, owner[n], p)
            owner.setdefault(n, p)
    checked = f"{len(owner)} elements of {len(families)} families in [0, {horizon}]"
    if collision is None:
        disjoint = _condition("disjoint", ConditionStatus.PASS, checked, len(owner))
    else:
        n, p, q = collision
        disjoint = _condition(
            "disjoint",
            ConditionStatus.FAIL,
            checked,
            len(owner),
            Witness(condition="disjoint", indices=[n, p, q], note=f"{n} lies in A_{p} and A_{q}"),
        )

    span = max((items[-1] for items in elements if items), default=0)
    dense = sum(len(items) for items in elements) >= DENSE_PAIR_MIN
    thresholds = {q: _Threshold(w, Ms[q - 1], span + q + 1, dense) for q in range(1, len(families) + 1)}

    def _pair(pq: tuple[int, int]):
        p, q = pq
        return _scan_pairs(thresholds[q], elements[p - 1], elements[q - 1], (0, p), (0, q))

    pairs = [(p, q) for p in range(1, len(families) + 1) for q in range(p, len(families) + 1)]
    with timed(f"shift-general pair sweep over {len(pairs)} family pairs"):
        results = run_parallel_exec_but_return_in_order(_pair, pairs)
    checks = sum(r[0] for r in results)
    bad = next(((pq, r[1]) for pq, r in zip(pairs, results) if r[1] is not None), None)
    checked = f"{len(pairs)} family pairs within [0, {horizon}]"
    if bad is None:
        cond_ii = _condition("ii", ConditionStatus.PASS, checked, checks)
    else:
        (p, q), (n, m, j) = bad
        d = abs(n - m)
        cond_ii = _condition(
            "ii",
            ConditionStatus.FAIL,
            checked,
            checks,
            Witness(
                condition="ii",
                indices=[n, m, j, p, q],
                value=abs(w.varpi(d + j)),
                note=f"n in A_{p}, m in A_{q}: |varpi_(|n-m|+{j})| <= M_{q}",
            ),
        )
    conditions = [disjoint, cond_ii]
    start = horizon // 2 if tail_start is None else tail_start
    for p, items in enumerate(elements, start=1):
        conditions.append(_growth_condition(f"i[{p}]", w, [n + p for n in items], growth_floor, start + p, horizon + p))
    return CriterionReport.from_conditions(CriterionId.SHIFT_GENERAL, conditions, horizon, parameters)


def check_series_tail(
    w: WeightSequence,
    A: IndexSet,
    p: int,
    space: Space,
    horizon: int,
    epsilon: Fraction,
    max_cutoff: int | None = None,
) -> CriterionReport:
    """
    Tail of Σ_{n∈A} e_{n+p} / varpi_{n+p}.

    c0:  the smallest cutoff c with |1/varpi_{n+p}| < epsilon for every n in A ∩ [c, horizon],
    l^p: the smallest cutoff c with Σ_{n∈A, c<=n<=horizon} |1/varpi_{n+p}|^p < epsilon^p.

    A cutoff at most `max_cutoff` (default horizon // 2) is an inconclusive pass; otherwise
    the report fails with the first element at or after `max_cutoff`.
    """
    epsilon = to_fraction(epsilon)
    if epsilon <= 0:
        raise PreconditionError("epsilon must be > 0", {"epsilon": epsilon})
    max_cutoff = horizon // 2 if max_cutoff is None else max_cutoff
    elements = A.enumerate_up_to(horizon)
    exponent = 1 if space.kind == "c0" else space.p
    terms = [abs(1 / w.varpi(n + p)) ** exponent for n in elements]
    bound = epsilon**exponent

    cutoff = 0
    if space.kind == "c0":
        for n, t in zip(reversed(elements), reversed(terms)):
            if t >= bound:
                cutoff = n + 1
                break
        tail_value = max((t for n, t in zip(elements, terms) if n >= max_cutoff), default=Fraction(0))
    else:
        suffix = Fraction(0)
        for n, t in zip(reversed(elements), reversed(terms)):
            if suffix + t >= bound:
                cutoff = n + 1
                break
            suffix += t
        tail_value = sum((t for n, t in zip(elements, terms) if n >= max_cutoff), Fraction(0))
    checked = f"{len(elements)} terms in [0, {horizon}] on {space}"
    if cutoff <= max_cutoff:
        cond = _condition("tail", ConditionStatus.INCONCLUSIVE, checked, len(elements), cutoff=cutoff)
    else:
        first = next((n for n in elements if n >= max_cutoff), max_cutoff)
        cond = _condition(
            "tail",
            ConditionStatus.FAIL,
            checked,
            len(elements),
            Witness(condition="tail", indices=[first], value=tail_value, note=f"tail from {max_cutoff} not below epsilon"),
            cutoff=cutoff,
        )
    return CriterionReport.from_conditions(
        CriterionId.SERIES_TAIL,
        [cond],
        horizon,
        {"weights": w.label, "set": A.label, "p": p, "space": str(space), "epsilon": _q(epsilon)},
    )


# ------------------------------------------------------- operator sequences


def shift_operators(w: WeightSequence) -> tuple[Operator, Operator]:
    """(T_n, S_n) = (B_w^n, right inverse of B_w^n) for the generic checkers."""
    return (lambda n, x: backward_apply(w, x, n)), (lambda n, y: weighted_forward_apply(w, y, n))


def _call(oracle: Operator, name: str, n: int, x: TruncatedVector) -> TruncatedVector:
    try:
        return oracle(n, x)
    except Exception as e:
        raise OracleError(f"oracle {name} failed at n={n}: {e}", {"n": n}) from e


def _partial_sums(S: Operator, y: TruncatedVector, indices: Sequence[int]) -> tuple[TruncatedVector, TruncatedVector, TruncatedVector]:
    """(full sum, sum over the first half of the indices, last increment)."""
    z = TruncatedVector.zero(y.space)
    half = z
    last = z
    cut = len(indices) // 2
    for i, n in enumerate(indices):
        if i == cut:
            half = z
        last = _call(S, "S", n, y)
        z = z + last
    if cut >= len(indices):
        half = z
    return z, half, last


def _cauchy_condition(name: str, z: TruncatedVector, half: TruncatedVector, epsilon: Fraction, checked: str, index: int):
    tail = norm(z - half)
    if tail < epsilon:
        return _condition(name, ConditionStatus.INCONCLUSIVE, checked, 1, tail=str(tail))
    return _condition(
        name,
        ConditionStatus.FAIL,
        checked,
        1,
        Witness(condition=name, indices=[index], value=to_fraction(tail), note="second half of the partial sum is not small"),
    )


def check_ahc_hypotheses(
    T: Operator,
    S: Operator,
    X0: Sequence[TruncatedVector],
    Y0: Sequence[TruncatedVector],
    A: IndexSet,
    delta_check: Callable[[IndexSet], bool],
    epsilon: Fraction,
    horizon: int,
    operator_norm_bound: Fraction = Fraction(1),
) -> CriterionReport:
    """
    Hypotheses of the A-hypercyclicity criterion at a finite horizon.

    For x in X0 (condition i): B = {n ∈ A : ||T_n x|| < epsilon} must satisfy `delta_check`.
    For y in Y0, with z = Σ_{n∈A, n<=horizon} S_n y:
        ii   the second half of the partial sum has norm < epsilon (inconclusive at best),
        iii  ||T_m z - y|| < epsilon + slack for every m in A ∩ [0, horizon] (exact),
    where slack = ||last increment|| * operator_norm_bound is reported in the details.

    Raises:
        OracleError: T or S raised; the failing index is in the witness.
    """
    epsilon = to_fraction(epsilon)
    elements = A.enumerate_up_to(horizon)
    conditions: list[ConditionResult] = []

    for i, x in enumerate(X0):
        B = [n for n in elements if norm(_call(T, "T", n, x)) < epsilon]
        ok = bool(delta_check(from_elements(B)))
        checked = f"{len(elements)} indices of A ∩ [0, {horizon}], |B| = {len(B)}"
        if ok:
            conditions.append(_condition(f"i[{i}]", ConditionStatus.PASS, checked, len(elements)))
        else:
            conditions.append(
                _condition(
                    f"i[{i}]",
                    ConditionStatus.FAIL,
                    checked,
                    len(elements),
                    Witness(condition=f"i[{i}]", indices=[i] + B[:10], note="B = {n : ||T_n x|| < eps} fails the density check"),
                )
            )

    for i, y in enumerate(Y0):
        z, half, last = _partial_sums(S, y, elements)
        checked = f"{len(elements)} terms in [0, {horizon}]"
        conditions.append(_cauchy_condition(f"ii[{i}]", z, half, epsilon, checked, i))
        slack = to_fraction(norm(last)) * to_fraction(operator_norm_bound)
        bad = None
        for m in elements:
            d = norm(_call(T, "T", m, z) - y)
            if not d < epsilon + slack:
                bad = (m, d)
                break
        if bad is None:
            conditions.append(_condition(f"iii[{i}]", ConditionStatus.PASS, checked, len(elements), slack=_q(slack)))
        else:
            m, d = bad
            conditions.append(
                _condition(
                    f"iii[{i}]",
                    ConditionStatus.FAIL,
                    checked,
                    len(elements),
                    Witness(condition=f"iii[{i}]", indices=[i, m], value=to_fraction(d), note="||T_m z - y|| >= eps + slack"),
                    slack=_q(slack),
                )
            )
    return CriterionReport.from_conditions(
        CriterionId.AHC, conditions, horizon, {"set": A.label, "epsilon": _q(epsilon), "X0": len(X0), "Y0": len(Y0)}
    )


def check_ahc_split_iii(
    T: Operator,
    S: Operator,
    Y0: Sequence[TruncatedVector],
    A: IndexSet,
    epsilon: Fraction,
    horizon: int,
) -> CriterionReport:
    """
    Condition (iii) split in three, for y in Y0 and m in A ∩ [0, horizon]:

        iiia  ||Σ_{n∈A, n<m} T_m S_n y|| < epsilon
        iiib  ||Σ_{n∈A, m<n<=horizon} T_m S_n y|| < epsilon
        iiic  ||T_m S_m y - y|| < epsilon on the second half of the range (inconclusive at best)
    """
    epsilon = to_fraction(epsilon)
    elements = A.enumerate_up_to(horizon)
    conditions = []
    for i, y in enumerate(Y0):
        images = {n: _call(S, "S", n, y) for n in elements}
        found: dict[str, tuple[int, Fraction] | None] = {"iiia": None, "iiib": None, "iiic": None}
        for idx, m in enumerate(elements):
            before = TruncatedVector.zero(y.space)
            for n in elements[:idx]:
                before = before + images[n]
            after = TruncatedVector.zero(y.space)
            for n in elements[idx + 1 :]:
                after = after + images[n]
            for name, vec in (("iiia", before), ("iiib", after)):
                d = norm(_call(T, "T", m, vec))
                if found[name] is None and not d < epsilon:
                    found[name] = (m, to_fraction(d))
            if idx >= len(elements) // 2 and found["iiic"] is None:
                d = norm(_call(T, "T", m, images[m]) - y)
                if not d < epsilon:
                    found["iiic"] = (m, to_fraction(d))
        checked = f"{len(elements)} indices m in A ∩ [0, {horizon}]"
        for name in ("iiia", "iiib", "iiic"):
            hit = found[name]
            ok_status = ConditionStatus.INCONCLUSIVE if name == "iiic" else ConditionStatus.PASS
            if hit is None:
                conditions.append(_condition(f"{name}[{i}]", ok_status, checked, len(elements)))
            else:
                conditions.append(
                    _condition(
                        f"{name}[{i}]",
                        ConditionStatus.FAIL,
                        checked,
                        len(elements),
                        Witness(condition=f"{name}[{i}]", indices=[i, hit[0]], value=hit[1]),
                    )
                )
    return CriterionReport.from_conditions(CriterionId.AHC_SPLIT, conditions, horizon, {"set": A.label, "epsilon": _q(epsilon)})


def check_ahc2_hypotheses(
    T: Operator,
    S: Operator,
    Y0: Sequence[TruncatedVector],
    families: Sequence[IndexSet],
    epsilon_schedule: Sequence[Fraction],
    horizon: int,
    f_max: int = 3,
) -> CriterionReport:
    """
    Hypotheses of the second A-hypercyclicity criterion, family k = 1..K:

        i    Σ_{n∈A_k} S_n y converges (second-half test, inconclusive at best),
        ii   ||T_m Σ_{n∈F} S_n y|| < epsilon_k for every F ⊂ A_k ∩ [0, horizon] with
             |F| <= f_max, for F = A_k ∩ [0, horizon], and every m in ∪A_l ∩ [0, horizon] \\ F,
        iii  s_k = sup_{m∈A_k} ||T_m S_m y - y|| is nonincreasing along k and decreasing
             or zero (inconclusive at best).

    T_m applied to a sum is expanded by linearity from the precomputed T_m S_n y.
    """
    if len(epsilon_schedule) != len(families):
        raise PreconditionError("need one epsilon per family", {"families": len(families), "epsilons": len(epsilon_schedule)})
    if f_max < 0:
        raise PreconditionError("f_max must be >= 0", {"f_max": f_max})
    eps = [to_fraction(e) for e in epsilon_schedule]
    elements = [A.enumerate_up_to(horizon) for A in families]
    every = sorted(set(itertools.chain.from_iterable(elements)))
    conditions = []
    for i, y in enumerate(Y0):
        sups: list[Fraction] = []
        for k, items in enumerate(elements, start=1):
            z, half, _ = _partial_sums(S, y, items)
            conditions.append(_cauchy_condition(f"i[{i},{k}]", z, half, eps[k - 1], f"{len(items)} terms of A_{k}", k))

            images = {n: _call(S, "S", n, y) for n in items}
            applied = {(m, n): _call(T, "T", m, images[n]) for m in every for n in items if m != n}
            subsets = [F for r in range(min(f_max, len(items)) + 1) for F in itertools.combinations(items, r)]
            if len(items) > f_max:
                subsets.append(tuple(items))
            bad, checks = None, 0
            for F in subsets:
                members = set(F)
                for m in every:
                    if m in members:
                        continue
                    checks += 1
                    total = TruncatedVector.zero(y.space)
                    for n in F:
                        total = total + applied[(m, n)]
                    d = norm(total)
                    if not d < eps[k - 1]:
                        bad = (list(F), m, to_fraction(d))
                        break
                if bad:
                    break
            checked = f"{len(subsets)} subsets F of A_{k} x {len(every)} indices m"
            if bad is None:
                conditions.append(_condition(f"ii[{i},{k}]", ConditionStatus.PASS, checked, checks, f_max=f_max))
            else:
                F, m, d = bad
                conditions.append(
                    _condition(
                        f"ii[{i},{k}]",
                        ConditionStatus.FAIL,
                        checked,
                        checks,
                        Witness(condition=f"ii[{i},{k}]", indices=[m] + F, value=d, note="||T_m Σ_F S_n y|| >= eps_k"),
                        f_max=f_max,
                    )
                )
            sups.append(max((to_fraction(norm(_call(T, "T", m, images[m]) - y)) for m in items), default=Fraction(0)))

        checked = f"sup over A_k ∩ [0, {horizon}] for k = 1..{len(families)}"
        rising = next((k for k in range(1, len(sups)) if sups[k] > sups[k - 1]), None)
        stuck = len(sups) > 1 and sups[-1] > 0 and all(s == sups[0] for s in sups)
        if rising is None and not stuck:
            conditions.append(_condition(f"iii[{i}]", ConditionStatus.INCONCLUSIVE, checked, len(sups), sups=[str(s) for s in sups]))
        else:
            k = rising + 1 if rising is not None else len(sups)
            conditions.append(
                _condition(
                    f"iii[{i}]",
                    ConditionStatus.FAIL,
                    checked,
                    len(sups),
                    Witness(condition=f"iii[{i}]", indices=[i, k], value=sups[k - 1], note="sup_m ||T_m S_m y - y|| does not decrease"),
                    sups=[str(s) for s in sups],
                )
            )
    return CriterionReport.from_conditions(
        CriterionId.AHC2,
        conditions,
        horizon,
        {"families": [A.label for A in families], "epsilon": [_q(e) for e in eps], "f_max": f_max},
    )


def check_birkhoff_condition_b(
    T: Operator,
    U_center: TruncatedVector,
    U_radius: Fraction,
    V_center: TruncatedVector,
    V_radius: Fraction,
    delta: Fraction,
    sample_points: Sequence[TruncatedVector],
    horizon: int,
    mode: str = "natural",
    window_lengths: Iterable[int] | None = None,
) -> CriterionReport:
    """
    Search for x in U (from `sample_points`) and N <= horizon with

        natural: card{n <= N : T^n x ∈ V} / (N+1) > delta
        banach:  card{n ∈ [m, m+N] : T^n x ∈ V} / (N+1) > delta, N in `window_lengths`

    `T(n, x)` must return T^n x. A witness passes the report; exhausting the search is
    inconclusive. delta outside (0, 1) or a sample point outside U fails the report on
    its precondition.
    """
    delta = to_fraction(delta)
    parameters = {"delta": _q(delta), "mode": mode, "samples": len(sample_points), "horizon": horizon}
    if mode not in ("natural", "banach"):
        raise ValueError(f"mode must be 'natural' or 'banach', got {mode!r}")
    if mode == "banach" and not window_lengths:
        raise PreconditionError("banach mode needs window lengths")
    if not 0 < delta < 1:
        cond = _condition(
            "precondition",
            ConditionStatus.FAIL,
            "delta",
            witness=Witness(condition="precondition", value=delta, note="delta must lie in (0, 1)"),
        )
        return CriterionReport.from_conditions(CriterionId.BIRKHOFF_B, [cond], horizon, parameters)
    outside = next((i for i, x in enumerate(sample_points) if not within(x, U_center, U_radius)), None)
    if outside is not None:
        cond = _condition(
            "precondition",
            ConditionStatus.FAIL,
            "sample points",
            witness=Witness(condition="precondition", indices=[outside], note="sample point outside U"),
        )
        return CriterionReport.from_conditions(CriterionId.BIRKHOFF_B, [cond], horizon, parameters)

    def _visits(x: TruncatedVector) -> np.ndarray:
        return np.fromiter(
            (within(_call(T, "T", n, x), V_center, V_radius) for n in range(horizon + 1)), dtype=bool, count=horizon + 1
        )

    visits = run_parallel_exec_but_return_in_order(_visits, list(sample_points))
    checks = 0
    for i, hits in enumerate(visits):
        counts = np.cumsum(hits, dtype=np.int64)
        if mode == "natural":
            for N in range(horizon + 1):
                checks += 1
                if Fraction(int(counts[N]), N + 1) > delta:
                    witness = Witness(condition="b", indices=[i, N], value=Fraction(int(counts[N]), N + 1))
                    cond = _condition("b", ConditionStatus.PASS, f"{checks} (x, N) pairs", checks, witness)
                    return CriterionReport.from_conditions(CriterionId.BIRKHOFF_B, [cond], horizon, parameters)
        else:
            cumulative = np.concatenate(([0], counts))
            for N in sorted(window_lengths):
                if N > horizon:
                    continue
                windows = cumulative[N + 1 :] - cumulative[: horizon - N + 1]
                checks += windows.size
                best = int(windows.argmax())
                if Fraction(int(windows[best]), N + 1) > delta:
                    witness = Witness(condition="b", indices=[i, best, N], value=Fraction(int(windows[best]), N + 1))
                    cond = _condition("b", ConditionStatus.PASS, f"{checks} windows", checks, witness)
                    return CriterionReport.from_conditions(CriterionId.BIRKHOFF_B, [cond], horizon, parameters)
    logging.info(f"no condition (b) witness among {len(sample_points)} samples up to {horizon}")
    cond = _condition("b", ConditionStatus.INCONCLUSIVE, f"{checks} candidates up to {horizon}", checks)
    return CriterionReport.from_conditions(CriterionId.BIRKHOFF_B, [cond], horizon, parameters)
