"""
Finite-horizon estimators for the density functionals of index sets.

Every estimator evaluates its functional at a list of horizons N and returns a
`DensityProfile`. Values come from exact counts and are stored as Fractions; the only
floating point paths are logarithms (exponential density) and weighted sums of
non-constant weights above `EXACT_SUM_LIMIT`, which use correctly rounded `math.fsum`.

Counting strategy:
    dense sets  -> numpy prefix counts over `IndexSet.mask`,
    sparse sets -> their own generator plus `bisect` (elements far beyond mask range).

Component checks (`family_component_check`, `phi_component_check`, ...) decide membership
in one component of a density family up to a horizon. A `holds=True` answer comes with
the smallest witness N and is sound; `holds=False` only means "not within the horizon".
"""
import bisect
import logging
import math
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from config import DENSE_ARRAY_LIMIT, EXACT_SUM_LIMIT
from dynamics.index_sets import IndexSet, window_union
from helpers.arith import to_fraction
from helpers.errors import PreconditionError
from models.profiles import ComponentCheck, DensityProfile

Scalar = Fraction | float


def _check_horizons(horizons: Iterable[int], minimum: int = 0) -> list[int]:
    hs = [int(h) for h in horizons]
    if any(b <= a for a, b in zip(hs, hs[1:])):
        raise PreconditionError("horizons must be strictly increasing", {"horizons": hs})
    if hs and hs[0] < minimum:
        raise PreconditionError(f"horizons must be >= {minimum}", {"horizon": hs[0]})
    return hs


def counts_at(A: IndexSet, horizons: Sequence[int]) -> list[int]:
    """card(A ∩ [0, N]) for each N of an increasing list of horizons."""
    if not horizons:
        return []
    top = horizons[-1]
    if A.is_sparse or top > DENSE_ARRAY_LIMIT:
        elements = A.enumerate_up_to(top)
        return [bisect.bisect_right(elements, N) for N in horizons]
    prefix = A.prefix_counts(top)
    return [int(prefix[N]) for N in horizons]


def decade_horizons(top: int, first: int = 1000) -> list[int]:
    """
    first, 10*first, 100*first, ... below `top`, then `top` itself.

    Example:
        >>> decade_horizons(54321)
        [1000, 10000, 54321]
    """
    hs = []
    N = first
    while N < top:
        hs.append(N)
        N *= 10
    return hs + [top]


def geometric_horizons(top: int, points: int, start: int = 10) -> list[int]:
    """About `points` geometrically spaced horizons from `start` to `top` (always ending at `top`)."""
    if top <= start or points <= 1:
        return [top]
    raw = np.geomspace(start, top, num=points)
    return sorted(set(int(round(x)) for x in raw[:-1]) - {top}) + [top]


def count(A: IndexSet, N: int) -> int:
    """card(A ∩ [0, N])."""
    if N < 0:
        raise PreconditionError("count needs N >= 0", {"N": N})
    return A.count(N)


def natural_density_profile(A: IndexSet, horizons: Iterable[int], mode: str = "upper") -> DensityProfile:
    """
    values[i] = card(A ∩ [0, N_i]) / (N_i + 1).

    The values are the same for both modes; `mode` only tags which end of the profile
    estimates the functional (running_sup for upper density, running_inf for lower).
    """
    if mode not in ("upper", "lower"):
        raise ValueError(f"mode must be 'upper' or 'lower', got {mode!r}")
    hs = _check_horizons(horizons)
    counts = counts_at(A, hs)
    logging.info(f"natural density of {A.label!r} at {len(hs)} horizons up to {hs[-1] if hs else 0}")
    return DensityProfile.from_values(mode, hs, [Fraction(c, N + 1) for c, N in zip(counts, hs)])


# ------------------------------------------------------------------- Banach


def _best_window_dense(cumulative: np.ndarray, N: int, m_max: int) -> int:
    windows = cumulative[N + 1 : m_max + N + 2] - cumulative[: m_max + 1]
    return int(windows.max())


def _best_window_sparse(elements: list[int], N: int, m_max: int) -> int:
    # an optimal window can always be slid right to start at an element or at m_max
    starts = elements[: bisect.bisect_right(elements, m_max)] + [m_max]
    return max(bisect.bisect_right(elements, m + N) - bisect.bisect_left(elements, m) for m in starts)


def banach_density_at(A: IndexSet, N: int, m_max: int) -> Fraction:
    """
    sup over 0 <= m <= m_max of card(A ∩ [m, m+N]) / (N+1).

    A lower bound of the inner sup of the upper Banach density at window length N+1;
    the outer inf over N is left to the caller (see `banach_density_profile`).
    """
    if N < 0 or m_max < 0:
        raise PreconditionError("banach_density_at needs N >= 0 and m_max >= 0", {"N": N, "m_max": m_max})
    top = m_max + N
    if A.is_sparse or top > DENSE_ARRAY_LIMIT:
        best = _best_window_sparse(A.enumerate_up_to(top), N, m_max)
    else:
        cumulative = np.concatenate(([0], A.prefix_counts(top)))
        best = _best_window_dense(cumulative, N, m_max)
    return Fraction(best, N + 1)


def banach_density_profile(A: IndexSet, window_lengths: Iterable[int], m_max: int) -> DensityProfile:
    """Window estimates for each N in `window_lengths`; running_inf approximates the outer inf."""
    Ns = _check_horizons(window_lengths)
    if not Ns:
        return DensityProfile.from_values("banach", [], [])
    top = m_max + Ns[-1]
    if A.is_sparse or top > DENSE_ARRAY_LIMIT:
        elements = A.enumerate_up_to(top)
        best = [_best_window_sparse(elements, N, m_max) for N in Ns]
    else:
        cumulative = np.concatenate(([0], A.prefix_counts(top)))
        best = [_best_window_dense(cumulative, N, m_max) for N in Ns]
    return DensityProfile.from_values("banach", Ns, [Fraction(b, N + 1) for b, N in zip(best, Ns)])


# --------------------------------------------------------- weighted densities


class WeightProfile:
    """
    A decreasing weight sequence w_0 > 0, w_1, ... with partial sums W_N.

    Args:
        weight: k -> w_k. Exact (Fraction) when `exact`, float otherwise.
        label: used in functional tags.
        diverges: caller's assertion that W_N -> infinity.
        exact: whether `weight` returns exact rationals.
        array: optional N -> float array of w_0..w_N for vectorized summation.
        constant: w_k == w_0 for all k (sums reduce to counts).
    """

    def __init__(
        self,
        weight: Callable[[int], Scalar],
        label: str,
        diverges: bool = False,
        exact: bool = True,
        array: Callable[[int], np.ndarray] | None = None,
        constant: bool = False,
    ):
        w0 = weight(0)
        if not w0 > 0:
            raise PreconditionError("weight profiles need w_0 > 0", {"w_0": w0})
        self.weight = weight
        self.label = label
        self.diverges = diverges
        self.exact = exact
        self.constant = constant
        self._array = array

    def __repr__(self) -> str:
        return f"WeightProfile({self.label!r})"

    @classmethod
    def constant_one(cls) -> "WeightProfile":
        return cls(lambda k: Fraction(1), "1", diverges=True, constant=True, array=lambda N: np.ones(N + 1))

    @classmethod
    def power(cls, alpha: Fraction | float | int) -> "WeightProfile":
        """w_k = 1/(k+1)^alpha; alpha = 1 gives logarithmic density."""
        if alpha < 0:
            raise PreconditionError("alpha must be >= 0", {"alpha": alpha})
        if alpha == 0:
            return cls.constant_one()
        array = lambda N: 1.0 / np.power(np.arange(1, N + 2, dtype=float), float(alpha))
        if float(alpha).is_integer():
            a = int(alpha)
            return cls(lambda k: Fraction(1, (k + 1) ** a), f"1/(k+1)^{a}", diverges=a <= 1, array=array)
        return cls(lambda k: (k + 1) ** -float(alpha), f"1/(k+1)^{alpha}", diverges=alpha <= 1, exact=False, array=array)

    def values(self, N: int) -> np.ndarray:
        if self._array is not None:
            return np.asarray(self._array(N), dtype=float)
        return np.fromiter((float(self.weight(k)) for k in range(N + 1)), dtype=float, count=N + 1)

    def check_decreasing(self, N: int):
        if N < 1:
            return
        diffs = np.diff(self.values(N))
        bad = np.flatnonzero(diffs > 0)
        if bad.size:
            k = int(bad[0])
            raise PreconditionError(f"weights of {self.label!r} increase at k={k + 1}", {"k": k + 1})

    def sums(self, A: IndexSet, horizons: Sequence[int]) -> tuple[list[Scalar], list[Scalar]]:
        """(S_N, W_N) at each horizon, S_N = Σ_{k∈A, k<=N} w_k and W_N = Σ_{k<=N} w_k."""
        if not horizons:
            return [], []
        top = horizons[-1]
        if self.constant:
            w0 = self.weight(0)
            return [c * w0 for c in counts_at(A, horizons)], [(N + 1) * w0 for N in horizons]
        if self.exact and top <= EXACT_SUM_LIMIT:
            members = A.mask(top)
            S, W = Fraction(0), Fraction(0)
            out_s, out_w = [], []
            marks = iter(horizons)
            nxt = next(marks)
            for k in range(top + 1):
                w = self.weight(k)
                W += w
                if members[k]:
                    S += w
                if k == nxt:
                    out_s.append(S)
                    out_w.append(W)
                    nxt = next(marks, None)
            return out_s, out_w
        v = self.values(top)
        members = A.mask(top)
        seg_s, seg_w, out_s, out_w = [], [], [], []
        lo = 0
        for N in horizons:
            chunk = v[lo : N + 1]
            seg_w.append(math.fsum(chunk))
            seg_s.append(math.fsum(chunk[members[lo : N + 1]]))
            out_s.append(math.fsum(seg_s))
            out_w.append(math.fsum(seg_w))
            lo = N + 1
        return out_s, out_w


def weighted_density_profile(A: IndexSet, wp: WeightProfile, horizons: Iterable[int]) -> DensityProfile:
    """values[i] = (1/W_N) Σ_{k∈A, k<=N} w_k at N = horizons[i]."""
    hs = _check_horizons(horizons)
    if hs:
        wp.check_decreasing(min(hs[-1], EXACT_SUM_LIMIT))
    S, W = wp.sums(A, hs)
    values = [to_fraction(s) / to_fraction(w) for s, w in zip(S, W)]
    return DensityProfile.from_values(f"weighted({wp.label})", hs, values)


def phi_sum_profile(A: IndexSet, phi: WeightProfile, horizons: Iterable[int]) -> DensityProfile:
    """Unnormalized values Σ_{k∈A, k<=N} phi_k; divergence shows as an unbounded trend."""
    hs = _check_horizons(horizons)
    S, _ = phi.sums(A, hs)
    return DensityProfile.from_values(f"phi({phi.label})", hs, [to_fraction(s) for s in S])


def phi_component_check(A: IndexSet, phi: WeightProfile, m: Scalar, horizon: int) -> ComponentCheck:
    """Is Σ_{k∈A, k<=N} phi_k > m for some N <= horizon? The smallest such N is an element of A."""
    exact = phi.exact and (phi.constant or horizon <= EXACT_SUM_LIMIT)
    bound = to_fraction(m) if exact else float(m)
    total: Scalar = Fraction(0) if exact else 0.0
    for k in A.iter_up_to(horizon):
        w = phi.weight(k)
        total += w if exact else float(w)
        if total > bound:
            return ComponentCheck(component=f"phi>{m}", holds=True, witness=k, value=to_fraction(total), horizon=horizon)
    return ComponentCheck(component=f"phi>{m}", holds=False, value=to_fraction(total), horizon=horizon)


# ---------------------------------------------------------- matrix densities


class DensityMatrix:
    """
    A non-negative matrix (w_{n,k}) read row by row.

    Args:
        entry: (n, k) -> w_{n,k}.
        k_max: n -> last column summed explicitly for row n.
        tail_bound: n -> certified bound on Σ_{k > k_max(n)} w_{n,k}; a row whose tail
            bound is None is rejected.
    """

    def __init__(
        self,
        entry: Callable[[int, int], Scalar],
        k_max: Callable[[int], int],
        tail_bound: Callable[[int], Scalar | None] | None,
        label: str,
    ):
        self.entry = entry
        self.k_max = k_max
        self.tail_bound = tail_bound
        self.label = label

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Scalar]], label: str = "matrix") -> "DensityMatrix":
        """A finite matrix; rows are zero beyond their last column."""

        def _row(n: int) -> Sequence[Scalar]:
            if not 0 <= n < len(rows):
                raise PreconditionError(f"matrix {label!r} has no row {n}", {"n": n})
            return rows[n]

        return cls(lambda n, k: to_fraction(_row(n)[k]), lambda n: len(_row(n)) - 1, lambda n: Fraction(0), label)

    def row_tail(self, n: int) -> Fraction:
        bound = None if self.tail_bound is None else self.tail_bound(n)
        if bound is None:
            raise PreconditionError(f"row {n} of {self.label!r} has no certified tail bound", {"n": n})
        return to_fraction(bound)

    def row_sum(self, n: int, A: IndexSet) -> Fraction:
        return sum((to_fraction(self.entry(n, k)) for k in A.iter_up_to(self.k_max(n))), Fraction(0))


def cesaro_matrix() -> DensityMatrix:
    """w_{n,k} = 1/(n+1) for k <= n; reduces matrix density to natural density."""
    return DensityMatrix(
        lambda n, k: Fraction(1, n + 1) if k <= n else Fraction(0),
        lambda n: n,
        lambda n: Fraction(0),
        "cesaro",
    )


def matrix_density_profile(A: IndexSet, W: DensityMatrix, horizons: Iterable[int]) -> DensityProfile:
    hs = _check_horizons(horizons)
    slack = [W.row_tail(N) for N in hs]
    values = [W.row_sum(N, A) for N in hs]
    return DensityProfile.from_values(f"matrix({W.label})", hs, values, slack=slack)


# ------------------------------------------------------- exponential density


def exponential_density_profile(A: IndexSet, horizons: Iterable[int]) -> DensityProfile:
    """values[i] = log⁺(card(A ∩ [0, N])) / log(N+1), clipped to [0, 1]."""
    hs = _check_horizons(horizons, minimum=1)
    values = []
    for c, N in zip(counts_at(A, hs), hs):
        v = math.log(c) / math.log(N + 1) if c > 1 else 0.0
        values.append(Fraction(min(max(v, 0.0), 1.0)))
    return DensityProfile.from_values("exponential", hs, values)


def exponential_density_one_check(A: IndexSet, horizons: Iterable[int], tolerance: Scalar = Fraction(1, 100)) -> ComponentCheck:
    """Does the exponential profile reach 1 - tolerance somewhere along the horizons?"""
    profile = exponential_density_profile(A, horizons)
    target = 1 - to_fraction(tolerance)
    for N, v in zip(profile.horizons, profile.values):
        if v >= target:
            return ComponentCheck(component=f"exp-dens>={target}", holds=True, witness=N, value=v, horizon=N)
    return ComponentCheck(
        component=f"exp-dens>={target}",
        holds=False,
        value=profile.running_sup[0] if profile.values else None,
        horizon=profile.horizons[-1] if profile.horizons else 0,
    )


# -------------------------------------------------------- family components


def family_component_check(A: IndexSet, delta: Scalar, n: int, horizon: int) -> ComponentCheck:
    """
    Decide, up to `horizon`, whether card(A ∩ [0,N])/(N+1) > delta for some N in [n, horizon].

    Between two consecutive elements of A the ratio only decreases, so the smallest
    witness is either n itself or an element of A.
    """
    delta = to_fraction(delta)
    if not 0 < delta < 1 or n < 0 or horizon < n:
        raise PreconditionError(
            "family_component_check needs 0 < delta < 1 and 0 <= n <= horizon",
            {"delta": delta, "n": n, "horizon": horizon},
        )
    component = f"dens>{delta}@{n}"
    c0 = A.count(n)
    if Fraction(c0, n + 1) > delta:
        return ComponentCheck(component=component, holds=True, witness=n, value=Fraction(c0, n + 1), horizon=horizon)
    c = c0
    for k in A.iter_up_to(horizon):
        if k <= n:
            continue
        c += 1
        if Fraction(c, k + 1) > delta:
            return ComponentCheck(component=component, holds=True, witness=k, value=Fraction(c, k + 1), horizon=horizon)
    return ComponentCheck(component=component, holds=False, horizon=horizon)


def maximal_density_component_check(A: IndexSet, m: int, n: int, horizon: int) -> ComponentCheck:
    """Component (m, n) of the maximal-density families: threshold 1 - 1/m."""
    if m < 2:
        raise PreconditionError("maximal density components need m >= 2", {"m": m})
    return family_component_check(A, 1 - Fraction(1, m), n, horizon)


def hindman_profile(A: IndexSet, Nu: int, horizons: Iterable[int]) -> DensityProfile:
    """Lower-density profile of ∪_{n<=Nu} (A - n)."""
    profile = natural_density_profile(window_union(A, Nu), horizons, mode="lower")
    return profile.model_copy(update={"functional_tag": f"hindman({Nu})"})


def polya_density_grid(A: IndexSet, alphas: Iterable[Scalar], horizons: Iterable[int]) -> list[DensityProfile]:
    """
    One profile per alpha in (0, 1): card(A ∩ (⌊αN⌋, N]) / (N - ⌊αN⌋).

    The upper Pólya density is the limit alpha -> 1 of the limsups; the grid is the caller's.
    """
    hs = _check_horizons(horizons, minimum=1)
    if not hs:
        return []
    elements = None if not A.is_sparse else A.enumerate_up_to(hs[-1])
    prefix = A.prefix_counts(hs[-1]) if elements is None else None

    def _count(N: int) -> int:
        if N < 0:
            return 0
        return bisect.bisect_right(elements, N) if elements is not None else int(prefix[N])

    profiles = []
    for alpha in alphas:
        a = to_fraction(alpha)
        if not 0 < a < 1:
            raise PreconditionError("Polya ratios must lie in (0, 1)", {"alpha": a})
        values = []
        for N in hs:
            lo = math.floor(a * N)
            values.append(Fraction(_count(N) - _count(lo), N - lo))
        profiles.append(DensityProfile.from_values(f"polya({a})", hs, values))
    return profiles
