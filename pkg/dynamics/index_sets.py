"""
Lazy subsets of the non-negative integers.

An `IndexSet` is an immutable value made of a membership oracle (valid for
arbitrarily large Python ints) and up to three optional accelerators:

- `mask(N)`      numpy boolean mask of the set on [0, N] (vectorized counting),
- `elements(N)`  increasing generator of the elements <= N (sparse sets whose
                 elements lie far beyond mask range, e.g. near 3**27),
- `counter(N)`   card(A ∩ [0, N]) without enumeration (interval families).

Whatever accelerators are present, `enumerate_up_to(N)` always returns exactly
[n <= N : n in A] in increasing order. Operations never mutate their inputs and
always return new sets, so sets can be shared freely between worker threads.

Usage:
    >>> threes = from_predicate(lambda n: n % 3 == 0, "3N")
    >>> threes.enumerate_up_to(9)
    [0, 3, 6, 9]
    >>> difference(threes, from_elements([3])).enumerate_up_to(9)
    [0, 6, 9]
"""
import bisect
import heapq
import itertools
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np
import pandas as pd

from config import DENSE_ARRAY_LIMIT
from helpers.arith import merged_intervals
from helpers.errors import CapExceededError, PreconditionError
from helpers.utils import list_to_range

Membership = Callable[[int], bool]
MaskFn = Callable[[int], np.ndarray]
ElementsFn = Callable[[int], Iterator[int]]
CounterFn = Callable[[int], int]
Interval = tuple[int, int]


class IndexSet:
    __slots__ = ("_membership", "_mask", "_elements", "_counter", "label")

    def __init__(
        self,
        membership: Membership,
        label: str = "",
        mask: MaskFn | None = None,
        elements: ElementsFn | None = None,
        counter: CounterFn | None = None,
    ):
        self._membership = membership
        self._mask = mask
        self._elements = elements
        self._counter = counter
        self.label = label

    def __repr__(self) -> str:
        return f"IndexSet({self.label!r})"

    def contains(self, n: int) -> bool:
        n = int(n)
        return n >= 0 and bool(self._membership(n))

    __contains__ = contains

    def relabeled(self, label: str) -> "IndexSet":
        """The same set under another label; self is left untouched."""
        return IndexSet(self._membership, label, self._mask, self._elements, self._counter)

    @property
    def has_generator(self) -> bool:
        return self._elements is not None

    @property
    def is_sparse(self) -> bool:
        """Enumerated by its own generator rather than by a dense mask."""
        return self._elements is not None and self._mask is None

    def mask(self, N: int) -> np.ndarray:
        """Boolean mask m with m[n] == (n in A) for 0 <= n <= N."""
        if N < 0:
            return np.zeros(0, dtype=bool)
        if N > DENSE_ARRAY_LIMIT:
            raise CapExceededError(
                f"horizon {N} is above the dense array limit {DENSE_ARRAY_LIMIT}",
                {"horizon": N, "set": self.label},
            )
        if self._mask is not None:
            arr = np.asarray(self._mask(N), dtype=bool)
            if arr.shape != (N + 1,):
                raise ValueError(f"mask of {self.label!r} has shape {arr.shape}, expected {(N + 1,)}")
            return arr
        if self._elements is not None:
            arr = np.zeros(N + 1, dtype=bool)
            idx = np.fromiter(self._elements(N), dtype=np.int64)
            arr[idx] = True
            return arr
        return np.fromiter((self.contains(n) for n in range(N + 1)), dtype=bool, count=N + 1)

    def iter_up_to(self, N: int) -> Iterator[int]:
        if N < 0:
            return iter(())
        if self._elements is not None:
            return iter(self._elements(N))
        return iter(np.flatnonzero(self.mask(N)).tolist())

    def enumerate_up_to(self, N: int) -> list[int]:
        return list(self.iter_up_to(N))

    def count(self, N: int) -> int:
        """card(A ∩ [0, N])."""
        if N < 0:
            return 0
        if self._counter is not None:
            return int(self._counter(N))
        if self._mask is not None or self._elements is None:
            return int(np.count_nonzero(self.mask(N)))
        return sum(1 for _ in self._elements(N))

    def prefix_counts(self, N: int) -> np.ndarray:
        """c[n] = card(A ∩ [0, n]) for 0 <= n <= N (int64)."""
        return np.cumsum(self.mask(N), dtype=np.int64)


def _label(text: str, limit: int = 80) -> str:
    return text if len(text) <= limit else text[: limit - 3] + "..."


# ---------------------------------------------------------------- constructors


def from_predicate(pred: Membership, label: str = "predicate") -> IndexSet:
    return IndexSet(pred, label)


def from_elements(elements: Iterable[int], label: str | None = None) -> IndexSet:
    """Finite set from an iterable of non-negative integers."""
    items = sorted(set(int(e) for e in elements))
    if items and items[0] < 0:
        raise PreconditionError("index sets live in N0", {"element": items[0]})
    members = frozenset(items)

    def _elements(N: int) -> Iterator[int]:
        return iter(items[: bisect.bisect_right(items, N)])

    return IndexSet(
        members.__contains__,
        label if label is not None else _label("{" + list_to_range(items) + "}"),
        elements=_elements,
        counter=lambda N: bisect.bisect_right(items, N),
    )


def empty() -> IndexSet:
    return from_elements([], "{}")


def naturals() -> IndexSet:
    return IndexSet(
        lambda n: True,
        "N0",
        mask=lambda N: np.ones(N + 1, dtype=bool),
        counter=lambda N: N + 1,
    )


def arithmetic(step: int, offset: int = 0, label: str | None = None) -> IndexSet:
    """{offset + l*step : l >= 0}."""
    if step < 1 or offset < 0:
        raise PreconditionError("arithmetic progression needs step >= 1 and offset >= 0", {"step": step, "offset": offset})

    def _mask(N: int) -> np.ndarray:
        arr = np.zeros(N + 1, dtype=bool)
        arr[offset::step] = True
        return arr

    return IndexSet(
        lambda n: n >= offset and (n - offset) % step == 0,
        label or f"{offset}+{step}N0",
        mask=_mask,
        elements=lambda N: iter(range(offset, N + 1, step)),
        counter=lambda N: 0 if N < offset else (N - offset) // step + 1,
    )


def interval(lo: int, hi: int) -> IndexSet:
    return restrict(naturals(), lo, hi)


# ------------------------------------------------------------ interval families


class IntervalFamily:
    """
    A lazily generated union of closed integer intervals.

    Args:
        generation: g -> intervals of generation g (g = 1, 2, ...), as an iterator
            with nondecreasing starts. A generation may be infinite.
        start_bound: g -> a lower bound for every start in generation g,
            nondecreasing in g. Required unless `last_generation` is given.
        cover: optional n -> candidate intervals that may contain n, computed
            in closed form. Without it membership scans the intervals meeting [0, n].
        last_generation: number of generations for a finite family.
    """

    def __init__(
        self,
        generation: Callable[[int], Iterable[Interval]],
        start_bound: Callable[[int], int] | None = None,
        cover: Callable[[int], Iterable[Interval]] | None = None,
        label: str = "intervals",
        last_generation: int | None = None,
    ):
        if start_bound is None and last_generation is None:
            raise PreconditionError(
                f"interval family {label!r} declares no start lower bound; enumeration would not terminate"
            )
        self.generation = generation
        self.start_bound = start_bound
        self.cover = cover
        self.label = label
        self.last_generation = last_generation

    @classmethod
    def empty(cls) -> "IntervalFamily":
        return cls(lambda g: iter(()), label="no intervals", last_generation=0)

    @classmethod
    def from_list(cls, intervals: Iterable[Interval], label: str = "intervals") -> "IntervalFamily":
        items = sorted((int(s), int(e)) for s, e in intervals)
        if any(s > e for s, e in items):
            raise PreconditionError("interval with start > end", {"intervals": items})
        return cls(lambda g: iter(items), label=label, last_generation=1)

    def intervals_meeting(self, N: int) -> Iterator[Interval]:
        """Every generated interval meeting [0, N], clipped below at 0."""
        for g in itertools.count(1):
            if self.last_generation is not None and g > self.last_generation:
                return
            if self.start_bound is not None and self.start_bound(g) > N:
                return
            for start, end in self.generation(g):
                if start > N:
                    break
                if end < 0:
                    continue
                yield max(start, 0), end

    def covers(self, n: int) -> bool:
        candidates = self.cover(n) if self.cover is not None else self.intervals_meeting(n)
        return any(s <= n <= e for s, e in candidates)


def from_intervals(f: IntervalFamily) -> IndexSet:
    def _mask(N: int) -> np.ndarray:
        arr = np.zeros(N + 1, dtype=bool)
        for s, e in f.intervals_meeting(N):
            arr[s : min(e, N) + 1] = True
        return arr

    def _merged(N: int) -> list[Interval]:
        return [(s, min(e, N)) for s, e in merged_intervals(f.intervals_meeting(N))]

    def _elements(N: int) -> Iterator[int]:
        for s, e in _merged(N):
            yield from range(s, e + 1)

    return IndexSet(
        f.covers,
        f.label,
        mask=_mask,
        elements=_elements,
        counter=lambda N: sum(e - s + 1 for s, e in _merged(N)),
    )


# ------------------------------------------------------------------ operations


def shift_left(A: IndexSet, n: int) -> IndexSet:
    """A - n = {k - n : k in A, k >= n}."""
    if n < 0:
        raise PreconditionError("shift amount must be >= 0", {"n": n})
    if n == 0:
        return A
    elements = None
    if A.has_generator:
        elements = lambda N: (k - n for k in A.iter_up_to(N + n) if k >= n)
    return IndexSet(
        lambda k: A.contains(k + n),
        f"({A.label})-{n}",
        mask=lambda N: A.mask(N + n)[n:].copy(),
        elements=elements,
    )


def tail(A: IndexSet, n: int) -> IndexSet:
    """A ∩ [n+1, ∞)."""
    if n < 0:
        raise PreconditionError("tail index must be >= 0", {"n": n})

    def _mask(N: int) -> np.ndarray:
        arr = A.mask(N).copy()
        arr[: n + 1] = False
        return arr

    elements = None
    if A.has_generator:
        elements = lambda N: (k for k in A.iter_up_to(N) if k > n)
    return IndexSet(lambda k: k > n and A.contains(k), f"({A.label})\\[0,{n}]", mask=_mask, elements=elements)


def union(A: IndexSet, B: IndexSet) -> IndexSet:
    elements = None
    if A.has_generator and B.has_generator:
        def elements(N: int) -> Iterator[int]:
            last = None
            for k in heapq.merge(A.iter_up_to(N), B.iter_up_to(N)):
                if k != last:
                    yield k
                    last = k
    return IndexSet(
        lambda k: A.contains(k) or B.contains(k),
        f"({A.label}) ∪ ({B.label})",
        mask=lambda N: A.mask(N) | B.mask(N),
        elements=elements,
    )


def union_all(sets: Iterable[IndexSet], label: str | None = None) -> IndexSet:
    sets = list(sets)
    if not sets:
        return empty()
    result = sets[0]
    for s in sets[1:]:
        result = union(result, s)
    return result if label is None else result.relabeled(label)


def union_of_levels(
    level_set: Callable[[int], IndexSet], first: int, level_start: Callable[[int], int], label: str
) -> IndexSet:
    """
    ∪_{q >= first} level_set(q) for infinitely many levels.

    `level_start(q)` is a lower bound for min level_set(q), nondecreasing and unbounded
    in q, so only finitely many levels meet any [0, N].
    """

    def _levels(N: int) -> Iterator[int]:
        q = first
        while level_start(q) <= N:
            yield q
            q += 1

    def _mask(N: int) -> np.ndarray:
        arr = np.zeros(N + 1, dtype=bool)
        for q in _levels(N):
            arr |= level_set(q).mask(N)
        return arr

    def _elements(N: int) -> Iterator[int]:
        last = None
        for k in heapq.merge(*(level_set(q).iter_up_to(N) for q in _levels(N))):
            if k != last:
                yield k
                last = k

    return IndexSet(
        lambda n: any(level_set(q).contains(n) for q in _levels(n)),
        label,
        mask=_mask,
        elements=_elements,
    )


def intersection(A: IndexSet, B: IndexSet) -> IndexSet:
    elements = None
    if A.has_generator:
        elements = lambda N: (k for k in A.iter_up_to(N) if B.contains(k))
    elif B.has_generator:
        elements = lambda N: (k for k in B.iter_up_to(N) if A.contains(k))
    return IndexSet(
        lambda k: A.contains(k) and B.contains(k),
        f"({A.label}) ∩ ({B.label})",
        mask=lambda N: A.mask(N) & B.mask(N),
        elements=elements,
    )


def difference(A: IndexSet, B: IndexSet) -> IndexSet:
    elements = None
    if A.has_generator:
        elements = lambda N: (k for k in A.iter_up_to(N) if not B.contains(k))
    return IndexSet(
        lambda k: A.contains(k) and not B.contains(k),
        f"({A.label}) \\ ({B.label})",
        mask=lambda N: A.mask(N) & ~B.mask(N),
        elements=elements,
    )


def restrict(A: IndexSet, lo: int, hi: int) -> IndexSet:
    """A ∩ [lo, hi]; always finite, hence always enumerable by generator."""
    if lo > hi:
        raise PreconditionError("restrict needs lo <= hi", {"lo": lo, "hi": hi})
    lo = max(lo, 0)

    def _mask(N: int) -> np.ndarray:
        arr = np.zeros(N + 1, dtype=bool)
        top = min(N, hi)
        if top >= lo:
            arr[lo : top + 1] = A.mask(top)[lo:]
        return arr

    def _elements(N: int) -> Iterator[int]:
        return (k for k in A.iter_up_to(min(N, hi)) if k >= lo)

    return IndexSet(lambda k: lo <= k <= hi and A.contains(k), f"({A.label}) ∩ [{lo},{hi}]", mask=_mask, elements=_elements)


def window_union(A: IndexSet, depth: int) -> IndexSet:
    """∪_{n=0}^{depth} (A - n): the k for which A meets [k, k + depth]."""
    if depth < 0:
        raise PreconditionError("union depth must be >= 0", {"depth": depth})

    def _membership(k: int) -> bool:
        if A.has_generator:
            return any(x >= k for x in A.iter_up_to(k + depth))
        return any(A.contains(k + i) for i in range(depth + 1))

    def _mask(N: int) -> np.ndarray:
        counts = np.concatenate(([0], np.cumsum(A.mask(N + depth), dtype=np.int64)))
        ks = np.arange(N + 1)
        return (counts[ks + depth + 1] - counts[ks]) > 0

    return IndexSet(_membership, f"∪_(n<={depth}) (({A.label})-n)", mask=_mask)


# --------------------------------------------------------------------- exports


def to_text(A: IndexSet, N: int) -> str:
    """One integer per line."""
    return "".join(f"{k}\n" for k in A.iter_up_to(N))


def to_dataframe(A: IndexSet, N: int) -> pd.DataFrame:
    return pd.DataFrame({"n": A.enumerate_up_to(N)}, dtype=object)


def export(A: IndexSet, N: int, path: str | Path, header_comment: str | None = None) -> Path:
    """Write the enumeration to `.txt` (one per line) or `.csv` (column "n")."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        if path.suffix == ".txt":
            f.write(to_text(A, N))
        elif path.suffix == ".csv":
            if header_comment:
                f.write(f"# {header_comment}\n")
            to_dataframe(A, N).to_csv(f, index=False)
        else:
            raise ValueError("Invalid file format. Must be .txt or .csv.")
    return path
