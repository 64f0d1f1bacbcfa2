"""
Weighted backward shifts on finitely supported vectors of c0 and l^p.

    (B_w x)_n = w_{n+1} x_{n+1},   varpi_n = w_1 w_2 ... w_n,   varpi_0 = 1

so that (B_w^m x)_j = (varpi_{j+m} / varpi_j) x_{j+m}. Scalars are exact `Fraction`s;
weight sequences are evaluated through varpi, either in closed form as a power
`base ** exponent(n)` (`ExponentWeights`, the form every construction uses) or from an
explicit weight function (`ProductWeights`).

Conjugacy: dividing entry n by varpi_n (`conjugate_to_unweighted`) carries the
unweighted shift B to B_w, and multiplying by varpi_n (`conjugate_from_unweighted`)
carries B_w back to B:

    conjugate_from_unweighted(w, backward_apply(w, x, m))
        == backward_apply(unweighted(), conjugate_from_unweighted(w, x), m)
"""
import logging
import math
import threading
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Callable, Iterable, Literal

import numpy as np
from pydantic import ConfigDict, field_serializer, field_validator, model_validator

from config import HYPLAB_THREADS, MAX_VARPI_BITS
from dynamics.index_sets import IndexSet, from_elements, interval, union
from helpers.arith import threshold_exponent, to_fraction
from helpers.errors import PrecisionBudgetError, PreconditionError
from helpers.utils import run_parallel_exec_but_return_in_order
from models.basemodel import BaseModel, ExactRational

Scalar = Fraction | int


class Space(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["c0", "lp"] = "c0"
    p: int | None = None

    @model_validator(mode="after")
    def _check_p(self):
        if self.kind == "lp" and (self.p is None or self.p < 1):
            raise ValueError("l^p spaces need an integer p >= 1")
        if self.kind == "c0" and self.p is not None:
            raise ValueError("c0 takes no exponent")
        return self

    @classmethod
    def c0(cls) -> "Space":
        return cls(kind="c0")

    @classmethod
    def lp(cls, p: int) -> "Space":
        return cls(kind="lp", p=p)

    @classmethod
    def parse(cls, text: str) -> "Space":
        """'c0', 'l1', 'l2', ... or 'lp:3'."""
        text = text.strip().lower()
        if text == "c0":
            return cls.c0()
        digits = text.removeprefix("lp:").removeprefix("l")
        if not digits.isdigit():
            raise ValueError(f"Unknown sequence space {text!r}. Must be c0 or l<p>.")
        return cls.lp(int(digits))

    def __str__(self) -> str:
        return "c0" if self.kind == "c0" else f"l{self.p}"


# ------------------------------------------------------------------- weights


def _min_exponent_above(base: int, M: Fraction) -> int:
    """Smallest integer e (possibly negative) with base**e > M, for M > 0."""
    M = to_fraction(M)
    if M <= 0:
        raise PreconditionError("threshold must be > 0", {"M": M})
    if M >= 1:
        return threshold_exponent(base, M)
    e = 0
    while Fraction(base) ** (e - 1) > M:
        e -= 1
    return e


class WeightSequence(ABC):
    """Weights w_n (n >= 1) seen through their products varpi_n."""

    label: str = "w"
    sup_bound: Fraction | None = None

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label!r})"

    @abstractmethod
    def varpi(self, n: int) -> Fraction:
        """varpi_n = w_1 ... w_n, varpi_0 = 1."""
        pass

    def weight(self, n: int) -> Fraction:
        if n < 1:
            raise PreconditionError("weights are indexed from 1", {"n": n})
        return self.varpi(n) / self.varpi(n - 1)

    def ratio(self, n: int, m: int) -> Fraction:
        """varpi_n / varpi_m."""
        return self.varpi(n) / self.varpi(m)

    def log2_varpi(self, n: int) -> float:
        v = abs(self.varpi(n))
        return math.log2(v.numerator) - math.log2(v.denominator)

    def exceeds(self, n: int, M: Fraction) -> bool:
        """|varpi_n| > M."""
        return abs(self.varpi(n)) > M

    def above_mask(self, N: int, M: Fraction) -> np.ndarray:
        """m[n] = |varpi_n| > M for 0 <= n <= N."""
        M = to_fraction(M)
        return np.fromiter((self.exceeds(n, M) for n in range(N + 1)), dtype=bool, count=N + 1)

    def max_weight(self, horizon: int) -> Fraction:
        """max |w_n| over 1 <= n <= horizon."""
        return max((abs(self.weight(n)) for n in range(1, horizon + 1)), default=Fraction(0))

    def is_c0_operator(self, horizon: int) -> bool:
        """The declared bound sup|w_n| exists and holds on [1, horizon] (exact)."""
        return self.sup_bound is not None and self.max_weight(horizon) <= self.sup_bound

    def check_budget(self, n: int) -> Fraction:
        v = self.varpi(n)
        bits = v.numerator.bit_length() + v.denominator.bit_length()
        if bits > MAX_VARPI_BITS:
            raise PrecisionBudgetError(
                f"|varpi_{n}| needs {bits} bits, above the budget of {MAX_VARPI_BITS}", {"n": n, "bits": bits}
            )
        return v


class ExponentWeights(WeightSequence):
    """
    varpi_n = base ** exponent(n) in closed form.

    Args:
        base: integer >= 2.
        exponent: n -> integer exponent, exponent(0) must be 0.
        exponent_array: optional N -> int64 array of exponent(0..N) for vectorized sweeps.
        label: description.
        sup_bound: declared sup |w_n|, if any.
    """

    def __init__(
        self,
        base: int,
        exponent: Callable[[int], int],
        exponent_array: Callable[[int], np.ndarray] | None = None,
        label: str = "w",
        sup_bound: Scalar | None = None,
    ):
        if base < 2:
            raise PreconditionError("exponent weights need base >= 2", {"base": base})
        if exponent(0) != 0:
            raise PreconditionError("varpi_0 must be 1", {"exponent(0)": exponent(0)})
        self.base = base
        self.exponent = exponent
        self.exponent_array = exponent_array
        self.label = label
        self.sup_bound = None if sup_bound is None else to_fraction(sup_bound)

    def varpi(self, n: int) -> Fraction:
        return Fraction(self.base) ** self.exponent(n)

    def log2_varpi(self, n: int) -> float:
        return self.exponent(n) * math.log2(self.base)

    def exponents(self, N: int) -> np.ndarray:
        if self.exponent_array is not None:
            return np.asarray(self.exponent_array(N), dtype=np.int64)
        return np.fromiter((self.exponent(n) for n in range(N + 1)), dtype=np.int64, count=N + 1)

    def exceeds(self, n: int, M: Fraction) -> bool:
        return self.exponent(n) >= _min_exponent_above(self.base, M)

    def above_mask(self, N: int, M: Fraction) -> np.ndarray:
        return self.exponents(N) >= _min_exponent_above(self.base, M)

    def max_weight(self, horizon: int) -> Fraction:
        if horizon < 1:
            return Fraction(0)
        steps = np.diff(self.exponents(horizon))
        return Fraction(self.base) ** int(steps.max())


class ProductWeights(WeightSequence):
    """varpi from an explicit weight function; prefix products are memoized up to the largest n asked."""

    def __init__(self, weight: Callable[[int], Scalar], label: str = "w", sup_bound: Scalar | None = None):
        self._weight = weight
        self.label = label
        self.sup_bound = None if sup_bound is None else to_fraction(sup_bound)
        self._prefix: list[Fraction] = [Fraction(1)]
        self._lock = threading.Lock()

    def weight(self, n: int) -> Fraction:
        if n < 1:
            raise PreconditionError("weights are indexed from 1", {"n": n})
        w = to_fraction(self._weight(n))
        if w == 0:
            raise PreconditionError("weights must be nonzero", {"n": n})
        return w

    def varpi(self, n: int) -> Fraction:
        if n < 0:
            raise PreconditionError("varpi is indexed from 0", {"n": n})
        with self._lock:
            while len(self._prefix) <= n:
                self._prefix.append(self._prefix[-1] * self.weight(len(self._prefix)))
            return self._prefix[n]


def unweighted() -> ExponentWeights:
    return ExponentWeights(2, lambda n: 0, lambda N: np.zeros(N + 1, dtype=np.int64), label="1", sup_bound=1)


def geometric(ratio: Scalar) -> WeightSequence:
    """w_n = ratio for every n, so varpi_n = ratio**n."""
    ratio = to_fraction(ratio)
    if ratio.denominator == 1 and ratio >= 2:
        r = int(ratio)
        return ExponentWeights(r, lambda n: n, lambda N: np.arange(N + 1, dtype=np.int64), label=f"{r}^n", sup_bound=r)
    return ProductWeights(lambda n: ratio, label=f"({ratio})^n", sup_bound=abs(ratio))


def from_weights(weight: Callable[[int], Scalar], label: str = "w", sup_bound: Scalar | None = None) -> ProductWeights:
    return ProductWeights(weight, label, sup_bound)


# ------------------------------------------------------------------- vectors


def _to_wire(index: int, value: Fraction) -> list[int]:
    num, den = value.numerator, value.denominator
    tz_num = (num & -num).bit_length() - 1
    tz_den = (den & -den).bit_length() - 1
    return [index, num >> tz_num, den >> tz_den, tz_num - tz_den]


def _from_wire(quad: list[int]) -> tuple[int, Fraction]:
    index, num, den, exp2 = quad
    return int(index), Fraction(num, den) * Fraction(2) ** exp2


class TruncatedVector(BaseModel):
    """
    A finitely supported vector of c0 or l^p. Zero entries are dropped, so two vectors
    are equal exactly when their spaces and nonzero entries are.

    JSON form: {"space": {...}, "entries": [[index, numerator, denominator, exp2], ...]}
    with odd numerator and denominator.
    """

    model_config = ConfigDict(frozen=True)

    space: Space = Space.c0()
    entries: dict[int, ExactRational] = {}

    @field_validator("entries", mode="before")
    @classmethod
    def _parse_entries(cls, v):
        if isinstance(v, list):
            v = dict(_from_wire(q) for q in v)
        out = {}
        for k, x in dict(v).items():
            k = int(k)
            if k < 0:
                raise ValueError(f"vector indices must be >= 0, got {k}")
            x = to_fraction(x)
            if x != 0:
                out[k] = x
        return dict(sorted(out.items()))

    @field_serializer("entries", when_used="json")
    def _serialize_entries(self, entries: dict[int, Fraction]):
        return [_to_wire(k, v) for k, v in entries.items()]

    @classmethod
    def _raw(cls, entries: dict[int, Fraction], space: Space) -> "TruncatedVector":
        # entries already exact, nonzero, non-negative indices
        return cls.model_construct(space=space, entries=dict(sorted(entries.items())))

    @classmethod
    def from_entries(cls, entries: dict[int, Scalar], space: Space | None = None) -> "TruncatedVector":
        return cls(space=space or Space.c0(), entries=entries)

    @classmethod
    def unit(cls, n: int, space: Space | None = None, value: Scalar = 1) -> "TruncatedVector":
        return cls(space=space or Space.c0(), entries={n: value})

    @classmethod
    def zero(cls, space: Space | None = None) -> "TruncatedVector":
        return cls(space=space or Space.c0())

    def __eq__(self, other) -> bool:
        return isinstance(other, TruncatedVector) and self.space == other.space and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((str(self.space), tuple(self.entries.items())))

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __getitem__(self, n: int) -> Fraction:
        return self.entries.get(n, Fraction(0))

    @property
    def support(self) -> list[int]:
        return list(self.entries)

    @property
    def max_index(self) -> int:
        return max(self.entries, default=-1)

    def _check_space(self, other: "TruncatedVector"):
        if self.space != other.space:
            raise PreconditionError("vectors live in different spaces", {"left": str(self.space), "right": str(other.space)})

    def __add__(self, other: "TruncatedVector") -> "TruncatedVector":
        self._check_space(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return TruncatedVector._raw(out, self.space)

    def __neg__(self) -> "TruncatedVector":
        return TruncatedVector._raw({k: -v for k, v in self.entries.items()}, self.space)

    def __sub__(self, other: "TruncatedVector") -> "TruncatedVector":
        return self + (-other)

    def scaled(self, factor: Scalar) -> "TruncatedVector":
        factor = to_fraction(factor)
        if factor == 0:
            return TruncatedVector.zero(self.space)
        return TruncatedVector._raw({k: v * factor for k, v in self.entries.items()}, self.space)

    __rmul__ = scaled


def _exact_root(s: Fraction, p: int) -> Fraction | float:
    rn = _int_root(s.numerator, p)
    rd = _int_root(s.denominator, p)
    if rn is not None and rd is not None:
        return Fraction(rn, rd)
    return float(s) ** (1 / p)


def _int_root(a: int, p: int) -> int | None:
    """The integer p-th root of a, if a is a perfect p-th power."""
    if a < 2:
        return a
    r = 1 << ((a.bit_length() + p - 1) // p)
    while True:
        s = ((p - 1) * r + a // r ** (p - 1)) // p
        if s >= r:
            break
        r = s
    return r if r**p == a else None


def norm_power(x: TruncatedVector) -> Fraction:
    """max |x_n| on c0, Σ |x_n|^p on l^p (exact)."""
    if x.space.kind == "c0":
        return max((abs(v) for v in x.entries.values()), default=Fraction(0))
    return sum((abs(v) ** x.space.p for v in x.entries.values()), Fraction(0))


def norm(x: TruncatedVector) -> Fraction | float:
    """Sup norm on c0, p-norm on l^p. Exact whenever the p-th root is rational."""
    s = norm_power(x)
    if x.space.kind == "c0" or x.space.p == 1:
        return s
    return _exact_root(s, x.space.p)


def within(x: TruncatedVector, center: TruncatedVector, radius: Scalar) -> bool:
    """Exact open-ball test ||x - center|| < radius."""
    radius = to_fraction(radius)
    d = norm_power(x - center)
    if x.space.kind == "c0" or x.space.p == 1:
        return d < radius
    return d < radius ** x.space.p


def distance(x: TruncatedVector, y: TruncatedVector) -> Fraction | float:
    return norm(x - y)


# ----------------------------------------------------------------- operators


def backward_apply(w: WeightSequence, x: TruncatedVector, m: int) -> TruncatedVector:
    """B_w^m x: entry j is (varpi_{j+m} / varpi_j) x_{j+m}."""
    if m < 0:
        raise PreconditionError("shift power must be >= 0", {"m": m})
    if m == 0:
        return x
    out = {k - m: w.ratio(k, k - m) * v for k, v in x.entries.items() if k >= m}
    return TruncatedVector._raw(out, x.space)


def forward_apply(y: TruncatedVector, n: int) -> TruncatedVector:
    """F^n y: indices move up by n. F is a right inverse of the unweighted B."""
    if n < 0:
        raise PreconditionError("shift power must be >= 0", {"n": n})
    return TruncatedVector._raw({k + n: v for k, v in y.entries.items()}, y.space)


def weighted_forward_apply(w: WeightSequence, y: TruncatedVector, n: int) -> TruncatedVector:
    """The right inverse of B_w^n: entry j+n is (varpi_j / varpi_{j+n}) y_j."""
    if n < 0:
        raise PreconditionError("shift power must be >= 0", {"n": n})
    return TruncatedVector._raw({k + n: w.ratio(k, k + n) * v for k, v in y.entries.items()}, y.space)


def conjugate_to_unweighted(w: WeightSequence, x: TruncatedVector) -> TruncatedVector:
    """x_n -> x_n / varpi_n."""
    return TruncatedVector._raw({k: v / w.check_budget(k) for k, v in x.entries.items()}, x.space)


def conjugate_from_unweighted(w: WeightSequence, x: TruncatedVector) -> TruncatedVector:
    """x_n -> x_n * varpi_n, the inverse of `conjugate_to_unweighted`."""
    return TruncatedVector._raw({k: v * w.check_budget(k) for k, v in x.entries.items()}, x.space)


def orbit_distances(w: WeightSequence, x: TruncatedVector, center: TruncatedVector, ms: Iterable[int]) -> list[Fraction | float]:
    return [distance(backward_apply(w, x, m), center) for m in ms]


def orbit_visit_set(
    w: WeightSequence,
    x: TruncatedVector,
    center: TruncatedVector,
    radius: Scalar,
    horizon: int,
) -> IndexSet:
    """
    {m <= horizon : ||B_w^m x - center|| < radius}.

    Once m exceeds the largest index of x the orbit is 0, so the tail of the visit set
    is either all of (max_index, horizon] or empty.
    """
    radius = to_fraction(radius)
    if radius <= 0:
        raise PreconditionError("radius must be > 0", {"radius": radius})
    x._check_space(center)
    last = min(horizon, x.max_index)

    def _chunk(bounds: tuple[int, int]) -> list[int]:
        lo, hi = bounds
        return [m for m in range(lo, hi + 1) if within(backward_apply(w, x, m), center, radius)]

    size = max(1, (last + 1) // max(1, HYPLAB_THREADS) + 1)
    chunks = [(lo, min(lo + size - 1, last)) for lo in range(0, last + 1, size)]
    visits = [m for part in run_parallel_exec_but_return_in_order(_chunk, chunks) for m in part]
    logging.info(f"orbit of {len(x.entries)}-term vector under {w.label!r}: {len(visits)} visits up to {last}")
    result = from_elements(visits, f"visits(m<={last})")
    if last < horizon and within(TruncatedVector.zero(x.space), center, radius):
        result = union(result, interval(last + 1, horizon))
    return result
