"""
Integer and rational helpers shared by the constructions and the estimators.

Everything here works on Python ints and `fractions.Fraction`, so indices such as
3**27 or 10**(q*q) are handled exactly.
"""
import math
from fractions import Fraction
from typing import Callable, Iterable

Q = Fraction


def ceil_div(a: int, b: int) -> int:
    """Ceiling of a / b for integers, b > 0."""
    return -((-a) // b)


def ilog(base: int, n: int) -> int:
    """
    Largest e with base**e <= n, for n >= 1.

    Example:
        >>> ilog(3, 80), ilog(3, 81)
        (3, 4)
    """
    if n < 1:
        raise ValueError(f"ilog needs n >= 1, got {n}")
    e = max(int(math.log(n, base)) - 1, 0)
    while base ** (e + 1) <= n:
        e += 1
    while base**e > n:
        e -= 1
    return e


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def threshold_exponent(base: int, bound: Fraction) -> int:
    """
    Smallest integer e >= 0 with base**e > bound.

    Used to turn "|varpi_n| > M" into an integer comparison on exponents.
    """
    bound = Q(bound)
    if bound < 1:
        return 0
    e = ilog(base, math.floor(bound))
    while Q(base) ** e <= bound:
        e += 1
    return e


def to_fraction(value) -> Fraction:
    """Exact conversion of int / str / float / Fraction to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"Cannot convert {value!r} to an exact rational")
        return Q(value)
    return Q(value)


def certified_series(
    term: Callable[[int], Fraction], start: int, ratio_bound: Callable[[int], Fraction], tol: Fraction
) -> tuple[Fraction, Fraction, int]:
    """
    Sum a nonnegative series from `start` until the remainder is certified below `tol`.

    The remainder after the last summed index J is bounded by
    term(J+1) / (1 - rho) where rho = ratio_bound(J+1) bounds term(i+1)/term(i) for all i > J.

    Args:
        term: i -> nonnegative exact term.
        start: first index.
        ratio_bound: J -> an upper bound (< 1) on every ratio term(i+1)/term(i) with i >= J.
        tol: required bound on the remainder.

    Returns:
        (partial_sum, tail_bound, last_index)
    """
    total = Q(0)
    j = start
    while True:
        total += term(j)
        rho = Q(ratio_bound(j + 1))
        if rho < 1:
            tail = term(j + 1) / (1 - rho)
            if tail < tol:
                return total, tail, j
        j += 1
        if j - start > 100_000:
            raise ArithmeticError("series tail could not be certified")


def merged_intervals(intervals: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """Sort and merge closed integer intervals, joining adjacent ones."""
    result: list[tuple[int, int]] = []
    for start, end in sorted(intervals):
        if result and start <= result[-1][1] + 1:
            if end > result[-1][1]:
                result[-1] = (result[-1][0], end)
        else:
            result.append((start, end))
    return result
