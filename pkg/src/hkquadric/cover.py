"""Indexed semi-open intervals covering the difficult range of [0, 1).

Odd n: the difficult range is [m0/p, (m0+n-2)/p).  A point whose leading
base-p digits are j_1, ..., j_l with j_i = n_i + m0 (n_i in 0..n-3) and whose
remaining expansion y falls left of m0/p or right of (m0+n-2)/p lies in
I_(n_1..n_l) or J_(n_1..n_l) respectively.

Even n: the difficult range is [0, (n-2)/2p) together with
[1-(n-2)/2p, 1).  Digits of the first block are j = n_i for
n_i <= n/2-2; digits of the second block are j = p + n/2 - 2 - n_i.  The
address terminates once the residual lands in the middle easy block.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Union

from .quadric import DomainError, QuadricContext

DEFAULT_DEPTH = 32
ODD_BRANCHES = ("I", "J")
EVEN_BRANCHES = ("M0", "M1")


@dataclass(frozen=True)
class IntervalAddress:
    branch: str
    digits: tuple[int, ...]

    @property
    def depth(self) -> int:
        return len(self.digits)


@dataclass(frozen=True)
class Easy:
    x: Fraction


@dataclass(frozen=True)
class Resolved:
    address: IntervalAddress
    y: Fraction


@dataclass(frozen=True)
class Unresolved:
    x: Fraction
    depth: int


Location = Union[Easy, Resolved, Unresolved]


def digit_value(ctx: QuadricContext, ni: int) -> int:
    """The base-p digit j_i attached to the index n_i."""
    n, p = ctx.n, ctx.p
    if not 0 <= ni <= n - 3:
        raise DomainError(f"digit index {ni} outside 0..{n - 3}")
    if ctx.odd:
        return ni + ctx.m0_int
    return ni if ni <= n // 2 - 2 else p + n // 2 - 2 - ni


def digit_index(ctx: QuadricContext, j: int) -> int | None:
    """Inverse of digit_value, or None when j is not a special digit."""
    n, p = ctx.n, ctx.p
    if ctx.odd:
        ni = j - ctx.m0_int
        return ni if 0 <= ni <= n - 3 else None
    if 0 <= j <= n // 2 - 2:
        return j
    if p - n // 2 + 1 <= j <= p - 1:
        return p + n // 2 - 2 - j
    return None


def even_branch(ctx: QuadricContext, first: int) -> str:
    return "M0" if first <= ctx.n // 2 - 2 else "M1"


def validate(ctx: QuadricContext, addr: IntervalAddress) -> None:
    if not addr.digits:
        raise DomainError("address needs at least one digit")
    for ni in addr.digits:
        if not 0 <= ni <= ctx.n - 3:
            raise DomainError(f"digit index {ni} outside 0..{ctx.n - 3}")
    if ctx.odd:
        if addr.branch not in ODD_BRANCHES:
            raise DomainError(f"odd n uses branches I/J, got {addr.branch}")
    elif addr.branch != even_branch(ctx, addr.digits[0]):
        raise DomainError("even-n branch must match the first digit")


def residual_easy_bounds(ctx: QuadricContext, branch: str) -> tuple[Fraction, Fraction]:
    """Range of the rescaled residual y for the given branch."""
    p, n = ctx.p, ctx.n
    if ctx.odd:
        if branch == "I":
            return Fraction(0), ctx.m0 / p
        return (ctx.m0 + n - 2) / p, Fraction(1)
    w = Fraction(n - 2, 2 * p)
    return w, 1 - w


def interval_bounds(ctx: QuadricContext, addr: IntervalAddress) -> tuple[Fraction, Fraction]:
    validate(ctx, addr)
    p = ctx.p
    base = sum(Fraction(digit_value(ctx, ni), p ** (i + 1)) for i, ni in enumerate(addr.digits))
    scale = Fraction(1, p ** addr.depth)
    lo, hi = residual_easy_bounds(ctx, addr.branch)
    return base + lo * scale, base + hi * scale


def difficult_range(ctx: QuadricContext) -> list[tuple[Fraction, Fraction]]:
    p, n = ctx.p, ctx.n
    if ctx.odd:
        return [(ctx.m0 / p, (ctx.m0 + n - 2) / p)]
    w = Fraction(n - 2, 2 * p)
    return [(Fraction(0), w), (1 - w, Fraction(1))]


def is_easy(ctx: QuadricContext, y: Fraction) -> bool:
    return not any(lo <= y < hi for lo, hi in difficult_range(ctx))


def locate(ctx: QuadricContext, x, max_depth: int = DEFAULT_DEPTH) -> Location:
    """Classify a point of [0, 1) by exact digit extraction."""
    x = Fraction(x)
    if not 0 <= x < 1:
        raise DomainError("locate expects 0 <= x < 1")
    if is_easy(ctx, x):
        return Easy(x)
    p = ctx.p
    y = x
    digits: list[int] = []
    while len(digits) < max_depth:
        py = p * y
        j = py.numerator // py.denominator
        ni = digit_index(ctx, j)
        assert ni is not None, "a difficult point must start with a special digit"
        digits.append(ni)
        y = py - j
        if is_easy(ctx, y):
            if ctx.odd:
                branch = "I" if y < ctx.m0 / p else "J"
            else:
                branch = even_branch(ctx, digits[0])
            return Resolved(IntervalAddress(branch, tuple(digits)), y)
    return Unresolved(x, max_depth)


def addresses(ctx: QuadricContext, depth: int):
    """All valid addresses of exactly the given depth."""
    for ds in product(range(ctx.n - 2), repeat=depth):
        if ctx.odd:
            for b in ODD_BRANCHES:
                yield IntervalAddress(b, ds)
        else:
            yield IntervalAddress(even_branch(ctx, ds[0]), ds)


def uncovered_measure(ctx: QuadricContext, k: int) -> Fraction:
    """Measure of the difficult range missed by all intervals of depth <= k."""
    if k < 1:
        raise DomainError("k must be >= 1")
    return Fraction(ctx.n - 2, ctx.p) ** (k + 1)


def covered_measure(ctx: QuadricContext, k: int) -> Fraction:
    """Sum of the lengths of all intervals of depth <= k, by enumeration."""
    total = Fraction(0)
    for l in range(1, k + 1):
        for addr in addresses(ctx, l):
            lo, hi = interval_bounds(ctx, addr)
            total += hi - lo
    return total


def difficult_length(ctx: QuadricContext) -> Fraction:
    return sum((hi - lo for lo, hi in difficult_range(ctx)), Fraction(0))
