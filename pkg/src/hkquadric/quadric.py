"""Constants of a pair (n, p), cohomology dimensions on Q_n and support ranges.

Q_n is the smooth quadric of dimension n cut out by x_0^2 + ... + x_{n+1}^2.
``L_m`` is h^0 of the line bundle O(m) and ``L~_m`` is h^0 of the spinor
bundle S(m) (rank 2^floor(n/2) for odd n; for even n S denotes the sum of the
two spinor bundles so that the rank bookkeeping stays uniform).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb, factorial

from .exact_arith import Poly


class Tier(Enum):
    BASE = "p>n-2"
    STRICT = "p>=3n-4 (odd) / p>=(3n-4)/2 (even)"
    NORM = "p>2^floor(n/2)(n-2)"


class DomainError(ValueError):
    """An input lies outside the range where a formula is asserted."""


class TierError(ValueError):
    """The prime is too small for the requested operation."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def primes_between(lo: int, hi: int) -> list[int]:
    return [p for p in range(max(lo, 2), hi + 1) if is_prime(p)]


@dataclass(frozen=True)
class QuadricContext:
    n: int
    p: int
    tiers: frozenset = field(init=False, compare=False)

    def __post_init__(self):
        n, p = self.n, self.p
        if not isinstance(n, int) or n < 3:
            raise DomainError(f"n must be an integer >= 3, got {n!r}")
        if not isinstance(p, int) or p < 3 or not is_prime(p):
            raise DomainError(f"p must be an odd prime, got {p!r}")
        if p <= n - 2:
            raise TierError(f"p = {p} must exceed n - 2 = {n - 2}")
        tiers = {Tier.BASE}
        if 2 * p >= self.strict_threshold_twice:
            tiers.add(Tier.STRICT)
        if p > self.lambda0 * (n - 2):
            tiers.add(Tier.NORM)
        object.__setattr__(self, "tiers", frozenset(tiers))

    @property
    def odd(self) -> bool:
        return self.n % 2 == 1

    @property
    def parity(self) -> str:
        return "odd" if self.odd else "even"

    @property
    def n0(self) -> int:
        return (self.n + 1) // 2 - 1

    @property
    def lambda0(self) -> int:
        return 2 ** (self.n // 2)

    @property
    def Delta(self) -> Fraction:
        return self.n0 - Fraction((self.n - 2) * (self.p - 1), 2 * self.p)

    @property
    def m0(self) -> Fraction:
        return Fraction(self.p, 2) - Fraction(self.n - 2, 2)

    @property
    def mtilde0(self) -> int:
        if self.odd:
            raise DomainError("mtilde0 is defined for even n only")
        return self.p - (self.n - 2) // 2

    @property
    def m0_int(self) -> int:
        """m0 as an integer digit offset (odd n, where p - n + 2 is even)."""
        if not self.odd:
            raise DomainError("integer m0 is used for odd n only")
        assert self.m0.denominator == 1
        return int(self.m0)

    @property
    def strict_threshold_twice(self) -> int:
        """Twice the prime bound of the strictness tier."""
        return 2 * (3 * self.n - 4) if self.odd else 3 * self.n - 4

    @property
    def rank_dim(self) -> int:
        """Length of a rank tuple: n line slots plus two or three spinor slots."""
        return self.n + 2 if self.odd else self.n + 3

    @property
    def spinor_twists(self) -> tuple[int, ...]:
        """Tracked spinor twists, in rank-tuple column order."""
        n0 = self.n0
        return (-n0 + 1, -n0) if self.odd else (-n0 + 1, -n0, -n0 - 1)

    @property
    def rank_weights(self) -> tuple[int, ...]:
        """Ranks of the summands in column order."""
        return (1,) * self.n + (self.lambda0,) * len(self.spinor_twists)

    def has_tier(self, tier: Tier) -> bool:
        return tier in self.tiers

    def require(self, tier: Tier) -> None:
        if tier not in self.tiers:
            raise TierError(f"(n, p) = ({self.n}, {self.p}) is below the tier {tier.value}")


# ---------------------------------------------------------------------------
# dimensions


def line_dim(n: int, m):
    """(2m+n)(m+n-1)...(m+1)/n!, for an integer or a Poly argument."""
    if isinstance(m, Poly):
        acc = 2 * m + n
        for j in range(1, n):
            acc = acc * (m + j)
        return acc * Fraction(1, factorial(n))
    acc = 2 * m + n
    for j in range(1, n):
        acc *= m + j
    q, r = divmod(acc, factorial(n))
    assert r == 0
    return q


def spinor_dim(n: int, m):
    """2^floor(n/2) * 2 (m+n-1)...m / n!, for an integer or a Poly argument."""
    lam = 2 ** (n // 2)
    if isinstance(m, Poly):
        acc = m * (2 * lam)
        for j in range(1, n):
            acc = acc * (m + j)
        return acc * Fraction(1, factorial(n))
    acc = 2 * lam * m
    for j in range(1, n):
        acc *= m + j
    q, r = divmod(acc, factorial(n))
    assert r == 0
    return q


def dim_line(ctx: QuadricContext, m: int) -> int:
    if m < 1 - ctx.n:
        raise DomainError(f"dim_line asked at m = {m} < 1 - n")
    return line_dim(ctx.n, m)


def dim_spinor(ctx: QuadricContext, m: int) -> int:
    if m < 1 - ctx.n:
        raise DomainError(f"dim_spinor asked at m = {m} < 1 - n")
    return spinor_dim(ctx.n, m)


def projective_difference(n: int, m: int) -> int:
    """h^0 of O(m) on P^{n+1} minus h^0 of O(m-2)."""
    return comb(m + n + 1, n + 1) - comb(m + n - 1, n + 1)


# ---------------------------------------------------------------------------
# support ranges of summands of F^s_* O(a) and F^s_* S(a)


def support_line(ctx: QuadricContext, s: int, a: int, t: int, source: str = "line") -> bool:
    """Does O(t) occur in F^s_*(O(a)) (or in F^s_*(S(a)) for a spinor source)?"""
    if s < 1:
        raise DomainError("s must be >= 1")
    q = ctx.p ** s
    d = a - t * q
    lo = 0 if source == "line" else 1
    return lo <= d <= ctx.n * (q - 1)


def support_spinor(ctx: QuadricContext, s: int, a: int, t: int, source: str = "line") -> bool:
    """Does S(t) occur in F^s_*(O(a)) (or in F^s_*(S(a)) for a spinor source)?"""
    if s < 1:
        raise DomainError("s must be >= 1")
    n, p = ctx.n, ctx.p
    q = p ** s
    base = Fraction((n - 2) * (p - 1), 2)
    ratio = Fraction(q, p)
    lo = base * ratio
    hi = (base + n - 2 + p) * ratio - n
    if source == "spinor":
        delta = 1 if s == 1 else 0
        lo = (base + 1 - delta) * ratio
        hi = (base + n - 2 + p) * ratio - n + delta
    elif source != "line":
        raise DomainError(f"unknown source kind {source!r}")
    return lo <= a - t * q <= hi
