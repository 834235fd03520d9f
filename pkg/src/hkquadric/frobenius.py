"""Rank tuples of Frobenius pushforwards of line and spinor bundles on Q_n.

A rank tuple lists the multiplicities of O(0), O(-1), ..., O(-n+1) followed
by the spinor twists S(-n0+1), S(-n0) and, for even n, S(-n0-1).  The one
step (s = 1) tuple of F_*O(a) or F_*S(a) is determined by the h^0 and h^n
counts through the Z/Y recursions; iterated pushforwards are obtained by
chaining one step transition matrices along the base-p digits of a.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .exact_arith import Poly
from .quadric import (
    DomainError,
    QuadricContext,
    line_dim,
    spinor_dim,
    support_line,
    support_spinor,
)

RankTuple = tuple
TransitionMatrix = tuple  # tuple of RankTuple rows

KINDS = ("Z", "Y", "Z~", "Y~")


def _outer(n: int, spinor: bool):
    return (lambda m: spinor_dim(n, m)) if spinor else (lambda m: line_dim(n, m))


def z_values(n: int, a, q, spinor: bool = False) -> list:
    """[Z_0, Z_{-1}, ..., Z_{-n0-1}] at (a, q); a and q may be ints or Polys."""
    n0 = (n + 1) // 2 - 1
    outer = _outer(n, spinor)
    z = []
    for i in range(n0 + 2):
        v = outer(a + i * q)
        for k in range(1, i + 1):
            v = v - line_dim(n, k) * z[i - k]
        z.append(v)
    return z


def y_values(n: int, a, q, spinor: bool = False) -> dict:
    """{i: Y_{-i}} for n0+1 <= i <= n-1 at (a, q)."""
    n0 = (n + 1) // 2 - 1
    outer = _outer(n, spinor)
    shift = 1 if spinor else 0
    y: dict = {}
    for i in range(n - 1, n0, -1):
        v = outer((n - i) * q - a - n + shift)
        for k in range(1, n - i):
            v = v - line_dim(n, k) * y[i + k]
        y[i] = v
    return y


def zy_value(ctx: QuadricContext, kind: str, i: int, a: int, q: int) -> int:
    """Z_{-i}, Y_{-i} or their spinor-source versions at (a, q)."""
    if kind not in KINDS:
        raise DomainError(f"unknown kind {kind!r}")
    if not (1 - ctx.n <= a < q):
        raise DomainError(f"a = {a} outside [1-n, q)")
    spinor = kind.endswith("~")
    if kind.startswith("Z"):
        if not 0 <= i <= ctx.n0 + 1:
            raise IndexError(f"Z index {i} outside 0..{ctx.n0 + 1}")
        return _z_cached(ctx.n, a, q, spinor)[i]
    if not ctx.n0 + 1 <= i <= ctx.n - 1:
        raise IndexError(f"Y index {i} outside {ctx.n0 + 1}..{ctx.n - 1}")
    return _y_cached(ctx.n, a, q, spinor)[i]


@lru_cache(maxsize=None)
def _z_cached(n, a, q, spinor):
    return tuple(z_values(n, a, q, spinor))


@lru_cache(maxsize=None)
def _y_cached(n, a, q, spinor):
    return dict(y_values(n, a, q, spinor))


def assemble_tuple(n: int, z: list, y: dict, region: int | None) -> list:
    """One step rank tuple from Z/Y values.

    ``region`` is the column index (0, 1 or 2 among the tracked spinor twists
    -n0+1, -n0, -n0-1) of the single spinor summand present, or None.  The
    spinor multiplicity is forced by the two counts of O(-n0-1): Z_{-n0-1}
    from global sections and Y_{-n0-1} from top cohomology.
    """
    n0 = (n + 1) // 2 - 1
    lam2 = 2 * 2 ** (n // 2)
    nspin = 2 if n % 2 else 3
    d = z[n0 + 1] - y[n0 + 1]
    nu = [None] * n
    for t in range(n0):
        nu[t] = z[t]
    for t in range(n0 + 2, n):
        nu[t] = y[t]
    mu = [0] * nspin
    nu[n0] = z[n0]
    nu[n0 + 1] = y[n0 + 1]
    if region is None:
        mu_val = None
    elif region == 0:
        mu_val = -d * Fraction(1, lam2)
        nu[n0] = z[n0] + d
    elif region == 1:
        mu_val = d * Fraction(1, lam2)
    elif region == 2:
        mu_val = -d * Fraction(1, lam2)
        nu[n0 + 1] = z[n0 + 1]
    else:
        raise DomainError(f"bad spinor region {region}")
    if region is not None:
        mu[region] = mu_val
    zero = d * 0
    mu = [zero + m for m in mu]
    if region is None and not (isinstance(d, Poly) and d.is_zero() or d == 0):
        raise AssertionError("no spinor summand predicted but the Z/Y counts disagree")
    return nu + mu


def spinor_region(ctx: QuadricContext, a: int, source: str) -> int | None:
    hits = [j for j, t in enumerate(ctx.spinor_twists) if support_spinor(ctx, 1, a, t, source)]
    if len(hits) > 1:
        raise AssertionError(f"two spinor twists predicted at a = {a}")
    return hits[0] if hits else None


def _to_int_tuple(ctx: QuadricContext, vals: list, rank: int) -> RankTuple:
    out = []
    for v in vals:
        v = Fraction(v)
        if v.denominator != 1 or v < 0:
            raise AssertionError(f"non-integral or negative multiplicity {v}")
        out.append(int(v))
    total = sum(w * x for w, x in zip(ctx.rank_weights, out))
    if total != rank * ctx.p ** ctx.n:
        raise AssertionError("weighted rank sum mismatch")
    return tuple(out)


@lru_cache(maxsize=None)
def _decompose_s1(ctx: QuadricContext, a: int, source: str) -> RankTuple:
    if not (1 - ctx.n <= a < ctx.p):
        raise DomainError(f"a = {a} outside [1-n, p)")
    spinor = source == "spinor"
    z = z_values(ctx.n, a, ctx.p, spinor)
    y = y_values(ctx.n, a, ctx.p, spinor)
    vals = assemble_tuple(ctx.n, z, y, spinor_region(ctx, a, source))
    for t in range(ctx.n):
        if vals[t] and not support_line(ctx, 1, a, -t, source):
            raise AssertionError(f"O({-t}) outside its support range at a = {a}")
    return _to_int_tuple(ctx, vals, ctx.lambda0 if spinor else 1)


def decompose_line_s1(ctx: QuadricContext, a: int) -> RankTuple:
    return _decompose_s1(ctx, a, "line")


def decompose_spinor_s1(ctx: QuadricContext, a: int) -> RankTuple:
    return _decompose_s1(ctx, a, "spinor")


@lru_cache(maxsize=None)
def transition_matrix(ctx: QuadricContext, d: int) -> TransitionMatrix:
    """Row k: tuple of F_*O(d-k); then F_*S(d-n0+1), F_*S(d-n0)[, F_*S(d-n0-1)]."""
    if not 0 <= d < ctx.p:
        raise DomainError(f"digit {d} outside [0, p)")
    rows = [decompose_line_s1(ctx, d - k) for k in range(ctx.n)]
    rows += [decompose_spinor_s1(ctx, d + t) for t in ctx.spinor_twists]
    return tuple(rows)


def vec_times(v: RankTuple, m: TransitionMatrix) -> RankTuple:
    k = len(v)
    return tuple(sum(v[i] * m[i][j] for i in range(k) if v[i]) for j in range(k))


def digits(a: int, p: int, s: int) -> list[int]:
    """Base-p digits of a, least significant first, padded to length s."""
    out = []
    for _ in range(s):
        a, r = divmod(a, p)
        out.append(r)
    return out


def decompose_line(ctx: QuadricContext, a: int, s: int) -> RankTuple:
    if s < 1:
        raise DomainError("s must be >= 1")
    if not 0 <= a < ctx.p ** s:
        raise DomainError(f"a = {a} outside [0, p^s)")
    ds = digits(a, ctx.p, s)
    v = decompose_line_s1(ctx, ds[0])
    for d in ds[1:]:
        v = vec_times(v, transition_matrix(ctx, d))
    return v


def length_from_tuple(ctx: QuadricContext, v: RankTuple, i: int) -> int:
    """nu_{-i} + 2 lambda0 mu_{-i+1} of a rank tuple."""
    out = v[i] if i < ctx.n else 0
    tw = ctx.spinor_twists
    if 1 - i in tw:
        out += 2 * ctx.lambda0 * v[ctx.n + tw.index(1 - i)]
    return out


def graded_length(ctx: QuadricContext, a: int, s: int) -> int:
    """Length of the degree-a piece of R/m^[q] with q = p^s."""
    if a < 0:
        raise DomainError("a must be >= 0")
    q = ctx.p ** s
    if a >= ctx.n * q:
        return 0
    i, r = divmod(a, q)
    return length_from_tuple(ctx, decompose_line(ctx, r, s), i)


def fs_value(ctx: QuadricContext, x, s: int) -> Fraction:
    x = Fraction(x)
    if x < 0:
        raise DomainError("x must be >= 0")
    q = ctx.p ** s
    a = (x * q).numerator // (x * q).denominator
    return Fraction(graded_length(ctx, a, s), q ** ctx.n)
