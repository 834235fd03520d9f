"""The Hilbert-Kunz density function of R_{p,n+1} and its p -> infinity limit.

On [0, 1) the normalised rank tuple of F^s_*O(floor(yq)) converges to a
vector of functions v(y).  On the easy region v is given by the generating
polynomials (l/r for odd n, m for even n); on the difficult range it is
obtained by peeling special base-p digits, v(y) = v(py - j) T(j) / p^n.
The density on the unit interval [i, i+1) is v_i(y) + 2 lambda0 v_sigma(y)
with sigma the spinor column of twist 1 - i, mirroring the graded length.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Union

from .cover import DEFAULT_DEPTH, Easy, Resolved, locate, residual_easy_bounds
from .exact_arith import Poly, solve_unique
from .frobenius import transition_matrix
from .quadric import DomainError, QuadricContext, line_dim

X = Poly.monomial(1, 1, "x")


@dataclass(frozen=True)
class Exact:
    value: Fraction

    exact = True


@dataclass(frozen=True)
class Approx:
    value: Fraction
    note: str

    exact = False


DensityValue = Union[Exact, Approx]


# ---------------------------------------------------------------------------
# limit polynomials


@dataclass(frozen=True)
class LimitPolys:
    n: int
    Z: tuple[Poly, ...]        # index 0..n0+1
    Y: dict                    # index n0+1..n-1
    r: tuple[dict, ...]        # r[i][j]: coefficient of L_{a+jq} in Z_{-i}
    s: dict                    # s[i][k]: coefficient of L_{kq-a-n} in Y_{-i}


def _n_of(ctx_or_n) -> int:
    return ctx_or_n.n if isinstance(ctx_or_n, QuadricContext) else int(ctx_or_n)


def _combine(acc: dict, coeffs: dict, c: int) -> None:
    for k, v in coeffs.items():
        acc[k] = acc.get(k, 0) - c * v


@lru_cache(maxsize=None)
def _limit_polys(n: int) -> LimitPolys:
    n0 = (n + 1) // 2 - 1
    r: list[dict] = []
    for i in range(n0 + 2):
        acc = {i: Fraction(1)}
        for k in range(1, i + 1):
            _combine(acc, r[i - k], line_dim(n, k))
        r.append({j: v for j, v in acc.items() if v})
    s: dict = {}
    for i in range(n - 1, n0, -1):
        acc = {n - i: Fraction(1)}
        for k in range(1, n - i):
            _combine(acc, s[i + k], line_dim(n, k))
        s[i] = {j: v for j, v in acc.items() if v}
    norm = Fraction(2, factorial(n))
    Z = tuple(
        sum(((X + (j - i)) ** n * (c * norm) for j, c in r[i].items()), Poly((), "x"))
        for i in range(n0 + 2)
    )
    Y = {
        i: sum((((i + k) - X) ** n * (c * norm) for k, c in s[i].items()), Poly((), "x"))
        for i in s
    }
    return LimitPolys(n, Z, Y, tuple(r), s)


def build_limit_polys(ctx_or_n) -> LimitPolys:
    return _limit_polys(_n_of(ctx_or_n))


# ---------------------------------------------------------------------------
# generating polynomials


@dataclass(frozen=True)
class GenPolys:
    n: int
    l: tuple[Poly, ...] | None = None
    r: tuple[Poly, ...] | None = None
    m: tuple[Poly, ...] | None = None


@lru_cache(maxsize=None)
def _gen_polys(n: int) -> GenPolys:
    lp = _limit_polys(n)
    n0 = (n + 1) // 2 - 1
    lam = 2 ** (n // 2)
    zero = Poly((), "x")

    def zs(i):
        return lp.Z[i].shift(i)

    def ys(i):
        return lp.Y[i].shift(i)

    gap = (zs(n0 + 1) - ys(n0 + 1)) / (2 * lam)
    base = [zs(i) if i <= n0 else ys(i) for i in range(n)]
    if n % 2:
        l = tuple(base + [zero, gap])
        r_ = list(base)
        r_[n0] = zs(n0) + (zs(n0 + 1) - ys(n0 + 1))
        r = tuple(r_ + [-gap, zero])
        return GenPolys(n, l=l, r=r)
    return GenPolys(n, m=tuple(base + [zero, gap, zero]))


def build_gen_polys(ctx_or_n, lp: LimitPolys | None = None) -> GenPolys:
    return _gen_polys(_n_of(ctx_or_n))


def easy_vector(ctx: QuadricContext, y: Fraction) -> tuple[Fraction, ...]:
    """Limit rank vector at an easy point y of [0, 1)."""
    gp = _gen_polys(ctx.n)
    if ctx.odd:
        polys = gp.l if y < ctx.m0 / ctx.p else gp.r
    else:
        polys = gp.m
    return tuple(f(y) for f in polys)


def _scaled_matrix(ctx: QuadricContext, j: int):
    t = transition_matrix(ctx, j)
    scale = ctx.p ** ctx.n
    return t, scale


def push_through(ctx: QuadricContext, v: tuple, digits_msf: list[int]) -> tuple:
    """v H^(j_l) ... H^(j_1) for digits listed most significant first."""
    for j in reversed(digits_msf):
        t, scale = _scaled_matrix(ctx, j)
        k = len(v)
        v = tuple(sum(v[i] * t[i][c] for i in range(k) if v[i]) / scale for c in range(k))
    return v


def rank_identities(ctx: QuadricContext, y: Fraction) -> list[tuple[tuple, Fraction]]:
    """Linear identities satisfied by v(y) for every y in [0, 1).

    They are the limits of the global-section and top-cohomology counts that
    define Z and Y: the line columns away from the middle are pure Z or Y
    values, and the middle columns combine with the spinor columns.
    """
    lp = _limit_polys(ctx.n)
    n, n0, lam2 = ctx.n, ctx.n0, 2 * ctx.lambda0
    dim = ctx.rank_dim
    col_p, col_0 = n, n + 1

    def unit(i, extra=()):
        row = [0] * dim
        row[i] = 1
        for c, w in extra:
            row[c] += w
        return tuple(row)

    out = [(unit(i), lp.Z[i](y + i)) for i in range(n0)]
    out += [(unit(i), lp.Y[i](y + i)) for i in range(n0 + 2, n)]
    out.append((unit(n0, [(col_p, lam2)]), lp.Z[n0](y + n0)))
    out.append((unit(n0 + 1, [(col_0, lam2), (col_p, -lam2)]), lp.Z[n0 + 1](y + n0 + 1)))
    if ctx.odd:
        out.append((unit(n0 + 1), lp.Y[n0 + 1](y + n0 + 1)))
    else:
        out.append((unit(n0 + 1, [(n + 2, lam2)]), lp.Y[n0 + 1](y + n0 + 1)))
    return out


def _periodic_vector(ctx: QuadricContext, w: Fraction, period: list[int]) -> tuple | None:
    """v(w) for a point w whose digit expansion repeats ``period`` forever."""
    k = ctx.rank_dim
    prod = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    for j in reversed(period):
        t, scale = _scaled_matrix(ctx, j)
        prod = [[sum(prod[i][m] * t[m][c] for m in range(k)) / scale for c in range(k)] for i in range(k)]
    rows = [tuple(Fraction(int(i == c)) - prod[i][c] for i in range(k)) for c in range(k)]
    rhs = [Fraction(0)] * k
    for coeffs, val in rank_identities(ctx, w):
        rows.append(tuple(Fraction(c) for c in coeffs))
        rhs.append(val)
    return solve_unique(rows, rhs)


def rank_vector(ctx: QuadricContext, y, depth: int = DEFAULT_DEPTH) -> tuple[tuple, bool]:
    """(v(y), exact) for y in [0, 1).

    Easy points use the generating polynomials, points of the covering are
    pushed through their digit matrices, and points whose digit expansion
    becomes periodic inside the difficult range are solved from the fixed
    point equation together with the rank identities.
    """
    from .cover import digit_value, is_easy

    y = Fraction(y)
    loc = locate(ctx, y, depth)
    if isinstance(loc, Easy):
        return easy_vector(ctx, y), True
    if isinstance(loc, Resolved):
        js = [digit_value(ctx, ni) for ni in loc.address.digits]
        return push_through(ctx, easy_vector(ctx, loc.y), js), True
    p = ctx.p
    js: list[int] = []
    seen = {y: 0}
    z = y
    while len(js) < depth:
        pz = p * z
        j = pz.numerator // pz.denominator
        js.append(j)
        z = pz - j
        assert not is_easy(ctx, z)
        if z in seen:
            start = seen[z]
            v = _periodic_vector(ctx, z, js[start:])
            if v is not None:
                return push_through(ctx, v, js[:start]), True
            break
        seen[z] = len(js)
    # no exact value: use the nearest point whose residual after depth digits is easy
    js, z = [], y
    for _ in range(depth):
        pz = p * z
        j = pz.numerator // pz.denominator
        js.append(j)
        z = pz - j
    tail = Fraction(0) if ctx.odd else Fraction(1, 2)
    return push_through(ctx, easy_vector(ctx, tail), js), False


def spinor_column(ctx: QuadricContext, twist: int) -> int | None:
    tw = ctx.spinor_twists
    return ctx.n + tw.index(twist) if twist in tw else None


def value_from_vector(ctx: QuadricContext, v: tuple, i: int) -> Fraction:
    out = v[i] if i < ctx.n else Fraction(0)
    col = spinor_column(ctx, 1 - i)
    if col is not None:
        out += 2 * ctx.lambda0 * v[col]
    return out


def density_eval(ctx: QuadricContext, x, depth: int = DEFAULT_DEPTH) -> DensityValue:
    x = Fraction(x)
    if x < 0:
        raise DomainError("x must be >= 0")
    if x >= ctx.n:
        return Exact(Fraction(0))
    i = x.numerator // x.denominator
    y = x - i
    v, exact = rank_vector(ctx, y, depth)
    val = value_from_vector(ctx, v, i)
    if exact:
        return Exact(val)
    return Approx(val, f"unresolved within depth {depth}; value at a point within p^-{depth}")


# ---------------------------------------------------------------------------
# easy-range pieces


@dataclass(frozen=True)
class Piece:
    lo: Fraction
    hi: Fraction
    poly: Poly


@dataclass(frozen=True)
class PiecewiseDensity:
    ctx: QuadricContext
    pieces: tuple[Piece, ...]

    def __call__(self, x, depth: int = DEFAULT_DEPTH) -> DensityValue:
        x = Fraction(x)
        for pc in self.pieces:
            if pc.lo <= x < pc.hi:
                return Exact(pc.poly(x))
        return density_eval(self.ctx, x, depth)


def piecewise_density(ctx: QuadricContext) -> PiecewiseDensity:
    """Polynomial pieces of f on [0, n) minus the shifted difficult range.

    Outside the unit(s) carrying the difficult range the spinor correction
    vanishes identically, so each such unit is a single polynomial piece.
    """
    gp = _gen_polys(ctx.n)
    lam2 = 2 * ctx.lambda0

    def unit_poly(polys, i):
        col = spinor_column(ctx, 1 - i)
        f = polys[i] + (polys[col] * lam2 if col is not None else 0)
        return f.shift(-i)

    pieces = []
    n0 = ctx.n0
    if ctx.odd:
        left_hi = ctx.m0 / ctx.p
        right_lo = residual_easy_bounds(ctx, "J")[0]
        for i in range(ctx.n):
            fl, fr = unit_poly(gp.l, i), unit_poly(gp.r, i)
            if i == n0 + 1:
                pieces.append(Piece(i + Fraction(0), i + left_hi, fl))
                pieces.append(Piece(i + right_lo, Fraction(i + 1), fr))
            else:
                assert fl == fr
                pieces.append(Piece(Fraction(i), Fraction(i + 1), fl))
    else:
        w = Fraction(ctx.n - 2, 2 * ctx.p)
        for i in range(ctx.n):
            f = unit_poly(gp.m, i)
            lo = i + w if i == n0 + 2 else Fraction(i)
            hi = i + 1 - w if i == n0 + 1 else Fraction(i + 1)
            pieces.append(Piece(lo, hi, f))
    return PiecewiseDensity(ctx, tuple(pieces))


# ---------------------------------------------------------------------------
# the p -> infinity limit


@lru_cache(maxsize=None)
def infty_pieces(n: int) -> tuple[Piece, ...]:
    lp = _limit_polys(n)
    n0 = (n + 1) // 2 - 1
    out = []
    for i in range(n):
        lo, hi = Fraction(i), Fraction(i + 1)
        if n % 2 and i == n0 + 1:
            mid = Fraction(2 * i + 1, 2)
            out.append(Piece(lo, mid, lp.Z[i]))
            out.append(Piece(mid, hi, lp.Y[i]))
        elif i <= n0 or (n % 2 == 0 and i == n0 + 1):
            out.append(Piece(lo, hi, lp.Z[i]))
        else:
            out.append(Piece(lo, hi, lp.Y[i]))
    return tuple(out)


def density_infty(ctx_or_n, x) -> Fraction:
    x = Fraction(x)
    for pc in infty_pieces(_n_of(ctx_or_n)):
        if pc.lo <= x < pc.hi:
            return pc.poly(x)
    return Fraction(0)


def integral_f_infty(ctx_or_n) -> Fraction:
    """Exact integral of the limit density over [0, n]."""
    return sum((pc.poly.integrate(pc.lo, pc.hi) for pc in infty_pieces(_n_of(ctx_or_n))), Fraction(0))


# ---------------------------------------------------------------------------
# n = 3 in closed form


def n3_constants(p: int) -> dict[str, int]:
    """The spinor multiplicities mu0, mu_{-1}, mubar0, mubar_{-1} at the digit (p-1)/2."""
    L = lambda m: line_dim(3, m)  # noqa: E731
    Lt = lambda m: 4 * m * (m + 1) * (m + 2) // 6  # noqa: E731
    L1, L2 = L(1), L(2)
    c = L1 * L1 - L2
    vals = {
        "mu0": L((p - 5) // 2) - L((5 * p - 1) // 2) + L1 * L((3 * p - 1) // 2) - c * L((p - 1) // 2),
        "mu_1": L((5 * p - 5) // 2) - L1 * L((3 * p - 5) // 2) + c * L((p - 5) // 2) - L((p - 1) // 2),
        "mubar0": Lt((p - 3) // 2) - Lt((5 * p - 1) // 2) + L1 * Lt((3 * p - 1) // 2) - c * Lt((p - 1) // 2),
        "mubar_1": Lt((5 * p - 3) // 2) - L1 * Lt((3 * p - 3) // 2) + c * Lt((p - 3) // 2) - Lt((p - 1) // 2),
    }
    out = {}
    for k, v in vals.items():
        assert v % 4 == 0 and v > 0
        out[k] = v // 4
    return out


def density_n3(p: int, x) -> Fraction:
    """Closed-form density of R_{p,4} (n = 3); the centre point 5/2 is excluded."""
    if p < 5:
        raise DomainError("density_n3 needs p >= 5")
    x = Fraction(x)
    if x < 0:
        raise DomainError("x must be >= 0")
    half = Fraction(5, 2)
    z2 = x ** 3 / 3 - Fraction(5, 3) * (x - 1) ** 3 + Fraction(11, 3) * (x - 2) ** 3
    if x < 1:
        return x ** 3 / 3
    if x < 2:
        return x ** 3 / 3 - Fraction(5, 3) * (x - 1) ** 3
    if x >= 3:
        return Fraction(0)
    eps = Fraction(1, 2 * p)
    if x < half - eps:
        return z2
    if x >= half + eps:
        return (3 - x) ** 3 / 3
    if x == half:
        raise DomainError("the point 5/2 is not covered by the closed form")
    c = n3_constants(p)
    j = 1
    if x < half:
        while not (half - Fraction(1, 2 * p ** j) <= x < half - Fraction(1, 2 * p ** (j + 1))):
            j += 1
        tot = sum((x - half + Fraction(1, 2 * p ** i)) ** 3 * c["mu0"] * c["mubar0"] ** (i - 1) for i in range(1, j + 1))
        return z2 + Fraction(4, 3) * tot
    while not (half + Fraction(1, 2 * p ** (j + 1)) <= x < half + Fraction(1, 2 * p ** j)):
        j += 1
    tot = sum((half + Fraction(1, 2 * p ** i) - x) ** 3 * c["mu_1"] * c["mubar_1"] ** (i - 1) for i in range(1, j + 1))
    return (3 - x) ** 3 / 3 + Fraction(4, 3) * tot


# ---------------------------------------------------------------------------
# F-threshold


def f_threshold(ctx: QuadricContext, probe: Fraction = Fraction(1, 10)) -> Fraction:
    """Right end of the support of f, checked at n - probe and n."""
    n = ctx.n
    below = density_eval(ctx, n - probe).value
    at = density_eval(ctx, n).value
    if not (below > 0 and at == 0):
        raise AssertionError("density does not vanish exactly from n on")
    return Fraction(n)
