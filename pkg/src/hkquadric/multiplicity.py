"""Symbolic transition matrices over Q[t], the Hilbert-Kunz multiplicity and monotonicity.

For a special digit j_i (affine in p) every entry of the one step transition
matrix is a polynomial of degree <= n in p.  Writing b(p) = sum c_m p^m, the
normalised matrix T/p^n becomes H(t) = sum c_m t^(n-m) at t = 1/p.

The multiplicity is the integral of the density.  Off the difficult range
that integral is the p-free value 1 + m_{n+1} plus a boundary correction;
on the difficult range it is a geometric series of interval integrals
row * (t H) ... (t H), summed in closed form with the adjugate of I - B(t).
A third, independent route uses the stationary vector of sum_d T(d).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil

import numpy as np

from .cover import IntervalAddress, digit_value, validate
from .density import build_gen_polys, build_limit_polys
from .exact_arith import Matrix, Poly, cofactor_inverse, sectan_coeffs, solve_unique, vec_mat
from .frobenius import assemble_tuple, spinor_region, transition_matrix, y_values, z_values
from .quadric import QuadricContext, Tier, TierError, is_prime

T = Poly.monomial(1, 1, "t")
P = Poly.monomial(1, 1, "p")


def limit_value(n: int) -> Fraction:
    """1 + m_{n+1}: the multiplicity of the p -> infinity limit."""
    return 1 + sectan_coeffs(n + 1).m[n + 1]


def special_digits(n: int) -> list[int]:
    return list(range(n - 2))


def _digit_poly(n: int, ni: int) -> Poly:
    """j_i as a polynomial in p."""
    if n % 2:
        return Poly.linear(ni - Fraction(n - 2, 2), Fraction(1, 2), "p")
    if ni <= n // 2 - 2:
        return Poly.const(ni, "p")
    return Poly.linear(n // 2 - 2 - ni, 1, "p")


def sample_prime(n: int) -> int:
    p = 4 * n + 11
    while not is_prime(p):
        p += 1
    return p


def p_to_t(b: Poly, n: int) -> Poly:
    """b(p) of degree <= n  ->  t^n b(1/t)."""
    if b.degree > n:
        raise AssertionError(f"entry of degree {b.degree} > n in p")
    return Poly([b.coeff(n - k) for k in range(n + 1)], "t")


@dataclass(frozen=True)
class SymbolicTransition:
    index: int
    matrix: Matrix  # entries Poly in t


@lru_cache(maxsize=None)
def _symbolic_transitions(n: int) -> tuple[SymbolicTransition, ...]:
    ps = sample_prime(n)
    ctx = QuadricContext(n, ps)
    out = []
    for ni in special_digits(n):
        jp = _digit_poly(n, ni)
        jnum = digit_value(ctx, ni)
        assert jp(ps) == jnum
        rows = []
        specs = [("line", -k) for k in range(n)] + [("spinor", t) for t in ctx.spinor_twists]
        for source, off in specs:
            spin = source == "spinor"
            region = spinor_region(ctx, jnum + off, source)
            a = jp + off
            z = z_values(n, a, P, spin)
            y = y_values(n, a, P, spin)
            vals = assemble_tuple(n, z, y, region)
            rows.append(tuple(p_to_t(v if isinstance(v, Poly) else Poly.const(v, "p"), n) for v in vals))
        out.append(SymbolicTransition(ni, Matrix.from_rows(rows)))
    return tuple(out)


def build_symbolic_transitions(ctx_or_n) -> tuple[SymbolicTransition, ...]:
    n = ctx_or_n.n if isinstance(ctx_or_n, QuadricContext) else int(ctx_or_n)
    return _symbolic_transitions(n)


def integer_transition(ctx: QuadricContext, ni: int) -> tuple:
    """The integer matrix at the special digit j_i."""
    return transition_matrix(ctx, digit_value(ctx, ni))


# ---------------------------------------------------------------------------
# integrals of the generating polynomials


@dataclass(frozen=True)
class IntegralPolys:
    n: int
    F: tuple[Poly, ...] | None = None
    G: tuple[Poly, ...] | None = None
    Ftilde: tuple[Poly, ...] | None = None


def _definite(f: Poly, lo: Poly, hi: Poly) -> Poly:
    a = f.antiderivative()
    return (a.compose(hi) - a.compose(lo)).with_var("t")


@lru_cache(maxsize=None)
def _integrals(n: int) -> IntegralPolys:
    gp = build_gen_polys(n)
    half_gap = T * Fraction(n - 2, 2)
    zero, one, half = Poly.const(0, "t"), Poly.const(1, "t"), Poly.const(Fraction(1, 2), "t")
    if n % 2:
        F = tuple(_definite(f, zero, half - half_gap) for f in gp.l)
        G = tuple(_definite(f, half + half_gap, one) for f in gp.r)
        return IntegralPolys(n, F=F, G=G)
    Ft = tuple(_definite(f, half_gap, one - half_gap) for f in gp.m)
    return IntegralPolys(n, Ftilde=Ft)


def build_integrals(ctx_or_n) -> IntegralPolys:
    n = ctx_or_n.n if isinstance(ctx_or_n, QuadricContext) else int(ctx_or_n)
    return _integrals(n)


@lru_cache(maxsize=None)
def left_correction(n: int) -> Poly:
    """Integral of (Z - Y)_{n0+1}(x + n0 + 1) over [1/2 - (n-2)t/2, 1/2], odd n.

    On the left half of the difficult range the limit density is Z while the
    rank vector records Y plus the spinor term, so this difference is removed.
    """
    lp = build_limit_polys(n)
    n0 = (n + 1) // 2 - 1
    gap = lp.Z[n0 + 1].shift(n0 + 1) - lp.Y[n0 + 1].shift(n0 + 1)
    half = Poly.const(Fraction(1, 2), "t")
    return _definite(gap, half - T * Fraction(n - 2, 2), half)


# ---------------------------------------------------------------------------
# aggregate matrices and the closed form


@lru_cache(maxsize=None)
def aggregate_matrices(n: int) -> dict[str, Matrix]:
    """B(t) for odd n; C(t) and C1(t) for even n (each a sum of t H)."""
    sts = _symbolic_transitions(n)
    k = sts[0].matrix.shape[0]
    zero = Matrix.from_rows([[Poly.const(0, "t")] * k for _ in range(k)])
    total, low = zero, zero
    for st in sts:
        th = st.matrix.map(lambda e: e * T)
        total = total + th
        if n % 2 == 0 and st.index <= n // 2 - 2:
            low = low + th
    return {"B": total} if n % 2 else {"C": total, "C1": low}


def _identity_poly(k: int) -> Matrix:
    return Matrix.identity(k, Poly.const(1, "t"), Poly.const(0, "t"))


@dataclass(frozen=True)
class EhkResult:
    value: Fraction
    method: str
    tail_bound: Fraction | None = None
    numerator: Poly | None = None
    denominator: Poly | None = None


@lru_cache(maxsize=None)
def closed_form(n: int) -> tuple[Poly, Poly]:
    """(numerator, denominator) in t with e_HK = numerator(1/p) / denominator(1/p)."""
    lam2 = 2 * 2 ** (n // 2)
    base = limit_value(n)
    ints = _integrals(n)
    mats = aggregate_matrices(n)
    if n % 2:
        B = mats["B"]
        k = B.shape[0]
        adj, det = cofactor_inverse(_identity_poly(k) - B)
        row = tuple(f + g for f, g in zip(ints.F, ints.G))
        u = vec_mat(vec_mat(row, B), adj)
        num = det * base + u[n + 1] * lam2 - left_correction(n) * det
        return num, det
    C, C1 = mats["C"], mats["C1"]
    k = C.shape[0]
    adj, det = cofactor_inverse(_identity_poly(k) - C)
    w = vec_mat(ints.Ftilde, adj)
    top = vec_mat(w, C - C1)
    bottom = vec_mat(w, C1)
    num = det * base + (top[n] + bottom[n + 2]) * lam2
    return num, det


def _check_prime_tier(ctx: QuadricContext) -> None:
    # every T(d)/p^n has weighted row sums 1, so ||B(1/p)|| = (n-2)/p < 1 for all p > n-2
    ctx.require(Tier.BASE)


def ehk_closed(ctx: QuadricContext) -> EhkResult:
    _check_prime_tier(ctx)
    num, den = closed_form(ctx.n)
    t = Fraction(1, ctx.p)
    d = den(t)
    if d == 0:
        raise ArithmeticError("det(I - B(1/p)) vanished")
    return EhkResult(num(t) / d, "closed", numerator=num, denominator=den)


def _eval_rows(vec, t):
    return tuple(f(t) for f in vec)


def _eval_mat(m: Matrix, t) -> list[list[Fraction]]:
    return [[e(t) for e in r] for r in m.rows]


def _vm(v, m):
    k = len(m[0])
    return tuple(sum(v[i] * m[i][c] for i in range(len(v)) if v[i]) for c in range(k))


def weighted_norm(ctx: QuadricContext, v) -> Fraction:
    return sum((abs(x) * w for x, w in zip(v, ctx.rank_weights)), Fraction(0))


def series_ratio(ctx: QuadricContext) -> Fraction:
    return Fraction(ctx.n - 2, ctx.p)


def ehk_series(ctx: QuadricContext, L: int) -> EhkResult:
    """Sum over covering intervals of depth <= L, with a certified tail bound."""
    _check_prime_tier(ctx)
    if L < 0:
        raise ValueError("L must be >= 0")
    n, t = ctx.n, Fraction(1, ctx.p)
    lam2 = 2 * ctx.lambda0
    rho = series_ratio(ctx)
    ints = _integrals(n)
    mats = aggregate_matrices(n)
    total = limit_value(n)
    if ctx.odd:
        row = tuple(f + g for f, g in zip(_eval_rows(ints.F, t), _eval_rows(ints.G, t)))
        B = _eval_mat(mats["B"], t)
        total -= left_correction(n)(t)
        v = row
        for _ in range(L):
            v = _vm(v, B)
            total += lam2 * v[n + 1]
    else:
        row = _eval_rows(ints.Ftilde, t)
        C, C1 = _eval_mat(mats["C"], t), _eval_mat(mats["C1"], t)
        C0 = [[a - b for a, b in zip(r, s)] for r, s in zip(C, C1)]
        v = row
        for _ in range(L):
            total += lam2 * (_vm(v, C0)[n] + _vm(v, C1)[n + 2])
            v = _vm(v, C)
    tail = 2 * weighted_norm(ctx, row) * rho ** (L + 1) / (1 - rho)
    return EhkResult(total, "series", tail_bound=tail)


# ---------------------------------------------------------------------------
# an independent route: the stationary vector of the summed transition matrices


def summed_transition(ctx: QuadricContext) -> list[list[int]]:
    k = ctx.rank_dim
    acc = [[0] * k for _ in range(k)]
    for d in range(ctx.p):
        t = transition_matrix(ctx, d)
        for i in range(k):
            for j in range(k):
                acc[i][j] += t[i][j]
    return acc


def length_weights(ctx: QuadricContext) -> tuple[int, ...]:
    """Weights turning a rank tuple into a total length: 1 per line, 2 lambda0 per spinor."""
    return (1,) * ctx.n + (2 * ctx.lambda0,) * len(ctx.spinor_twists)


def hk_length(ctx: QuadricContext, s: int) -> int:
    """Total length of R/m^[p^s], from the summed transition matrix."""
    A = summed_transition(ctx)
    v = A[0]
    for _ in range(s - 1):
        v = [sum(v[i] * A[i][j] for i in range(len(v))) for j in range(len(v))]
    return sum(x * w for x, w in zip(v, length_weights(ctx)))


def ehk_stationary(ctx: QuadricContext) -> EhkResult:
    """lim length(R/m^[q]) / q^(n+1) via the left Perron vector of sum_d T(d)."""
    A = summed_transition(ctx)
    k = len(A)
    lam = ctx.p ** (ctx.n + 1)
    ev = sorted(abs(np.linalg.eigvals(np.array(A, dtype=float) / lam)), reverse=True)
    if not (abs(ev[0] - 1) < 1e-9 and ev[1] < 1 - 1e-9):
        raise ArithmeticError("p^(n+1) is not a simple dominant eigenvalue")
    rows = [tuple(Fraction(A[i][c] - (lam if i == c else 0)) for i in range(k)) for c in range(k)]
    rows.append(tuple(Fraction(w) for w in ctx.rank_weights))
    pi = solve_unique(rows, [Fraction(0)] * k + [Fraction(1)])
    if pi is None:
        raise ArithmeticError("stationary vector is not unique")
    return EhkResult(sum((x * w for x, w in zip(pi, length_weights(ctx))), Fraction(0)), "stationary")


def ehk(ctx: QuadricContext, method: str = "closed", depth: int = 40) -> EhkResult:
    if method == "closed":
        return ehk_closed(ctx)
    if method == "series":
        return ehk_series(ctx, depth)
    if method == "stationary":
        return ehk_stationary(ctx)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# interval integrals


def interval_integral(ctx: QuadricContext, addr: IntervalAddress) -> tuple[Fraction, ...]:
    """Integral of the limit rank vector over an addressed interval."""
    validate(ctx, addr)
    t = Fraction(1, ctx.p)
    ints = _integrals(ctx.n)
    if ctx.odd:
        v = _eval_rows(ints.F if addr.branch == "I" else ints.G, t)
    else:
        v = _eval_rows(ints.Ftilde, t)
    sts = _symbolic_transitions(ctx.n)
    for ni in reversed(addr.digits):
        H = _eval_mat(sts[ni].matrix, t)
        v = tuple(x * t for x in _vm(v, H))
    return v


# ---------------------------------------------------------------------------
# monotonicity


def epsilon_H(h: Poly) -> Fraction:
    """Radius below which t H(t) > 0, from the lowest nonzero coefficient."""
    cs = list(h.coeffs)
    while cs and cs[0] == 0:
        cs.pop(0)
    if not cs:
        return Fraction(1)
    b0 = cs[0]
    if b0 < 0:
        raise ValueError("lowest coefficient is negative; H(1/p) < 0 for large p")
    denom = sum(((k + 1) * abs(b) for k, b in enumerate(cs) if k >= 1), Fraction(0))
    if denom == 0:
        return Fraction(1)
    return min(Fraction(1), b0 / denom)


def generating_family(n: int) -> list[Poly]:
    fam = [e for st in _symbolic_transitions(n) for r in st.matrix.rows for e in r]
    ints = _integrals(n)
    fam += list(ints.F + ints.G) if n % 2 else list(ints.Ftilde)
    return fam


def epsilon_bound(ctx_or_n) -> Fraction:
    n = ctx_or_n.n if isinstance(ctx_or_n, QuadricContext) else int(ctx_or_n)
    return min(epsilon_H(h) for h in generating_family(n))


@dataclass(frozen=True)
class ScanRow:
    p: int
    value: Fraction
    excess: Fraction
    decreasing: bool | None


@dataclass(frozen=True)
class Scan:
    n: int
    rows: tuple[ScanRow, ...]
    threshold: int  # e_HK is guaranteed decreasing from this prime on

    @property
    def strictly_decreasing(self) -> bool:
        return all(r.decreasing for r in self.rows[1:])


def monotonicity_scan(ctx_or_n, primes: list[int], method: str = "closed") -> Scan:
    n = ctx_or_n.n if isinstance(ctx_or_n, QuadricContext) else int(ctx_or_n)
    if list(primes) != sorted(primes):
        raise ValueError("primes must be ascending")
    base = limit_value(n)
    rows, prev = [], None
    for p in primes:
        val = ehk(QuadricContext(n, p), method).value
        rows.append(ScanRow(p, val, val - base, None if prev is None else val < prev))
        prev = val
    return Scan(n, tuple(rows), ceil(1 / epsilon_bound(n)))


def bracket(ctx: QuadricContext, value: Fraction) -> tuple[bool, bool]:
    """(lower strict, upper) checks of 1 + m < e <= 1 + m + (2n - 4)/p."""
    base = limit_value(ctx.n)
    return value > base, value <= base + Fraction(2 * ctx.n - 4, ctx.p)


__all__ = [
    "EhkResult", "IntegralPolys", "Scan", "ScanRow", "SymbolicTransition", "TierError",
    "aggregate_matrices", "bracket", "build_integrals", "build_symbolic_transitions",
    "closed_form", "ehk", "ehk_closed", "ehk_series", "ehk_stationary", "epsilon_H",
    "epsilon_bound", "hk_length", "integer_transition", "interval_integral",
    "limit_value", "monotonicity_scan",
]
