from __future__ import annotations

import random
from fractions import Fraction as F
from math import factorial

import pytest

from hkquadric.cover import Easy, locate
from hkquadric.density import (
    build_gen_polys,
    build_limit_polys,
    density_eval,
    density_infty,
    density_n3,
    easy_vector,
    f_threshold,
    integral_f_infty,
    n3_constants,
    piecewise_density,
    push_through,
    rank_identities,
    rank_vector,
)
from hkquadric.exact_arith import Poly
from hkquadric.frobenius import decompose_line, fs_value, transition_matrix
from hkquadric.multiplicity import limit_value
from hkquadric.quadric import QuadricContext

x = Poly.monomial(1, 1, "x")
CTXS = [QuadricContext(n, p) for n, p in [(3, 5), (3, 7), (4, 5), (4, 7), (5, 7), (6, 5), (7, 11)]]


def test_limit_polys_n3():
    lp = build_limit_polys(3)
    assert lp.Z[0] == x ** 3 / 3
    assert lp.Z[1] == x ** 3 / 3 - (x - 1) ** 3 * F(5, 3)
    assert lp.Z[2] == x ** 3 / 3 - (x - 1) ** 3 * F(5, 3) + (x - 2) ** 3 * F(11, 3)
    assert lp.Y[2] == (3 - x) ** 3 / 3


@pytest.mark.parametrize("n", range(3, 9))
def test_limit_poly_shapes_and_reflection(n):
    lp = build_limit_polys(n)
    assert lp.Z[0] == x ** n * F(2, factorial(n))
    assert lp.Y[n - 1] == (n - x) ** n * F(2, factorial(n))
    for z in lp.Z:
        assert z.degree == n
    n0 = (n + 1) // 2 - 1
    for j in range(n0):
        assert lp.Z[j] == lp.Y[n - 1 - j].compose(n - x)


@pytest.mark.parametrize("n", range(3, 8))
def test_gen_poly_zero_patterns(n):
    gp = build_gen_polys(n)
    if n % 2:
        assert gp.l[n].is_zero() and gp.r[n + 1].is_zero()
        lp = build_limit_polys(n)
        n0 = (n - 1) // 2
        for i in range(n0 + 1):
            assert gp.l[i] == lp.Z[i].shift(i)
    else:
        assert gp.m[n].is_zero() and gp.m[n + 2].is_zero()


def test_n3_spinor_gen_poly():
    gp = build_gen_polys(3)
    lp = build_limit_polys(3)
    assert gp.l[4] == (lp.Z[2].shift(2) - lp.Y[2].shift(2)) / 4


def _easy_points(ctx, count, rng):
    out = []
    while len(out) < count:
        y = F(rng.randrange(10 ** 6), 10 ** 6)
        if isinstance(locate(ctx, y), Easy):
            out.append(y)
    return out


@pytest.mark.parametrize("ctx", CTXS, ids=lambda c: f"n{c.n}p{c.p}")
def test_generating_polys_are_self_similar(ctx):
    # v(y) = v(p y - d) T(d) / p^n whenever both y and p y - d are easy points
    rng = random.Random(ctx.n * 100 + ctx.p)
    for y in _easy_points(ctx, 40, rng):
        d = (ctx.p * y).numerator // (ctx.p * y).denominator
        z = ctx.p * y - d
        if isinstance(locate(ctx, z), Easy):
            assert easy_vector(ctx, y) == push_through(ctx, easy_vector(ctx, z), [d])


@pytest.mark.parametrize("ctx", CTXS[:5], ids=lambda c: f"n{c.n}p{c.p}")
def test_rank_vector_is_limit_of_rank_tuples(ctx):
    s = 5 if ctx.p < 7 else 4
    q = ctx.p ** s
    rng = random.Random(7)
    for _ in range(10):
        y = F(rng.randrange(10 ** 4), 10 ** 4)
        v, exact = rank_vector(ctx, y)
        t = decompose_line(ctx, (y * q).numerator // (y * q).denominator, s)
        assert exact
        for a, b in zip(v, t):
            assert abs(a - F(b, q ** ctx.n)) < F(ctx.n * 4, ctx.p ** s)


@pytest.mark.parametrize("ctx", CTXS, ids=lambda c: f"n{c.n}p{c.p}")
def test_rank_identities_and_bounds(ctx):
    rng = random.Random(11)
    for _ in range(30):
        y = F(rng.randrange(10 ** 5), 10 ** 5)
        v, exact = rank_vector(ctx, y)
        assert exact
        for coeffs, val in rank_identities(ctx, y):
            assert sum(c * a for c, a in zip(coeffs, v)) == val
        assert all(0 <= a <= 2 for a in v)


@pytest.mark.parametrize("ctx", CTXS, ids=lambda c: f"n{c.n}p{c.p}")
def test_pieces_match_evaluator(ctx):
    rng = random.Random(5)
    pw = piecewise_density(ctx)
    for pc in pw.pieces:
        assert pc.poly.degree <= ctx.n
        for _ in range(15):
            x0 = pc.lo + (pc.hi - pc.lo) * F(rng.randrange(1000), 1000)
            r = density_eval(ctx, x0)
            assert r.exact and r.value == pc.poly(x0) == pw(x0).value


def test_piece_table_n3():
    c = QuadricContext(3, 5)
    lp = build_limit_polys(3)
    pcs = piecewise_density(c).pieces
    assert [(pc.lo, pc.hi) for pc in pcs] == [(0, 1), (1, 2), (2, F(12, 5)), (F(13, 5), 3)]
    assert [pc.poly for pc in pcs] == [lp.Z[0], lp.Z[1], lp.Z[2], lp.Y[2]]


def test_density_eval_examples():
    c = QuadricContext(3, 5)
    lp = build_limit_polys(3)
    x0 = F(5, 2) - F(1, 10)
    assert density_eval(c, x0).value == lp.Z[2](x0)
    for n in (3, 4):
        ctx = QuadricContext(n, 5)
        assert density_eval(ctx, n).value == 0 and density_eval(ctx, n + F(1, 3)).value == 0
    x1 = 2 + F(12, 25)
    j1_branch = lp.Z[2](x1) + F(4, 3) * (x1 - F(5, 2) + F(1, 10)) ** 3 * n3_constants(5)["mu0"]
    assert density_eval(c, x1).value == density_n3(5, x1) == j1_branch


def test_unresolved_points_solved_from_periodicity():
    c = QuadricContext(3, 5)
    r = density_eval(c, F(5, 2))
    assert r.exact
    assert abs(r.value - fs_value(c, F(5, 2), 8)) < F(1, 10 ** 4)
    e = QuadricContext(4, 5)
    for x0 in (F(3), F(2) + F(24, 25), F(76, 25)):
        r = density_eval(e, x0)
        assert r.exact and abs(r.value - fs_value(e, x0, 7)) < F(1, 10 ** 3)


def test_approx_when_depth_too_small():
    c = QuadricContext(3, 5)
    x0 = F(5, 2) - F(1, 2 * 5 ** 6) + F(1, 10 ** 9)
    r = density_eval(c, x0, depth=3)
    assert not r.exact
    assert abs(r.value - density_eval(c, x0).value) < F(1, 100)


def test_density_infty_examples():
    lp = build_limit_polys(3)
    assert density_infty(3, F(9, 4)) == lp.Z[2](F(9, 4))
    for n in range(3, 8):
        assert density_infty(n, n) == 0
        xs = F(n - 2, 4)
        assert density_infty(n, xs) == density_infty(n, n - xs)


@pytest.mark.parametrize("n", range(3, 8))
def test_integral_of_limit_density(n):
    assert integral_f_infty(n) == limit_value(n)


def test_density_n3_examples():
    for p in (5, 7, 11):
        assert density_n3(p, F(1, 2)) == F(1, 24)
        assert density_n3(p, F(14, 5)) == F(1, 5) ** 3 / 3
        x0 = F(5, 2) - F(1, 2 * p)
        c = n3_constants(p)
        assert density_n3(p, x0) == build_limit_polys(3).Z[2](x0) + F(4, 3) * 0 ** 3 * c["mu0"]
        assert density_n3(p, x0) == density_eval(QuadricContext(3, p), x0).value


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_n3_constants_are_matrix_corners(p):
    c = QuadricContext(3, p)
    b0 = transition_matrix(c, (p - 1) // 2)
    k = n3_constants(p)
    assert (b0[0][3], b0[2][4], b0[3][3], b0[4][4]) == (k["mu0"], k["mu_1"], k["mubar0"], k["mubar_1"])


@pytest.mark.parametrize("ctx", CTXS, ids=lambda c: f"n{c.n}p{c.p}")
def test_partial_symmetry_and_threshold(ctx):
    top = F((ctx.n - 2) * (ctx.p - 1), 2 * ctx.p)
    for k in range(21):
        x0 = top * k / 20
        assert density_eval(ctx, x0).value == density_eval(ctx, ctx.n - x0).value
    assert f_threshold(ctx) == ctx.n
    assert density_eval(ctx, ctx.n - F(1, 10)).value == 2 * F(1, 10) ** ctx.n / factorial(ctx.n)
