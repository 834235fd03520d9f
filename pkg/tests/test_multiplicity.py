from __future__ import annotations

from fractions import Fraction as F
from math import factorial

import pytest

from hkquadric.cover import addresses
from hkquadric.exact_arith import Poly
from hkquadric.multiplicity import (
    aggregate_matrices,
    bracket,
    build_integrals,
    build_symbolic_transitions,
    closed_form,
    ehk,
    ehk_closed,
    ehk_series,
    ehk_stationary,
    epsilon_bound,
    epsilon_H,
    integer_transition,
    interval_integral,
    left_correction,
    limit_value,
    monotonicity_scan,
    weighted_norm,
)
from hkquadric.quadric import QuadricContext, is_prime, primes_between

t = Poly.monomial(1, 1, "t")


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_symbolic_matches_integer_matrices(n):
    sts = build_symbolic_transitions(n)
    assert [s.index for s in sts] == list(range(n - 2))
    for p in primes_between(max(3, n - 1), 31):
        ctx = QuadricContext(n, p)
        for st in sts:
            h = st.matrix.evaluate(F(1, p))
            b = integer_transition(ctx, st.index)
            k = len(b)
            assert st.matrix.shape == (k, k) == (ctx.rank_dim, ctx.rank_dim)
            for i in range(k):
                row = 0
                for j in range(k):
                    assert st.matrix[i, j].degree <= n
                    assert h[i, j] * p ** n == b[i][j]
                    assert h[i, j] >= 0
                    row += h[i, j]
                assert row <= ctx.lambda0


def test_odd_zero_pattern():
    for n in (3, 5, 7):
        for st in build_symbolic_transitions(n):
            for k1 in range(n):
                if st.index >= k1:
                    assert st.matrix[k1, n + 1].is_zero()


def test_integral_examples():
    for n in (3, 5):
        ints = build_integrals(n)
        x = Poly.monomial(1, 1, "x")
        want = (x * 0 + 1 - x) ** n * F(2, factorial(n))
        a = want.antiderivative()
        upper = Poly.const(F(1, 2), "t") - t * F(n - 2, 2)
        assert ints.F[n - 1] == (a.compose(upper) - a(0)).with_var("t")
        assert ints.F[n].is_zero()
    for n in (4, 6):
        ints = build_integrals(n)
        w = t * F(n - 2, 2)
        want = ((1 - w) ** (n + 1) - w ** (n + 1)) * F(2, factorial(n + 1))
        assert ints.Ftilde[0] == want


@pytest.mark.parametrize("n", [3, 4, 5])
def test_integral_degrees_and_signs(n):
    ints = build_integrals(n)
    fam = (ints.F + ints.G) if n % 2 else ints.Ftilde
    for f in fam:
        assert f.degree <= n + 1
        for p in (5, 7, 11, 13):
            assert f(F(1, p)) >= 0


@pytest.mark.parametrize("n,p", [(3, 5), (3, 7), (3, 11), (4, 5), (4, 7), (5, 5), (5, 7), (3, 3), (4, 3)])
def test_closed_equals_stationary(n, p):
    ctx = QuadricContext(n, p)
    assert ehk_closed(ctx).value == ehk_stationary(ctx).value


def test_closed_examples():
    r = ehk_closed(QuadricContext(3, 5))
    assert r.value == F(185, 153)
    assert F(29, 24) < r.value <= F(29, 24) + F(2, 5)
    for n in (3, 4, 5):
        num, den = closed_form(n)
        assert num.degree <= (n + 1) ** (n + 3) and den.degree <= (n + 1) ** (n + 3)


def test_n3_formula_in_p():
    for p in primes_between(5, 60):
        assert ehk_closed(QuadricContext(3, p)).value == F(29 * p * p + 15, 24 * p * p + 12)


def test_series_examples():
    ctx = QuadricContext(3, 5)
    exact = ehk_closed(ctx).value
    r0 = ehk_series(ctx, 0)
    assert r0.tail_bound >= abs(exact - r0.value)
    bounds = [ehk_series(ctx, L).tail_bound for L in range(6)]
    assert all(a > b for a, b in zip(bounds, bounds[1:]))
    r = ehk_series(ctx, 40)
    assert abs(r.value - exact) <= min(r.tail_bound, F(1, 10 ** 12))


@pytest.mark.parametrize("n,p", [(6, 7), (6, 11), (7, 11)])
def test_series_matches_stationary_for_larger_n(n, p):
    ctx = QuadricContext(n, p)
    r = ehk_series(ctx, 60)
    assert abs(r.value - ehk_stationary(ctx).value) <= r.tail_bound


@pytest.mark.parametrize("n,p", [(3, 5), (4, 5), (5, 7)])
def test_interval_integrals_add_up(n, p):
    ctx = QuadricContext(n, p)
    lam2 = 2 * ctx.lambda0
    total = limit_value(n)
    if ctx.odd:
        total -= left_correction(n)(F(1, p))
    for L in range(1, 4):
        for addr in addresses(ctx, L):
            v = interval_integral(ctx, addr)
            assert min(v) >= 0
            if ctx.odd:
                total += lam2 * v[n + 1]
            else:
                total += lam2 * (v[n] if addr.branch == "M1" else v[n + 2])
        assert total == ehk_series(ctx, L).value


def test_interval_mu_component_decreasing_in_p():
    from hkquadric.cover import IntervalAddress

    vals = [interval_integral(QuadricContext(3, p), IntervalAddress("I", (0,)))[4] for p in (5, 7, 11, 13, 17)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_epsilon_examples():
    assert epsilon_H(Poly.const(3, "t")) == 1
    assert epsilon_H(t * (1 - t)) == F(1, 2)
    assert epsilon_H(Poly((), "t")) == 1
    with pytest.raises(ValueError):
        epsilon_H(t - 1)
    for n in (3, 4, 5):
        assert 0 < epsilon_bound(n) <= 1


def test_monotonicity_scan():
    primes = primes_between(5, 31)
    scan = monotonicity_scan(3, primes)
    assert scan.strictly_decreasing
    for r in scan.rows:
        assert 0 < r.excess <= F(2, r.p)
    assert scan.rows[-1].excess < scan.rows[0].excess
    with pytest.raises(ValueError):
        monotonicity_scan(3, [7, 5])


def test_bracket_helper_and_methods():
    ctx = QuadricContext(4, 7)
    for m in ("closed", "series", "stationary"):
        lo, hi = bracket(ctx, ehk(ctx, m).value)
        assert lo and hi
    with pytest.raises(ValueError):
        ehk(ctx, "other")


def test_weighted_norm_contraction():
    for n, p in [(3, 5), (4, 5), (5, 7)]:
        ctx = QuadricContext(n, p)
        mats = aggregate_matrices(n)
        m = mats["B"] if n % 2 else mats["C"]
        mv = m.evaluate(F(1, p))
        for i in range(ctx.rank_dim):
            row = [mv[i, j] for j in range(ctx.rank_dim)]
            assert weighted_norm(ctx, row) == F(n - 2, p) * ctx.rank_weights[i]
    assert is_prime(101)
