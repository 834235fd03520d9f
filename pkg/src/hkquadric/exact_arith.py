"""Exact rationals, dense univariate polynomials, small matrices and sec+tan.

Rationals are :class:`fractions.Fraction`.  Polynomials are immutable dense
coefficient tuples (index = exponent) over ``Fraction``.  Matrices are
immutable row tuples whose entries are either ``Fraction`` or :class:`Poly`;
the same code serves both rings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Iterable, Sequence, Union

Rat = Fraction
Scalar = Union[int, Fraction]

MAX_COFACTOR_SIZE = 10


def rat(x: Scalar | str) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class Poly:
    """Univariate polynomial with rational coefficients.

    ``var`` is a display tag only ('x', 't' or 'p'); arithmetic ignores it.
    The zero polynomial has degree -1.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable[Scalar] = (), var: str = "x"):
        cs = [rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self.var = var

    # constructors
    @classmethod
    def const(cls, c: Scalar, var: str = "x") -> Poly:
        return cls((c,), var)

    @classmethod
    def monomial(cls, k: int, c: Scalar = 1, var: str = "x") -> Poly:
        return cls([0] * k + [c], var)

    @classmethod
    def linear(cls, c0: Scalar, c1: Scalar, var: str = "x") -> Poly:
        """c0 + c1*var"""
        return cls((c0, c1), var)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def _lift(self, other) -> Poly:
        if isinstance(other, Poly):
            return other
        return Poly((other,), self.var)

    def __add__(self, other) -> Poly:
        o = self._lift(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly((self.coeff(k) + o.coeff(k) for k in range(n)), self.var)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly((-c for c in self.coeffs), self.var)

    def __sub__(self, other) -> Poly:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> Poly:
        return self._lift(other) - self

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            c = rat(other)
            return Poly((c * a for a in self.coeffs), self.var)
        if not self.coeffs or not other.coeffs:
            return Poly((), self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out, self.var)

    __rmul__ = __mul__

    def __truediv__(self, c: Scalar) -> Poly:
        c = rat(c)
        return Poly((a / c for a in self.coeffs), self.var)

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative power")
        out, base = Poly((1,), self.var), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly((other,)).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __call__(self, v):
        """Horner evaluation; ``v`` may be a number or another Poly (composition)."""
        acc = Fraction(0) if not isinstance(v, Poly) else Poly((), v.var)
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return acc

    def compose(self, inner: Poly) -> Poly:
        out = self(inner)
        return out if isinstance(out, Poly) else Poly((out,), inner.var)

    def shift(self, c: Scalar) -> Poly:
        """x -> x + c"""
        return self.compose(Poly.linear(c, 1, self.var))

    def derivative(self) -> Poly:
        return Poly((k * c for k, c in enumerate(self.coeffs) if k), self.var)

    def antiderivative(self) -> Poly:
        return Poly([0] + [c / (k + 1) for k, c in enumerate(self.coeffs)], self.var)

    def integrate(self, lo: Scalar, hi: Scalar) -> Fraction:
        a = self.antiderivative()
        return a(rat(hi)) - a(rat(lo))

    def with_var(self, var: str) -> Poly:
        return Poly(self.coeffs, var)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else (self.var if k == 1 else f"{self.var}^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(reversed(terms)).replace("+ -", "- ")


def poly_eval(f: Poly, v: Scalar) -> Fraction:
    """Exact value f(v)."""
    return f(rat(v))


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class Matrix:
    """Dense matrix over Fraction or Poly, stored row-major as nested tuples."""

    rows: tuple[tuple, ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> Matrix:
        rs = tuple(tuple(r) for r in rows)
        if rs and any(len(r) != len(rs[0]) for r in rs):
            raise ValueError("ragged rows")
        return cls(rs)

    @classmethod
    def identity(cls, k: int, one=Fraction(1), zero=Fraction(0)) -> Matrix:
        return cls(tuple(tuple(one if i == j else zero for j in range(k)) for i in range(k)))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def map(self, fn: Callable) -> Matrix:
        return Matrix(tuple(tuple(fn(x) for x in r) for r in self.rows))

    def transpose(self) -> Matrix:
        return Matrix(tuple(zip(*self.rows)))

    def __add__(self, other: Matrix) -> Matrix:
        return Matrix(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: Matrix) -> Matrix:
        return Matrix(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def scale(self, c) -> Matrix:
        return self.map(lambda x: x * c)

    def __matmul__(self, other: Matrix) -> Matrix:
        cols = list(zip(*other.rows))
        return Matrix(tuple(tuple(_dot(r, c) for c in cols) for r in self.rows))

    def evaluate(self, v) -> Matrix:
        """Evaluate polynomial entries at ``v``."""
        return self.map(lambda x: x(v) if isinstance(x, Poly) else x)


PolyMat = Matrix
RatMat = Matrix


def _dot(u: Sequence, v: Sequence):
    acc = None
    for a, b in zip(u, v):
        if isinstance(a, (int, Fraction)) and a == 0:
            continue
        if isinstance(b, (int, Fraction)) and b == 0:
            continue
        term = a * b
        acc = term if acc is None else acc + term
    if acc is None:
        x = u[0] if len(u) else Fraction(0)
        return Poly((), x.var) if isinstance(x, Poly) else Fraction(0)
    return acc


def vec_mat(v: Sequence, m: Matrix) -> tuple:
    """Row vector times matrix."""
    return tuple(_dot(v, col) for col in zip(*m.rows))


def _zero_like(x):
    return Poly((), x.var) if isinstance(x, Poly) else Fraction(0)


def determinant(m: Matrix):
    """Laplace expansion along rows with minors memoised by column subset.

    Division free, so it works verbatim over Q[t]; the cost is O(k·2^k)
    ring operations instead of k!.
    """
    k, k2 = m.shape
    if k != k2:
        raise ValueError("determinant of non-square matrix")
    if k == 0:
        return Fraction(1)
    if k > MAX_COFACTOR_SIZE:
        raise ValueError(f"cofactor expansion capped at size {MAX_COFACTOR_SIZE}")
    rows = m.rows
    zero = _zero_like(rows[0][0])

    @lru_cache(maxsize=None)
    def minor(cols: tuple[int, ...]):
        # determinant of rows[k-len(cols):] restricted to cols
        r = k - len(cols)
        if len(cols) == 1:
            return rows[r][cols[0]]
        acc = zero
        for idx, c in enumerate(cols):
            a = rows[r][c]
            if isinstance(a, Poly) and a.is_zero() or not isinstance(a, Poly) and a == 0:
                continue
            sub = minor(cols[:idx] + cols[idx + 1:])
            term = a * sub
            acc = acc + term if idx % 2 == 0 else acc - term
        return acc

    return minor(tuple(range(k)))


def _drop(m: Matrix, i: int, j: int) -> Matrix:
    return Matrix(tuple(tuple(x for c, x in enumerate(r) if c != j) for r_i, r in enumerate(m.rows) if r_i != i))


def cofactor_inverse(m: Matrix, check: bool = True):
    """Return ``(adj, det)`` with ``m @ adj == det * I``."""
    k, k2 = m.shape
    if k != k2:
        raise ValueError("cofactor_inverse needs a square matrix")
    det = determinant(m)
    if k == 1:
        one = Poly((1,), m.rows[0][0].var) if isinstance(m.rows[0][0], Poly) else Fraction(1)
        adj = Matrix(((one,),))
    else:
        adj = Matrix(tuple(
            tuple((determinant(_drop(m, j, i)) * (1 if (i + j) % 2 == 0 else -1)) for j in range(k))
            for i in range(k)
        ))
    if check:
        prod = m @ adj
        for i in range(k):
            for j in range(k):
                want = det if i == j else _zero_like(det)
                assert prod[i, j] == want, "adjugate identity failed"
    return adj, det


# ---------------------------------------------------------------------------
# sec + tan


@dataclass(frozen=True)
class ZigzagCoeffs:
    order: int
    m: tuple[Fraction, ...]  # m[k] for k = 0..order, m[0] = 1

    def zigzag(self, k: int) -> int:
        v = self.m[k] * factorial(k)
        assert v.denominator == 1
        return int(v)


def zigzag_numbers(order: int) -> list[int]:
    """E_0..E_order via the Seidel boustrophedon triangle."""
    out = [1]
    row = [1]
    for k in range(1, order + 1):
        nxt = [0]
        for x in reversed(row):
            nxt.append(nxt[-1] + x)
        row = nxt
        out.append(row[-1])
    return out


def sectan_coeffs(order: int) -> ZigzagCoeffs:
    if order < 1:
        raise ValueError("order must be >= 1")
    e = zigzag_numbers(order)
    return ZigzagCoeffs(order, tuple(Fraction(e[k], factorial(k)) for k in range(order + 1)))


def solve_unique(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> tuple[Fraction, ...] | None:
    """The unique solution of an over-determined consistent rational system, or None."""
    m = [list(map(rat, r)) + [rat(b)] for r, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    piv_cols = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
    if any(row[-1] != 0 for row in m[r:]):
        raise ValueError("inconsistent linear system")
    if r < ncols:
        return None
    out = [Fraction(0)] * ncols
    for i, c in enumerate(piv_cols):
        out[c] = m[i][-1]
    return tuple(out)
