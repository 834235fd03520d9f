"""Brute-force lengths of R/m^[q] over F_p, independent of the bundle theory.

R/m^[q] has the monomial basis x^e with every exponent below q, modulo the
image of multiplication by f = x_0^2 + ... + x_{n+1}^2.  Two methods compute
the degree-a piece:

``direct``
    the literal sparse matrix of multiplication by f from degree a-2 to
    degree a, ranked by sparse elimination mod p.

``reduced``
    the same computation split by parity.  Writing y_i = x_i^2, the algebra
    k[x_i]/(x_i^q) is free over k[y_i]/(y_i^b) on 1 (b = (q+1)/2) and x_i
    (b = (q-1)/2), and f = y_0 + ... + y_{n+1} preserves the parity class of
    the exponent vector.  In one class the cokernel of y_0 + ... in y-degree d
    equals the cokernel of (y_1 + ...)^b0 on the remaining variables, since
    y_0 can be eliminated.  Classes related by a permutation of variables
    give equal contributions, so only the count k of odd coordinates matters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .quadric import QuadricContext

DEFAULT_CAP = 200_000


class ResourceLimit(RuntimeError):
    """The monomial count exceeds the configured cap."""


# ---------------------------------------------------------------------------
# monomial bookkeeping


@lru_cache(maxsize=None)
def count_bounded(bounds: tuple[int, ...], d: int) -> int:
    """Number of exponent vectors e with 0 <= e_i < bounds[i] and |e| = d."""
    if d < 0:
        return 0
    if len(bounds) == 1:
        return 1 if d < bounds[0] else 0
    return sum(count_bounded(bounds[1:], d - e) for e in range(min(d, bounds[0] - 1) + 1))


def monomials(bounds: tuple[int, ...], d: int) -> list[tuple[int, ...]]:
    if d < 0:
        return []
    if len(bounds) == 1:
        return [(d,)] if d < bounds[0] else []
    out = []
    for e in range(min(d, bounds[0] - 1), -1, -1):
        for rest in monomials(bounds[1:], d - e):
            out.append((e,) + rest)
    return out


def monomial_count(n: int, q: int, a: int) -> int:
    """Degree-a monomials in n+2 variables with exponents below q."""
    return count_bounded((q,) * (n + 2), a)


# ---------------------------------------------------------------------------
# linear algebra mod p


@dataclass
class ModMatrix:
    """Sparse matrix over F_p stored as coordinate triples."""

    p: int
    rows: int
    cols: int
    entries: list[tuple[int, int, int]] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for i, j, v in self.entries:
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise ValueError("entry outside the matrix")
            if not 1 <= v < self.p:
                raise ValueError("entries must be nonzero residues")
            if (i, j) in seen:
                raise ValueError("duplicate coordinate")
            seen.add((i, j))

    @classmethod
    def from_dict_rows(cls, p: int, cols: int, rows: list[dict[int, int]]) -> ModMatrix:
        ents = [(i, j, v % p) for i, r in enumerate(rows) for j, v in r.items() if v % p]
        return cls(p, len(rows), cols, ents)

    def row_dicts(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [dict() for _ in range(self.rows)]
        for i, j, v in self.entries:
            out[i][j] = v
        return out

    def permute_columns(self, perm: list[int]) -> ModMatrix:
        return ModMatrix(self.p, self.rows, self.cols, [(i, perm[j], v) for i, j, v in self.entries])

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.rows, self.cols), dtype=np.int64)
        for i, j, v in self.entries:
            a[i, j] = v
        return a

    def rank(self) -> int:
        return sparse_rank(self.row_dicts(), self.p)


def sparse_rank(rows: list[dict[int, int]], p: int) -> int:
    """Rank mod p by sparse row reduction.

    Rows are processed shortest first; each reduced row picks as pivot its
    column with the fewest entries in the original matrix (a light Markowitz
    rule).  Reduction eliminates pivot columns in order of pivot creation,
    which terminates because a pivot row never contains an older pivot column.
    """
    colcount: dict[int, int] = {}
    for r in rows:
        for c in r:
            colcount[c] = colcount.get(c, 0) + 1
    pivots: dict[int, tuple[int, dict[int, int]]] = {}
    for r in sorted((r for r in rows if r), key=len):
        row = dict(r)
        while True:
            best = None
            for c in row:
                pv = pivots.get(c)
                if pv is not None and (best is None or pv[0] < best[0]):
                    best = (pv[0], c)
            if best is None:
                break
            c = best[1]
            f = row[c]
            for cc, v in pivots[c][1].items():
                nv = (row.get(cc, 0) - f * v) % p
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
        if row:
            c = min(row, key=lambda k: (colcount[k], k))
            inv = pow(row[c], p - 2, p)
            pivots[c] = (len(pivots), {k: v * inv % p for k, v in row.items()})
    return len(pivots)


def dense_rank(a: np.ndarray, p: int) -> int:
    """Rank mod p of a dense integer matrix by vectorised Gaussian elimination."""
    a = np.array(a, dtype=np.int64) % p
    nr, nc = a.shape
    r = 0
    for c in range(nc):
        if r == nr:
            break
        col = a[r:, c]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r, c:] = a[r, c:] * pow(int(a[r, c]), p - 2, p) % p
        below = r + 1 + np.flatnonzero(a[r + 1:, c])
        if below.size:
            a[below, c:] = (a[below, c:] - np.outer(a[below, c], a[r, c:])) % p
        r += 1
    return r


# ---------------------------------------------------------------------------
# the two methods


def _direct(n: int, p: int, q: int, a: int) -> int:
    nv = n + 2
    bounds = (q,) * nv
    cols = monomials(bounds, a)
    if a < 2:
        return len(cols)
    src = monomials(bounds, a - 2)
    index = {m: j for j, m in enumerate(cols)}
    rows = []
    for m in src:
        row = {}
        for i in range(nv):
            if m[i] + 2 < q:
                t = m[:i] + (m[i] + 2,) + m[i + 1:]
                row[index[t]] = 1
        rows.append(row)
    return len(cols) - sparse_rank(rows, p)


def _power_terms(bounds: tuple[int, ...], m: int, p: int) -> list[tuple[tuple[int, ...], int]]:
    """Nonzero terms of (y_1 + ... + y_k)^m mod p with exponents within bounds."""
    out = []
    fm = factorial(m)
    for e in monomials(bounds, m):
        c = fm
        for x in e:
            c //= factorial(x)
        c %= p
        if c:
            out.append((e, c))
    return out


def _block_cokernel(bounds: tuple[int, ...], d: int, p: int) -> int:
    b0, rest = bounds[0], bounds[1:]
    cols = monomials(rest, d)
    if d < b0 or not cols:
        return len(cols)
    srcs = monomials(rest, d - b0)
    if not srcs:
        return len(cols)
    index = {m: j for j, m in enumerate(cols)}
    terms = _power_terms(rest, b0, p)
    mat = np.zeros((len(srcs), len(cols)), dtype=np.int64)
    for i, u in enumerate(srcs):
        for e, c in terms:
            j = index.get(tuple(x + y for x, y in zip(u, e)))
            if j is not None:
                mat[i, j] = (mat[i, j] + c) % p
    return len(cols) - dense_rank(mat, p)


def _reduced(n: int, p: int, q: int, a: int) -> int:
    nv = n + 2
    total = 0
    for k in range(nv + 1):
        if (a - k) % 2 or a < k:
            continue
        bounds = ((q + 1) // 2,) * (nv - k) + ((q - 1) // 2,) * k
        if min(bounds) == 0:
            continue
        total += comb(nv, k) * _block_cokernel(bounds, (a - k) // 2, p)
    return total


def oracle_length(n: int, p: int, q: int, a: int, cap: int = DEFAULT_CAP, method: str = "auto") -> int:
    """Length of the degree-a piece of F_p[x_0..x_{n+1}]/(f, x_i^q)."""
    if a < 0:
        return 0
    qq = q
    while qq % p == 0:
        qq //= p
    if qq != 1:
        raise ValueError(f"q = {q} is not a power of p = {p}")
    size = monomial_count(n, q, a)
    if size > cap:
        raise ResourceLimit(f"{size} monomials in degree {a} exceed the cap {cap}")
    if method == "auto":
        method = "direct" if size <= 2000 else "reduced"
    if method == "direct":
        return _direct(n, p, q, a)
    if method == "reduced":
        return _reduced(n, p, q, a)
    raise ValueError(f"unknown method {method!r}")


def oracle_profile(n: int, p: int, q: int, cap: int = DEFAULT_CAP, method: str = "auto") -> list[int]:
    """Lengths in all degrees 0 .. n(q-1)+1 (the top degree of the box plus one)."""
    return [oracle_length(n, p, q, a, cap, method) for a in range((n + 2) * (q - 1) + 1)]


def compare_all(ctx: QuadricContext, s: int, report=None, cap: int = DEFAULT_CAP, method: str = "auto") -> list[tuple[int, int, int]]:
    """Degrees a in [0, n p^s) where the oracle and graded_length differ."""
    from .frobenius import graded_length

    q = ctx.p ** s
    bad = []
    for a in range(ctx.n * q):
        want = oracle_length(ctx.n, ctx.p, q, a, cap, method)
        got = graded_length(ctx, a, s)
        if want != got:
            bad.append((a, want, got))
            if report is not None:
                report(f"degree {a}: oracle {want}, engine {got}")
    return bad
