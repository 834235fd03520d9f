"""Command line front end: density tables, multiplicities and verification runs."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from .cover import addresses, covered_measure, difficult_length, interval_bounds, locate, uncovered_measure
from .density import density_eval, f_threshold
from .exact_arith import sectan_coeffs
from .frobenius import transition_matrix
from .multiplicity import (
    build_symbolic_transitions,
    ehk,
    integer_transition,
    limit_value,
    monotonicity_scan,
)
from .oracle import DEFAULT_CAP, ResourceLimit, compare_all
from .quadric import DomainError, QuadricContext, TierError

EXIT_OK, EXIT_VERIFY, EXIT_PARAMS, EXIT_UNRESOLVED = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    p: int | None = None
    primes: list[int] | None = None
    s: int = 1
    samples: int | None = None
    points: list[Fraction] | None = None
    depth: int | None = None
    method: str = "closed"
    fmt: str = "csv"
    precision: int = 12
    cap: int = DEFAULT_CAP
    table: bool = False
    order: int = 8
    sectan: bool = False
    cover: bool = False


def fmt_rat(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def fmt_dec(x: Fraction, precision: int) -> str:
    with localcontext() as ctx:
        ctx.prec = precision + 30
        d = Decimal(x.numerator) / Decimal(x.denominator)
        return format(d.quantize(Decimal(1).scaleb(-precision)), "f")


def parse_points(text: str) -> list[Fraction]:
    return [Fraction(tok.strip()) for tok in text.split(",") if tok.strip()]


def parse_primes(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _emit(rows: list[dict], cfg: RunConfig, out) -> None:
    if not rows:
        return
    if cfg.fmt == "json":
        for r in rows:
            out.write(json.dumps(r, sort_keys=False) + "\n")
        return
    w = csv.DictWriter(out, fieldnames=list(rows[0].keys()), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)


def _ctx(cfg: RunConfig) -> QuadricContext:
    if cfg.n is None or cfg.p is None:
        raise DomainError("--n and --p are required")
    return QuadricContext(cfg.n, cfg.p)


def cmd_density(cfg: RunConfig, out=sys.stdout) -> int:
    ctx = _ctx(cfg)
    depth = cfg.depth or 32
    if cfg.points is not None:
        xs = cfg.points
    else:
        m = cfg.samples or 601
        if m < 2:
            raise DomainError("--samples must be >= 2")
        xs = [Fraction(ctx.n * k, m - 1) for k in range(m)]
    rows, unresolved = [], False
    for x in xs:
        if x < 0:
            raise DomainError("sample points must be >= 0")
        r = density_eval(ctx, x, depth)
        unresolved |= not r.exact
        if cfg.fmt == "json":
            rows.append({"x": fmt_rat(x), "f": fmt_rat(r.value), "exact": r.exact})
        else:
            rows.append({"x": fmt_dec(x, cfg.precision), "f": fmt_dec(r.value, cfg.precision),
                         "exact": "exact" if r.exact else "approx"})
    _emit(rows, cfg, out)
    return EXIT_UNRESOLVED if unresolved else EXIT_OK


def cmd_ehk(cfg: RunConfig, out=sys.stdout) -> int:
    depth = cfg.depth if cfg.depth is not None else 40
    if cfg.n is None:
        raise DomainError("--n is required")
    primes = cfg.primes if cfg.primes else ([cfg.p] if cfg.p else None)
    if not primes:
        raise DomainError("--p or --primes is required")
    for p in primes:
        QuadricContext(cfg.n, p)
    base = limit_value(cfg.n)
    rows = []
    if cfg.table:
        scan = monotonicity_scan(cfg.n, primes, cfg.method if cfg.method != "series" else "closed")
        for r in scan.rows:
            rows.append({"n": cfg.n, "p": r.p, "value": fmt_rat(r.value), "decimal": fmt_dec(r.value, cfg.precision),
                         "excess": fmt_dec(r.excess, cfg.precision),
                         "decreasing": "" if r.decreasing is None else str(r.decreasing).lower(),
                         "guaranteed_from": scan.threshold})
    else:
        for p in primes:
            res = ehk(QuadricContext(cfg.n, p), cfg.method, depth)
            rows.append({"n": cfg.n, "p": p, "method": res.method, "value": fmt_rat(res.value),
                         "decimal": fmt_dec(res.value, cfg.precision),
                         "tail_bound": "" if res.tail_bound is None else f"{float(res.tail_bound):.3e}",
                         "limit": fmt_rat(base)})
    _emit(rows, cfg, out)
    return EXIT_OK


def _verify_sectan(cfg: RunConfig, out) -> int:
    z = sectan_coeffs(cfg.order)
    out.write(",".join(str(z.zigzag(k)) for k in range(cfg.order)) + "\n")
    return EXIT_OK


def _verify_cover(cfg: RunConfig, out) -> int:
    ctx = _ctx(cfg)
    k = cfg.depth or 3
    cov, unc, tot = covered_measure(ctx, k), uncovered_measure(ctx, k), difficult_length(ctx)
    ok = cov + unc == tot
    out.write(f"covered {fmt_rat(cov)} + uncovered {fmt_rat(unc)} = {fmt_rat(cov + unc)}; "
              f"difficult range {fmt_rat(tot)}: {'exact partition identity holds' if ok else 'MISMATCH'}\n")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_verify(cfg: RunConfig, out=sys.stdout) -> int:
    if cfg.sectan:
        return _verify_sectan(cfg, out)
    if cfg.cover:
        return _verify_cover(cfg, out)
    ctx = _ctx(cfg)
    failures = 0
    for d in range(ctx.p):
        t = transition_matrix(ctx, d)
        for i, row in enumerate(t):
            want = ctx.p ** ctx.n * (1 if i < ctx.n else ctx.lambda0)
            if sum(w * x for w, x in zip(ctx.rank_weights, row)) != want:
                failures += 1
    out.write(f"rank sums: {failures} failures\n")
    bad_sym = 0
    for st in build_symbolic_transitions(ctx.n):
        h = st.matrix.evaluate(Fraction(1, ctx.p))
        b = integer_transition(ctx, st.index)
        bad_sym += sum(h[i, j] * ctx.p ** ctx.n != b[i][j] for i in range(len(b)) for j in range(len(b)))
    out.write(f"symbolic matrices: {bad_sym} mismatched entries\n")
    disc = compare_all(ctx, cfg.s, cap=cfg.cap)
    for a, want, got in disc:
        out.write(f"degree {a}: oracle {want}, engine {got}\n")
    out.write(f"{len(disc)} discrepancies\n")
    return EXIT_OK if failures + bad_sym + len(disc) == 0 else EXIT_VERIFY


def cmd_sectan(cfg: RunConfig, out=sys.stdout) -> int:
    z = sectan_coeffs(cfg.order)
    rows = [{"k": k, "zigzag": z.zigzag(k), "m": fmt_rat(z.m[k])} for k in range(1, cfg.order + 1)]
    _emit(rows, cfg, out)
    return EXIT_OK


def cmd_fthreshold(cfg: RunConfig, out=sys.stdout) -> int:
    ctx = _ctx(cfg)
    out.write(f"{f_threshold(ctx)}\n")
    return EXIT_OK


def cmd_cover(cfg: RunConfig, out=sys.stdout) -> int:
    ctx = _ctx(cfg)
    depth = cfg.depth or 2
    rows = []
    if cfg.points is not None:
        for x in cfg.points:
            loc = locate(ctx, x, depth)
            kind = type(loc).__name__.lower()
            addr = getattr(loc, "address", None)
            rows.append({"x": fmt_rat(x), "kind": kind,
                         "branch": addr.branch if addr else "",
                         "digits": " ".join(map(str, addr.digits)) if addr else "",
                         "residual": fmt_rat(loc.y) if addr else ""})
    else:
        for l in range(1, depth + 1):
            for addr in addresses(ctx, l):
                lo, hi = interval_bounds(ctx, addr)
                rows.append({"branch": addr.branch, "digits": " ".join(map(str, addr.digits)),
                             "lo": fmt_rat(lo), "hi": fmt_rat(hi),
                             "lo_decimal": fmt_dec(lo, cfg.precision), "hi_decimal": fmt_dec(hi, cfg.precision)})
    _emit(rows, cfg, out)
    return EXIT_OK


COMMANDS = {
    "density": cmd_density,
    "ehk": cmd_ehk,
    "verify": cmd_verify,
    "sectan": cmd_sectan,
    "fthreshold": cmd_fthreshold,
    "cover": cmd_cover,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hkquadric", description="Hilbert-Kunz density and multiplicity of quadrics")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--n", type=int)
        sp.add_argument("--p", type=int)
        sp.add_argument("--primes", type=parse_primes)
        sp.add_argument("--s", type=int, default=1)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--points", type=parse_points)
        sp.add_argument("--depth", type=int)
        sp.add_argument("--method", choices=["closed", "series", "stationary"], default="closed")
        sp.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
        sp.add_argument("--precision", type=int, default=12)
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
        sp.add_argument("--table", action="store_true")
        sp.add_argument("--order", type=int, default=8)
        sp.add_argument("--sectan", action="store_true")
        sp.add_argument("--cover", action="store_true")
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    try:
        return COMMANDS[cfg.command](cfg, out)
    except (DomainError, TierError, ValueError, ZeroDivisionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARAMS
    except ResourceLimit as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
