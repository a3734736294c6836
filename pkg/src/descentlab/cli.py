"""Command-line front end: ``descentlab {dpoly,verify,sample,report}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import mpmath

from . import asymptotics as asy
from .combinat import CycleType, class_size, necklace_bound_violations, partitions_of
from .descent import (
    SeriesTruncationError,
    descent_polynomial,
    fulman_expansion_residual,
    series_inside,
    series_outside,
)
from .oracle import (
    MAX_ENUMERATION_DEGREE,
    DescentDistribution,
    SizeGuardError,
    brute_descent_polynomial,
    empirical_histogram,
    worker_count,
)
from .poly import DEFAULT_PRECISION, Polynomial


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    lambdas: list[str] = field(default_factory=list)
    family: str | None = None
    ns: list[int] = field(default_factory=list)
    s_grid: list[str] = field(default_factory=list)
    samples: int = 0
    seed: int = 0
    tol: float = 1e-12
    precision: int = DEFAULT_PRECISION
    fmt: str = "json"
    out: str | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.precision < 64:
            raise UsageError("--precision must be at least 64")
        if self.samples < 0:
            raise UsageError("--samples must be nonnegative")


# -- families -------------------------------------------------------------


def family_member(family: str, n: int) -> CycleType | None:
    """Class of degree ``n`` in a named family, or None if ``n`` does not fit.

    ``fpf-involutions`` is ``2^(n/2)``; ``alpha=p/q`` has ``alpha n`` fixed
    points and 2-cycles elsewhere; ``identity`` and ``n-cycle`` are what
    they say.
    """
    if family == "fpf-involutions":
        return CycleType.from_multiplicities({2: n // 2}) if n % 2 == 0 and n else None
    if family == "identity":
        return CycleType.identity(n)
    if family == "n-cycle":
        return CycleType.from_parts([n])
    if family.startswith("alpha="):
        try:
            alpha = Fraction(family.split("=", 1)[1])
        except ValueError:
            raise UsageError(f"bad family {family!r}") from None
        if not 0 <= alpha <= 1:
            raise UsageError("alpha must lie in [0, 1]")
        m1 = alpha * n
        if m1.denominator != 1 or (n - int(m1)) % 2:
            return None
        return CycleType.from_multiplicities({1: int(m1), 2: (n - int(m1)) // 2})
    raise UsageError(f"unknown family {family!r}")


def resolve_classes(cfg: RunConfig) -> list[CycleType]:
    if cfg.lambdas:
        return [CycleType.parse(text) for text in cfg.lambdas]
    if not cfg.family:
        raise UsageError("report needs --family or --lambda")
    found = [family_member(cfg.family, n) for n in cfg.ns]
    classes = [lam for lam in found if lam is not None]
    if not classes:
        raise UsageError(f"no member of {cfg.family!r} in the requested n range")
    return classes


# -- output -----------------------------------------------------------------


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands ---------------------------------------------------------------


def cmd_dpoly(cfg: RunConfig) -> int:
    rows = [descent_polynomial(CycleType.parse(text)).to_json() for text in cfg.lambdas]
    if cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["lambda", "n", "k", "count"])
        for row in rows:
            for k, c in enumerate(row["coeffs"]):
                writer.writerow([row["lambda"], row["n"], k, c])
        emit(buf.getvalue(), cfg.out)
    else:
        emit(dump_json(rows[0] if len(rows) == 1 else rows), cfg.out)
    return 0


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


def run_checks(nmax: int, inject_fault: str | None = None, tol: float = 1e-9) -> list[Check]:
    """The exact verification suite for all classes of degree ``<= nmax``."""
    if not 1 <= nmax <= MAX_ENUMERATION_DEGREE:
        raise SizeGuardError(f"--nmax must be in 1..{MAX_ENUMERATION_DEGREE}")
    fault = CycleType.parse(inject_fault) if inject_fault else None
    checks = []

    mismatched = []
    for n in range(1, nmax + 1):
        for lam in partitions_of(n):
            formula = descent_polynomial(lam).canonical
            if lam == fault:
                formula = formula + Polynomial.constant(1)
            if formula != brute_descent_polynomial(lam).canonical:
                mismatched.append(str(lam))
    checks.append(Check("formula_vs_brute_force", not mismatched,
                        "mismatch for lambda " + "; ".join(mismatched) if mismatched else ""))

    bad_sizes = [n for n in range(1, nmax + 1)
                 if sum(class_size(lam) for lam in partitions_of(n)) != factorial(n)]
    checks.append(Check("class_sizes_sum_to_factorial", not bad_sizes,
                        f"n = {bad_sizes}" if bad_sizes else ""))

    bad = necklace_bound_violations(40, 60)
    checks.append(Check("necklace_identities_and_bounds", not bad,
                        f"{len(bad)} violations, first {bad[:3]}" if bad else ""))

    low = []
    for n in range(3, nmax + 1):
        for lam in partitions_of(n):
            _, order = fulman_expansion_residual(lam)
            if order < 3:
                low.append(f"{lam} (order {order})")
    checks.append(Check("expansion_residual_order", not low, "; ".join(low)))

    off = []
    with mpmath.workprec(DEFAULT_PRECISION):
        for n in range(1, nmax + 1):
            for lam in partitions_of(n):
                series = descent_polynomial(lam).series
                for t in (Fraction(1, 2), Fraction(-1, 2)):
                    try:
                        got = series_inside(lam, t, tol=tol / 10).value
                    except SeriesTruncationError:
                        off.append(f"{lam} t={t} (truncated)")
                        continue
                    if abs(got - series.eval_mp(t)) > tol:
                        off.append(f"{lam} t={t}")
                for t in (2, -2):
                    want = series.eval_mp(t)
                    try:
                        got = series_outside(lam, t, tol=tol * max(1, abs(float(want))) / 10).value
                    except SeriesTruncationError:
                        off.append(f"{lam} t={t} (truncated)")
                        continue
                    if abs(got - want) > tol * max(1, abs(want)):
                        off.append(f"{lam} t={t}")
    checks.append(Check("series_vs_polynomial", not off, "; ".join(off)))
    return checks


def cmd_verify(cfg: RunConfig, nmax: int, inject_fault: str | None) -> int:
    checks = run_checks(nmax, inject_fault, tol=max(cfg.tol, 1e-9))
    if cfg.fmt == "json":
        emit(dump_json({
            "command": "verify",
            "nmax": nmax,
            "seed": cfg.seed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
        }), cfg.out)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["check", "status", "detail"])
        for c in checks:
            writer.writerow([c.name, "PASS" if c.passed else "FAIL", c.detail])
        emit(buf.getvalue(), cfg.out)
    return 0 if all(c.passed for c in checks) else 1


def cmd_sample(cfg: RunConfig) -> int:
    if len(cfg.lambdas) != 1:
        raise UsageError("sample needs exactly one --lambda")
    if cfg.samples < 1:
        raise UsageError("sample needs --samples >= 1")
    hist = empirical_histogram(CycleType.parse(cfg.lambdas[0]), cfg.samples, cfg.seed)
    emit(hist.to_csv() if cfg.fmt == "csv" else dump_json(hist.to_json()), cfg.out)
    return 0


def report_row(lam: CycleType, s_grid: list[str], samples: int, seed: int,
               precision: int) -> dict:
    dp = descent_polynomial(lam)
    moments = asy.exact_moments(lam, dp=dp)
    mgf = asy.residual_report(lam, s_grid, precision, dp=dp)
    try:
        ks = asy.fmt(asy.ks_distance(lam, dp=dp))
    except asy.DegenerateClassError as exc:
        ks = {"error": "degenerate-class", "detail": str(exc)}
    row = {
        "lambda": str(lam),
        "n": lam.n,
        "alpha": f"{lam.fixed_points}/{lam.n}",
        "class_size": str(dp.class_size),
        "moments": moments.to_json(),
        "mgf": mgf.to_json()["rows"],
        "ks": ks,
    }
    if samples:
        hist = empirical_histogram(lam, samples, seed)
        exact = DescentDistribution.from_polynomial(dp).probabilities()
        emp = hist.probabilities()
        gap = max(abs(float(emp.get(k, 0) - exact.get(k, 0))) for k in range(lam.n))
        row["empirical"] = {
            "samples": str(samples),
            "mean": asy.fmt(float(hist.mean())),
            "var": asy.fmt(float(hist.variance())),
            "max_prob_gap": asy.fmt(gap),
        }
    return row


def _report_job(args):
    text, s_grid, samples, seed, precision = args
    return report_row(CycleType.parse(text), s_grid, samples, seed, precision)


def cmd_report(cfg: RunConfig) -> int:
    classes = resolve_classes(cfg)
    try:
        s_grid = sorted(cfg.s_grid or ["-1", "-0.5", "0", "0.5", "1"], key=float)
    except ValueError:
        raise UsageError(f"bad --s value in {cfg.s_grid}") from None
    jobs = [(str(lam), s_grid, cfg.samples, cfg.seed, cfg.precision)
            for lam in sorted(classes, key=lambda c: (c.n, c.parts))]
    workers = worker_count()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_report_job, jobs))
    else:
        rows = [_report_job(job) for job in jobs]
    if cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["lambda", "n", "alpha", "s", "exact", "target", "residual", "scaled",
                         "exact_mean", "exact_var", "asym_mean", "asym_var", "ks", "seed"])
        for row in rows:
            ks = row["ks"] if isinstance(row["ks"], str) else ""
            m = row["moments"]
            for r in row["mgf"]:
                writer.writerow([row["lambda"], row["n"], row["alpha"], r["s"], r["exact"],
                                 r["target"], r["residual"], r["scaled"] or "",
                                 m["exact_mean"], m["exact_var"], m["asym_mean"],
                                 m["asym_var"], ks, cfg.seed])
        emit(buf.getvalue(), cfg.out)
    else:
        emit(dump_json({
            "command": "report",
            "family": cfg.family,
            "seed": cfg.seed,
            "samples": cfg.samples,
            "precision": cfg.precision,
            "s_grid": s_grid,
            "rows": rows,
        }), cfg.out)
    degenerate = [row["lambda"] for row in rows if not isinstance(row["ks"], str)]
    if degenerate:
        print(f"descentlab: degenerate class for KS: {', '.join(degenerate)}", file=sys.stderr)
        return 1
    return 0


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-12)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", default=None)

    parser = argparse.ArgumentParser(prog="descentlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dpoly", parents=[common], help="exact descent polynomial of a class")
    p.add_argument("--lambda", dest="lambdas", action="append", required=True)

    p = sub.add_parser("verify", parents=[common], help="run the exact oracle suite")
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--inject-fault", default=None, help=argparse.SUPPRESS)

    p = sub.add_parser("sample", parents=[common], help="Monte-Carlo descent histogram")
    p.add_argument("--lambda", dest="lambdas", action="append", required=True)
    p.add_argument("--samples", type=int, default=10000)

    p = sub.add_parser("report", parents=[common], help="moments, MGF residuals and KS")
    p.add_argument("--lambda", dest="lambdas", action="append", default=[])
    p.add_argument("--family", default=None)
    p.add_argument("--nmin", type=int, default=None)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--n", dest="ns", type=int, action="append", default=[])
    p.add_argument("--s", dest="s_grid", action="append", default=[])
    p.add_argument("--samples", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ns = list(getattr(args, "ns", []))
        if args.command == "report" and (args.nmin is not None or args.nmax is not None):
            if args.nmin is None or args.nmax is None:
                raise UsageError("--nmin and --nmax go together")
            ns += range(args.nmin, args.nmax + 1)
        cfg = RunConfig(
            command=args.command,
            lambdas=list(getattr(args, "lambdas", [])),
            family=getattr(args, "family", None),
            ns=sorted(set(ns)),
            s_grid=list(getattr(args, "s_grid", [])),
            samples=getattr(args, "samples", 0),
            seed=args.seed,
            tol=args.tol,
            precision=args.precision,
            fmt=args.format,
            out=args.out,
        )
        if cfg.command == "dpoly":
            return cmd_dpoly(cfg)
        if cfg.command == "verify":
            return cmd_verify(cfg, args.nmax, args.inject_fault)
        if cfg.command == "sample":
            return cmd_sample(cfg)
        return cmd_report(cfg)
    except (ValueError, ArithmeticError) as exc:
        print(f"descentlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
