"""Command-line interface: transport, estimate, bounds, verify.

Output is CSV by default (``--format json`` for JSON). CSV output starts
with ``#`` provenance lines (version, command, full config); extra tables
such as a transport plan or per-trial values follow the main table, each
introduced by a ``# table: <name>`` line.

Exit codes: 0 success, 1 invalid input or usage, 2 resource limit,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, bounds, suites
from .cube import CubePoint, DenseMeasure, EmpiricalMeasure
from .errors import InvalidInputError, ResourceError
from .montecarlo import estimate_expected_w
from .transport import DEFAULT_EXACT_CAP, verify_plan, wasserstein_exact

EXIT_OK, EXIT_INVALID, EXIT_RESOURCE, EXIT_SUITE = 0, 1, 2, 3
ESTIMATE_COLUMNS = ("n", "N", "trials", "seed", "mean", "stderr", "ci_low", "ci_high")
TRANSPORT_COLUMNS = ("n", "a", "b", "method", "w_exact", "w", "plan_size", "duality_gap", "verified")
BOUNDS_COLUMNS = ("formula", "kind", "value", "asymptotic", "params")
VERIFY_COLUMNS = ("suite", "check", "passed", "detail")


class UsageError(InvalidInputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_measure(spec: str, n: int):
    """`uniform`, `dirac:<bits>` or `empirical:<path>` (one decimal bitmask per line)."""
    if spec == "uniform":
        return DenseMeasure.uniform(n)
    kind, _, arg = spec.partition(":")
    if kind == "dirac":
        try:
            bits = int(arg, 0)
        except ValueError:
            raise InvalidInputError(f"bad dirac point {arg!r}") from None
        return DenseMeasure.dirac(CubePoint(bits, n))
    if kind == "empirical":
        path = Path(arg)
        if not path.is_file():
            raise InvalidInputError(f"empirical sample file {arg!r} not found")
        return read_empirical(path, n)
    raise InvalidInputError(f"unknown measure spec {spec!r}")


def read_empirical(path: Path, n: int) -> EmpiricalMeasure:
    bits = []
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            b = int(line)
        except ValueError:
            raise InvalidInputError(f"{path}:{lineno}: not a decimal integer: {line!r}") from None
        if not 0 <= b < (1 << n):
            raise InvalidInputError(f"{path}:{lineno}: point {b} outside the {n}-cube")
        bits.append(b)
    return EmpiricalMeasure.from_bits(n, bits)


def _fmt(x):
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (dict, list)):
        return json.dumps(x, sort_keys=True)
    return str(x)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def render(fmt: str, provenance: dict, columns, rows, extra: dict | None = None) -> str:
    extra = extra or {}
    if fmt == "json":
        doc = {"provenance": provenance, "results": [dict(zip(columns, (r[c] for c in columns))) for r in rows]}
        for name, (_, xrows) in extra.items():
            doc[name] = xrows
        return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# cubematch {provenance['version']}\n")
    buf.write(f"# config: {json.dumps(_jsonable(provenance['config']), sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    for name, (xcols, xrows) in extra.items():
        buf.write(f"# table: {name}\n")
        w.writerow(xcols)
        for r in xrows:
            w.writerow([_fmt(r[c]) for c in xcols])
    return buf.getvalue()


def _provenance(args) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    return {"version": __version__, "command": args.command, "seed": getattr(args, "seed", None), "config": config}


def cmd_transport(args) -> tuple[str, int]:
    a = parse_measure(args.a, args.n)
    b = parse_measure(args.b, args.n)
    sol = wasserstein_exact(a, b, method=args.method, max_dim=args.exact_cap)
    rep = verify_plan(sol, a, b)
    row = {"n": args.n, "a": args.a, "b": args.b, "method": sol.method, "w_exact": str(sol.exact_value),
           "w": sol.value, "plan_size": len(sol.plan), "duality_gap": rep.duality_gap,
           "verified": rep.passed}
    extra = {}
    if args.plan:
        extra["plan"] = (("source", "target", "mass"),
                         [{"source": s.bits, "target": t.bits, "mass": str(m)} for s, t, m in sol.plan])
    return render(args.format, _provenance(args), TRANSPORT_COLUMNS, [row], extra), EXIT_OK if rep.passed else EXIT_SUITE


def cmd_estimate(args) -> tuple[str, int]:
    rows, trial_rows = [], []
    for N in args.N:
        est = estimate_expected_w(args.n, N, args.trials, args.seed, threads=args.threads, cap=args.exact_cap)
        lo, hi = est.ci95
        rows.append({"n": args.n, "N": N, "trials": est.trials, "seed": est.seed, "mean": est.mean,
                     "stderr": est.stderr, "ci_low": lo, "ci_high": hi})
        if args.per_trial:
            trial_rows += [{"N": N, "trial": i, "value": float(v)} for i, v in enumerate(est.values)]
    extra = {"per_trial": (("N", "trial", "value"), trial_rows)} if args.per_trial else None
    return render(args.format, _provenance(args), ESTIMATE_COLUMNS, rows, extra), EXIT_OK


def cmd_bounds(args) -> tuple[str, int]:
    if args.n < 2:
        raise InvalidInputError("bounds need n >= 2")
    rows = bounds.all_bounds(args.n, args.N, eps=args.eps, r=args.r, delta=args.delta, t_grid=args.t,
                             lambda0=args.lambda0, diverging=args.diverging, regime=args.regime)
    return render(args.format, _provenance(args), BOUNDS_COLUMNS, rows), EXIT_OK


def cmd_verify(args) -> tuple[str, int]:
    checks = suites.run_suite(args.suite, args.n_max, args.seed)
    rows = [{"suite": c.suite, "check": c.name, "passed": c.passed, "detail": c.detail} for c in checks]
    failed = [c for c in checks if not c.passed]
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.suite:<11} {c.name:<28} {c.detail}", file=sys.stderr)
    return render(args.format, _provenance(args), VERIFY_COLUMNS, rows), EXIT_SUITE if failed else EXIT_OK


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cubematch", description="Exact Wasserstein distances and bounds on the Boolean cube.")
    p.add_argument("--version", action="version", version=f"cubematch {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True):
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", type=Path, help="write output here instead of stdout")
        sp.add_argument("--exact-cap", type=_positive_int, default=DEFAULT_EXACT_CAP, dest="exact_cap")
        if seed:
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--threads", type=_positive_int, default=1)

    t = sub.add_parser("transport", help="exact W between two measures")
    t.add_argument("--n", type=_positive_int, required=True)
    t.add_argument("--a", required=True, help="uniform | dirac:<bits> | empirical:<path>")
    t.add_argument("--b", required=True)
    t.add_argument("--method", choices=("auto", "cube", "bipartite"), default="auto")
    t.add_argument("--plan", action="store_true", help="also emit the full transport plan")
    common(t, seed=False)
    t.set_defaults(func=cmd_transport)

    e = sub.add_parser("estimate", help="Monte Carlo estimate of E[W(mu_N, mu)]")
    e.add_argument("--n", type=_positive_int, required=True)
    e.add_argument("--N", type=_positive_int, nargs="+", required=True)
    e.add_argument("--trials", type=_positive_int, required=True)
    e.add_argument("--per-trial", action="store_true", dest="per_trial")
    common(e)
    e.set_defaults(func=cmd_estimate)

    b = sub.add_parser("bounds", help="closed-form bounds and regime envelopes")
    b.add_argument("--n", type=_positive_int, required=True)
    b.add_argument("--N", type=_positive_int, required=True)
    b.add_argument("--eps", type=float)
    b.add_argument("--r", type=int)
    b.add_argument("--delta", type=float)
    b.add_argument("--t", type=float, nargs="*", default=[])
    b.add_argument("--lambda0", type=float, default=bounds.DEFAULT_LAMBDA0)
    b.add_argument("--diverging", action="store_true", help="treat c(n) as diverging (regime 5)")
    b.add_argument("--regime", type=int, choices=(2, 3, 4, 5), help="override the regime classifier")
    common(b, seed=False)
    b.set_defaults(func=cmd_bounds)

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("--suite", choices=suites.SUITES, required=True)
    v.add_argument("--n-max", type=_positive_int, default=6, dest="n_max")
    common(v)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        text, code = args.func(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
