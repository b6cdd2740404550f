"""Command-line front end.

Subcommands: ``enumerate``, ``bounds``, ``invariants``, ``hilbert``,
``verify`` and ``catalog``. Data goes to stdout and diagnostics to stderr.
Output is deterministic for a fixed argv and seed.

Exit codes: 0 success, 1 check failure, 2 data error, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .catalog import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    CatalogDataError,
    builtin_entries,
    get_entry,
    verify_all,
)
from .enumerate import (
    all_cases_table,
    classify_r1,
    classify_r2,
    classify_r3,
    classify_r4_all,
    delta2_d_values,
    delta2_even_d_table,
    impossible_values,
)
from .exactmath import default_prime
from .hilbert import bounds_report, castelnuovo_pi0, ciliberto_theta, fano_bound
from .invariants import (
    Consistent,
    blowup_selfintersection,
    chern_from_invariants,
    general_profile,
    invariant_residuals,
    liftability_witness,
)
from .poly import PolySyntaxError, ideal_hilbert_function, parse_poly, quotient_hilbert_function

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_DATA = 2
EXIT_USAGE = 64

TABLES = ("delta2-even", "delta2-dvalues", "4x4", "xi", "r1", "r2", "r3", "r4")
FORMATS = ("json", "csv", "md")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------- rendering

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n"


def render_table(columns: Sequence[str], rows: Sequence[Sequence], fmt: str,
                 header: Optional[dict] = None, meta: Optional[dict] = None) -> str:
    """Render a table as JSON (``rows`` as arrays), CSV or Markdown.

    ``header`` lines are emitted as ``# key: value`` comments for CSV and
    Markdown, and merged into the JSON object.
    """
    header = header or {}
    if fmt == "json":
        obj = dict(meta or {})
        obj.update(header)
        obj["columns"] = list(columns)
        obj["rows"] = [list(r) for r in rows]
        return dumps(obj)
    lines = [f"# {k}: {_cell(v)}" for k, v in header.items()]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(v) for v in r])
        return "".join(l + "\n" for l in lines) + buf.getvalue()
    out = lines + ["| " + " | ".join(columns) + " |",
                   "|" + "|".join("---" for _ in columns) + "|"]
    out += ["| " + " | ".join(_cell(v) for v in r) + " |" for r in rows]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- tables

_CASE_COLUMNS = ("r", "n", "a", "lambda", "g", "chi", "d", "Delta", "delta", "c_S",
                 "structure", "status", "reason")


def _case_rows(rows, include_excluded: bool):
    out = []
    for row in rows:
        if not include_excluded and not row.admissible:
            continue
        p = row.profile
        out.append([p.r, p.n, p.a, p.lam, p.g, p.chi, p.d, p.Delta, p.delta, p.c_S,
                    row.structure, row.status, row.reason])
    return out


def build_table(name: str, include_excluded: bool = False, assume_egh: bool = False,
                n_max: int = 60, count: int = 20):
    """(columns, rows) for one of the reproducible tables."""
    if name == "delta2-even":
        return (["d", "n", "r", "r_prime", "delta"],
                [list(t) for t in delta2_even_d_table(4)])
    if name == "delta2-dvalues":
        rows = []
        for n in range(1, n_max + 1):
            vals = delta2_d_values(n)
            rows.append([n, ",".join(f"{d}*" if flag else str(d) for d, flag in vals)])
        return ["n", "d"], rows
    if name == "4x4":
        rows = []
        for row in all_cases_table(4, 4, include_excluded=include_excluded):
            p = row.profile
            rows.append([p.Delta, p.d, p.n, p.r, p.delta, p.c_B])
        return ["Delta", "d", "n", "r", "delta", "c_B"], rows
    if name == "xi":
        return (["Delta", "n"],
                [[D, impossible_values(D, count=count)] for D in range(2, 12)])
    if name in ("r1", "r2", "r3"):
        fn = {"r1": classify_r1, "r2": classify_r2, "r3": classify_r3}[name]
        return list(_CASE_COLUMNS), _case_rows(fn(), include_excluded)
    if name == "r4":
        rows = []
        for c in classify_r4_all(assume_egh=assume_egh):
            if not include_excluded and c.status != "Admissible":
                continue
            rows.append([c.a, c.lambda_min, c.lambda_max, c.g, c.g_max, c.chi,
                         c.chi_formula, c.status, c.reason])
        return (["a", "lambda_min", "lambda_max", "g", "g_max", "chi", "chi_formula",
                 "status", "reason"], rows)
    raise UsageError(f"unknown table {name!r}")


# ---------------------------------------------------------------- commands

def _range(text: str) -> tuple[int, int]:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise UsageError(f"expected a range A..B, got {text!r}")
    if lo > hi:
        raise UsageError(f"empty range {text!r}")
    return lo, hi


def cmd_enumerate(args, out) -> int:
    cols, rows = build_table(args.table, args.all, args.assume_egh)
    out.write(render_table(cols, rows, args.format, meta={"command": "enumerate",
                                                          "table": args.table}))
    return EXIT_OK


def _safe(fn, *a):
    try:
        return fn(*a)
    except ValueError:
        return None


def cmd_bounds(args, out) -> int:
    if args.curve:
        if args.lambda_range is None:
            raise UsageError("--curve requires --lambda-range A..B")
        lo, hi = _range(args.lambda_range)
        rows = [[lam, castelnuovo_pi0(lam, args.N), _safe(fano_bound, lam, args.N, args.theta),
                 _safe(ciliberto_theta, lam, args.N, args.theta)] for lam in range(lo, hi + 1)]
        fmt = args.format or "csv"
        out.write(render_table(["lambda", "pi0", "fano", "theta"], rows, fmt,
                               meta={"command": "bounds", "N": args.N,
                                     "theta_excess": args.theta}))
        return EXIT_OK
    if args.lam is None:
        raise UsageError("--lambda is required unless --curve is given")
    rep = bounds_report(args.lam, args.N, args.theta)
    fmt = args.format or "json"
    if fmt == "json":
        out.write(dumps({"command": "bounds", **rep}))
    else:
        out.write(render_table(list(rep), [list(rep.values())], fmt))
    return EXIT_OK


def invariants_report(r: int, n: int, lam: int, g: int, d: int, Delta: int) -> dict:
    """Profile, class vectors and blow-up products for (r, n, lambda, g, d, Delta)."""
    prof = general_profile(d, n, r).with_(lam=lam, g=g, Delta=Delta)
    c, sN = chern_from_invariants(r, n, lam, g, d, Delta)
    rep = {"command": "invariants", "profile": prof.to_dict(),
           "chern": list(c.values), "segre_normal": list(sN.values),
           "blowup": {"degree_product": blowup_selfintersection(n, r, lam, sN, 0),
                      "dDelta": blowup_selfintersection(n, r, lam, sN, 1)},
           "residuals": invariant_residuals(r, n, lam, g, d, Delta)}
    if n == 8 and r == 3:
        w = liftability_witness(lam, sN, n, r)
        rep["liftable"] = isinstance(w, Consistent)
    return rep


def cmd_invariants(args, out) -> int:
    out.write(dumps(invariants_report(args.r, args.n, args.lam, args.g, args.d, args.Delta)))
    return EXIT_OK


def _load_ideal(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CatalogDataError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise CatalogDataError(f"{path}: invalid JSON: {exc.msg}")
    if not isinstance(data, dict) or "nvars" not in data or "polys" not in data:
        raise CatalogDataError(f"{path}: expected an object with 'nvars' and 'polys'")
    prefix = data.get("prefix", "x")
    try:
        return [parse_poly(p, int(data["nvars"]), prefix) for p in data["polys"]]
    except PolySyntaxError as exc:
        raise CatalogDataError(f"{path}: {exc}")


def cmd_hilbert(args, out) -> int:
    if (args.entry is None) == (args.file is None):
        raise UsageError("exactly one of --entry and --file is required")
    if args.entry is not None:
        e = _entry(args.entry)
        if e.map is None:
            raise CatalogDataError(f"entry {e.name!r} has no printed polynomials")
        gens = list(e.polys_of(args.of))
        if not gens:
            raise CatalogDataError(f"entry {e.name!r} has no {args.of}")
        source = {"entry": e.name, "of": args.of}
    else:
        gens = _load_ideal(args.file)
        source = {"file": args.file}
    field = args.field
    rep = {"command": "hilbert", "source": source, "field": field,
           "modulus": default_prime() if field == "p" else None,
           "nvars": gens[0].nvars, "generators": len(gens), "t": args.t,
           "ideal_dim": ideal_hilbert_function(gens, args.t, field),
           "quotient_dim": quotient_hilbert_function(gens, args.t, field)}
    out.write(dumps(rep))
    return EXIT_OK


def _entry(name: str):
    try:
        return get_entry(name)
    except KeyError:
        raise CatalogDataError(f"unknown catalog entry {name!r}")


def cmd_verify(args, out) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    entries = [_entry(args.entry)] if args.entry else None
    summary = verify_all(args.seed, args.trials, entries)
    header = {"seed": args.seed, "trials": args.trials}
    if args.format == "json":
        out.write(dumps({"command": "verify", **summary.to_dict()}))
    else:
        rows = [[rep.name, res.check, "pass" if res.passed else "FAIL", res.detail]
                for rep in summary.reports for res in rep.results]
        out.write(render_table(["entry", "check", "result", "detail"], rows, args.format,
                               header=header))
    return summary.exit_code


def cmd_catalog(args, out) -> int:
    rows = [[e.name, e.source, list(e.checks), list(e.flags)] for e in builtin_entries()]
    out.write(render_table(["name", "source", "checks", "flags"], rows, args.format,
                           meta={"command": "catalog"}))
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qbt", description="Quadratic birational transformation toolkit.")
    p.add_argument("--version", action="version", version=f"qbt {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("enumerate", help="regenerate a classification table")
    e.add_argument("--table", required=True, choices=TABLES)
    e.add_argument("--format", choices=FORMATS, default="md")
    e.add_argument("--all", action="store_true", help="include excluded rows")
    e.add_argument("--assume-egh", action="store_true",
                   help="apply the conjectural EGH cap (table r4 only)")
    e.set_defaults(fn=cmd_enumerate)

    b = sub.add_parser("bounds", help="genus bounds for curves in P^N")
    b.add_argument("--lambda", dest="lam", type=int)
    b.add_argument("--N", type=int, required=True)
    b.add_argument("--theta", type=int, default=1)
    b.add_argument("--curve", action="store_true", help="emit a bound curve over lambda")
    b.add_argument("--lambda-range", help="A..B, used with --curve")
    b.add_argument("--format", choices=FORMATS)
    b.set_defaults(fn=cmd_bounds)

    i = sub.add_parser("invariants", help="invariant profile and class vectors")
    i.add_argument("--r", type=int, required=True)
    i.add_argument("--n", type=int, required=True)
    i.add_argument("--lambda", dest="lam", type=int, required=True)
    i.add_argument("--g", type=int, required=True)
    i.add_argument("--d", type=int, required=True)
    i.add_argument("--Delta", type=int, required=True)
    i.set_defaults(fn=cmd_invariants)

    h = sub.add_parser("hilbert", help="Hilbert function of an ideal in one degree")
    h.add_argument("--entry")
    h.add_argument("--file")
    h.add_argument("--of", choices=("forms", "image_equations"), default="forms")
    h.add_argument("--t", type=int, required=True)
    h.add_argument("--field", choices=("q", "p"), default="p")
    h.set_defaults(fn=cmd_hilbert)

    v = sub.add_parser("verify", help="verify catalog entries")
    v.add_argument("--entry")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    v.add_argument("--format", choices=FORMATS, default="md")
    v.set_defaults(fn=cmd_verify)

    c = sub.add_parser("catalog", help="list catalog entries")
    c.add_argument("--format", choices=FORMATS, default="md")
    c.set_defaults(fn=cmd_catalog)
    return p


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    """Execute one command; returns the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except (CatalogDataError, PolySyntaxError, ValueError, ArithmeticError) as exc:
        err.write(f"qbt: data error: {exc}\n")
        return EXIT_DATA


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:  # --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
