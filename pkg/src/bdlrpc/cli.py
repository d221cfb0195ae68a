"""Command-line front end: ``bdlrpc {bounds,table,curve,simulate,selftest}``.

Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 selftest failure.
Every output starts with the fully resolved configuration: as ``# key=value``
comment lines for CSV, and as a ``config`` object for JSON.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import os
import sys
import time
from fractions import Fraction

import numpy as np

from bdlrpc import __version__
from bdlrpc.exceptions import ConstructionError, ParameterError
from bdlrpc.montecarlo import CSV_COLUMNS, estimate_pt, simulate_decoding
from bdlrpc.probability import (
    DomainViolation,
    LowerBound,
    Prob,
    ProbParams,
    choose_pt,
    curve_rows,
    p_opt_exact,
    prob_report,
    round_half_up,
    success_lower,
    table_rows,
)

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_SELFTEST = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[int]:
    """``a..b`` (inclusive) or a single integer."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"invalid range {text!r}; expected a..b") from None
    if lo < 0 or hi < lo:
        raise UsageError(f"invalid range {text!r}; need 0 <= a <= b")
    return list(range(lo, hi + 1))


def _default_seed() -> int:
    env = os.environ.get("BDLRPC_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"BDLRPC_SEED must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("parameters")
    for name in ("q", "m", "n", "k", "d", "t", "r"):
        g.add_argument(f"--{name}", type=int)
    g.add_argument("--r-range", dest="r_range", metavar="A..B")
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=("csv", "json"), default="csv")
    o.add_argument("--out", metavar="PATH", help="write to PATH instead of stdout")
    o.add_argument("--no-timestamp", action="store_true", help="omit the generation timestamp")

    sim = argparse.ArgumentParser(add_help=False)
    s = sim.add_argument_group("simulation")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", type=int, default=None, help="default: $BDLRPC_SEED or 0")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--force", action="store_true", help="run outside the decoding radius")
    s.add_argument("--diagnose", action="store_true", help="tally the per-trial correctness conditions")
    s.add_argument("--resample-code", action="store_true", help="draw a fresh code for every trial")

    parser = argparse.ArgumentParser(prog="bdlrpc", description="BD-LRPC decoding bounds and simulations")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bounds", parents=[common], help="all probability formulas for one parameter set")
    sub.add_parser("table", parents=[common], help="rows of (r, P_1, B_2, P_{r(d-1)})")
    sub.add_parser("curve", parents=[common], help="failure bounds D_New, D_FL, D_G per r")
    sub.add_parser("simulate", parents=[common, sim], help="Monte Carlo decoding runs")
    sub.add_parser("selftest", parents=[common], help="fast consistency checks")
    return parser


def _require(args, names) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs {' '.join(missing)}")


def _r_values(args) -> list[int]:
    if args.r_range is not None and args.r is not None:
        raise UsageError("give either --r or --r-range, not both")
    if args.r_range is not None:
        return parse_range(args.r_range)
    if args.r is not None:
        if args.r < 0:
            raise UsageError("--r must be >= 0")
        return [args.r]
    raise UsageError(f"{args.command} needs --r or --r-range")


def _config(args, **extra) -> dict:
    cfg = {"command": args.command, "version": __version__}
    for name in ("q", "m", "n", "k", "d", "t", "r", "r_range"):
        cfg[name] = getattr(args, name)
    for name in ("trials", "seed", "workers", "force", "diagnose", "resample_code"):
        if hasattr(args, name):
            cfg[name] = getattr(args, name)
    cfg["format"] = args.format
    cfg.update(extra)
    if not args.no_timestamp:
        cfg["generated_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return cfg


def _render(args, config: dict, rows: list[dict], columns: list[str] | None = None, body=None) -> str:
    if args.format == "json":
        doc = {"config": config}
        doc.update(body if body is not None else {"rows": rows})
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    for key, val in config.items():
        buf.write(f"# {key}={json.dumps(val)}\n")
    columns = columns or (list(rows[0]) if rows else [])
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def _cell(x) -> str:
    if isinstance(x, DomainViolation):
        return "domain-violation"
    if isinstance(x, LowerBound):
        x = x.prob
    return str(round_half_up(x.raw if isinstance(x, Prob) else Fraction(x)))


def _float(x) -> float | str:
    return x.value if isinstance(x, Prob) else ""


def _log10c(x) -> float | str:
    if not isinstance(x, Prob) or x.raw >= 1:
        return ""
    return x.log10_complement


# ---------------------------------------------------------------------------
# subcommands


def cmd_bounds(args) -> str:
    _require(args, ("q", "n", "k", "d", "t"))
    rows, dicts = [], []
    for r in _r_values(args):
        rep = prob_report(ProbParams(args.q, args.n, args.k, args.d, args.t, r, args.m))
        rows.append(rep.csv_row())
        dicts.append(rep.to_dict())
    cfg = _config(args)
    if args.format == "json":
        body = {"report": dicts[0]} if len(dicts) == 1 else {"reports": dicts}
        return _render(args, cfg, rows, body=body)
    return _render(args, cfg, rows)


def cmd_table(args) -> str:
    _require(args, ("q", "n", "k", "d"))
    rs = _r_values(args)
    rows = table_rows(args.q, args.n, args.k, args.d, rs)
    out = [{"r": row["r"], "P_1": _cell(row["P_1"]), "B_2": _cell(row["B_2"]), "P_r(d-1)": _cell(row["P_opt"])}
           for row in rows]
    cfg = _config(args, rounding="half-up, 5 decimals", r0_convention="all columns 1 when r = 0")
    return _render(args, cfg, out, ["r", "P_1", "B_2", "P_r(d-1)"])


CURVE_COLUMNS = [
    "r", "status", "p_t", "p_t_log10c", "p_t_source",
    "d_new", "d_new_log10c", "d_fl", "d_fl_log10c", "d_g", "d_g_log10c",
]


def cmd_curve(args) -> str:
    _require(args, ("q", "m", "n", "k", "d", "t"))
    out = []
    for row in curve_rows(args.q, args.m, args.n, args.k, args.d, args.t, _r_values(args)):
        flags = [name for name in ("d_new", "d_fl", "d_g") if not row[name].in_radius]
        status = "ok" if not flags else "out-of-radius:" + "+".join(flags)
        rec = {"r": row["r"], "status": status, "p_t_source": row["p_t_source"]}
        for name in ("p_t", "d_new", "d_fl", "d_g"):
            rec[name] = _float(row[name])
            rec[f"{name}_log10c"] = _log10c(row[name])
            if args.format == "json":
                rec[f"{name}_raw"] = float(row[name].raw)
        out.append(rec)
    return _render(args, _config(args), out, CURVE_COLUMNS)


def cmd_simulate(args) -> str:
    _require(args, ("q", "m", "n", "k", "d", "t"))
    if args.trials < 1 or args.workers < 1:
        raise UsageError("--trials and --workers must be positive")
    if args.seed is None:
        args.seed = _default_seed()
    rows, stats = [], []
    for r in _r_values(args):
        p = ProbParams(args.q, args.n, args.k, args.d, args.t, r, args.m)
        st = simulate_decoding(p, args.trials, args.seed, args.workers, resample_code=args.resample_code,
                               diagnose=args.diagnose, force=args.force)
        bound = success_lower(p, choose_pt(p)[0])
        row = st.csv_row()
        row["bound"] = bound.value
        for key, val in st.diagnostics.items():
            row[key] = val
        rows.append(row)
        d = st.to_dict()
        d["success_lower_bound"] = bound.value
        stats.append(d)
    columns = CSV_COLUMNS + ["bound"]
    if args.diagnose:
        columns += ["cond_i", "cond_ii", "cond_both", "cond_both_success"]
    return _render(args, _config(args), rows, columns, body={"runs": stats} if args.format == "json" else None)


def run_selftest() -> list[tuple[str, bool, str]]:
    """Fast checks; returns (name, passed, detail) triples."""
    results = []

    def check(name, fn):
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, not a crash of selftest
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), f"{detail} ({time.perf_counter() - t0:.2f}s)"))

    expected = [
        ("0.99953", "0.99991", "0.99995"),
        ("0.98447", "0.99982", "0.99986"),
        ("0.57759", "0.99957", "0.99968"),
        ("0.00000", "0.99536", "0.99931"),
        ("0.00000", "0.74854", "0.99858"),
    ]

    def table():
        got = [tuple(_cell(row[c]) for c in ("P_1", "B_2", "P_opt")) for row in table_rows(2, 32, 16, 5, range(1, 6))]
        return got == expected, "q=2 n=32 k=16 d=5 r=1..5"

    def trivial():
        row = table_rows(2, 32, 16, 5, [0])[0]
        fb = curve_rows(2, 37, 32, 16, 2, 2, [0])[0]
        ok = all(row[c].raw == 1 for c in ("P_1", "B_2", "P_opt")) and fb["d_new"].raw == 0 and fb["d_g"].raw == 0
        return ok, "r=0 conventions"

    def field():
        from bdlrpc.field import field_make

        ctx = field_make(2, 3)
        a = ctx.alpha
        ok = ctx.modulus == (1, 1, 0, 1) and np.array_equal(ctx.mul(ctx.pow(a, 2), ctx.pow(a, 2)), [0, 1, 1])
        ok = ok and np.array_equal(ctx.mul(a, ctx.inv(a)), ctx.one())
        return ok, "F_8 with x^3+x+1"

    def pt():
        p = ProbParams(2, 10, 4, 2, 2, 2)
        st = estimate_pt(p, 20000, 1)
        target = p_opt_exact(2, 10, 4, 2).value
        return st.agrees_with(target), f"estimate {st.estimate:.4f} vs {target:.4f}"

    def decode_roundtrip():
        p = ProbParams(2, 16, 4, 2, 2, 2, m=17)
        st = simulate_decoding(p, 20, 3)
        return st.successes >= 18, f"{st.successes}/20 decoded"

    check("table1", table)
    check("trivial-identities", trivial)
    check("field", field)
    check("estimate-pt", pt)
    check("decode", decode_roundtrip)
    return results


def cmd_selftest(args) -> tuple[str, bool]:
    results = run_selftest()
    rows = [{"check": name, "result": "pass" if ok else "FAIL", "detail": detail} for name, ok, detail in results]
    return _render(args, _config(args), rows, ["check", "result", "detail"]), all(ok for _, ok, _ in results)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    passed = True
    try:
        if args.command == "selftest":
            text, passed = cmd_selftest(args)
        else:
            text = {"bounds": cmd_bounds, "table": cmd_table, "curve": cmd_curve, "simulate": cmd_simulate}[
                args.command
            ](args)
    except (UsageError, ParameterError) as exc:
        print(f"bdlrpc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConstructionError, RuntimeError, OSError, ValueError) as exc:
        print(f"bdlrpc {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"bdlrpc: cannot write output: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK if passed else EXIT_SELFTEST


if __name__ == "__main__":
    sys.exit(main())
