"""``barrier-mc`` command line.

Exit codes: 0 success, 1 a FAIL verdict (or a replay mismatch), 2 spec syntax
error (or bad command line), 3 invalid configuration, 4 runtime error during
estimation, 5 CSV schema mismatch.
"""
from __future__ import annotations

import argparse
import os
import sys
from importlib import resources

from . import __version__
from .checks import run_unit_checks
from .config import SpecParseError, _parse_seed, load_specs
from .errors import BarrierMCError, ConfigurationError
from .report import HEADER, SchemaError, plot_rows, read_csv, render_csv, write_csv
from .runner import resolve_seed, run_spec

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_CONFIG, EXIT_RUNTIME, EXIT_SCHEMA = 0, 1, 2, 3, 4, 5


def bundled_spec(name):
    """Path of a spec shipped with the package (``ballot_check``, ``paper``, ...)."""
    ref = resources.files("barrier_mc") / "specs" / f"{name}.ini"
    return str(ref) if ref.is_file() else None


def _spec_path(arg):
    if os.path.exists(arg):
        return arg
    found = bundled_spec(arg)
    if found is None:
        raise ConfigurationError(f"no such spec file or bundled spec: {arg}", field="spec_file")
    return found


def _seed_arg(text):
    try:
        return _parse_seed(text, "--seed")
    except ConfigurationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _workers_arg(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError("workers must be positive")
    return v


def _run_file(spec_file, seed, workers, out, plot, record_time, quiet=False):
    """Run every section; returns {name: rows}. Files are written by this thread only."""
    specs = load_specs(_spec_path(spec_file))
    os.makedirs(out, exist_ok=True)
    results = {}
    for spec in specs:
        s = resolve_seed(seed, spec.master_seed)
        try:
            rows = run_spec(spec, s, workers, record_time)
        except ConfigurationError:
            raise
        except Exception as exc:
            raise RuntimeFailure(f"[{spec.name}] {type(exc).__name__}: {exc}") from exc
        write_csv(rows, os.path.join(out, f"{spec.name}.csv"))
        if plot:
            plot_rows(rows, os.path.join(out, f"{spec.name}.svg"), title=spec.name)
        results[spec.name] = rows
        if not quiet:
            _print_table(spec.name, rows)
    return results


class RuntimeFailure(BarrierMCError):
    pass


def _print_table(name, rows):
    print(f"{name}")
    for r in rows:
        est = "" if r.estimate is None else f"{r.estimate:.6g}"
        se = "" if r.std_error is None else f"+- {r.std_error:.2g}"
        where = " ".join(f"{k}={getattr(r, k):g}" for k in ("x", "y", "t", "s", "M")
                         if getattr(r, k) is not None)
        print(f"  {r.kind:<28} {where:<34} {est:>14} {se:<12} {r.verdict}")


def _any_fail(results):
    return any(r.verdict == "FAIL" for rows in results.values() for r in rows)


def cmd_run(args):
    results = _run_file(args.spec, args.seed, args.workers, args.out, args.plot, args.record_time)
    return EXIT_FAIL if _any_fail(results) else EXIT_OK


def cmd_replay(args):
    recorded = read_csv(args.csv)
    specs = {s.name: s for s in load_specs(_spec_path(args.spec))}
    by_exp = {}
    for i, row in enumerate(recorded, 2):
        by_exp.setdefault(row["experiment"], []).append((i, row))
    failures = 0
    for name, rows in by_exp.items():
        if name not in specs:
            raise SchemaError(f"experiment {name!r} in {args.csv} is not defined in {args.spec}")
        seeds = {r["seed"] for _, r in rows}
        workers = {r["workers"] for _, r in rows}
        if len(seeds) != 1 or len(workers) != 1:
            raise SchemaError(f"experiment {name!r} mixes seeds or worker counts")
        try:
            seed = _parse_seed(seeds.pop(), "seed")
            n_workers = int(workers.pop())
        except (ConfigurationError, ValueError):
            raise SchemaError(f"experiment {name!r} has an unreadable seed or worker count") \
                from None
        try:
            fresh = run_spec(specs[name], seed, n_workers)
        except ConfigurationError:
            raise
        except Exception as exc:
            raise RuntimeFailure(f"[{name}] {type(exc).__name__}: {exc}") from exc
        fresh = [dict(zip(HEADER, r.cells())) for r in fresh]
        if len(fresh) != len(rows):
            print(f"FAIL {name}: recorded {len(rows)} rows, replay produced {len(fresh)}")
            failures += 1
            continue
        for (line, old), new in zip(rows, fresh):
            diff = [k for k in HEADER if k != "wall_time_s" and old[k] != new[k]]
            if diff:
                failures += 1
                detail = ", ".join(f"{k} recorded {old[k]!r} replayed {new[k]!r}" for k in diff)
                print(f"FAIL row {line} ({name}, {old['kind']}): {detail}")
    print("replay PASS" if not failures else f"replay FAIL ({failures} mismatches)")
    return EXIT_OK if not failures else EXIT_FAIL


def cmd_plot(args):
    rows = read_csv(args.csv)
    out = args.output or os.path.splitext(args.csv)[0] + ".svg"
    title = rows[0]["experiment"] if rows else None
    plot_rows(rows, out, title=title)
    print(out)
    return EXIT_OK


def cmd_suite(args):
    code = EXIT_OK
    table = []
    if args.which in ("unit", "all"):
        for name, ok, detail in run_unit_checks():
            table.append(("unit", name, "PASS" if ok else "FAIL", detail))
    if args.which in ("paper", "all"):
        results = _run_file(bundled_spec("paper"), args.seed, args.workers, args.out, args.plot,
                            False, quiet=True)
        for name, rows in results.items():
            for r in rows:
                if r.verdict != "N/A" or r.kind in ("asymptotic/ratio", "bound_scan/C"):
                    shown = "" if r.estimate is None else f"{r.estimate:.5g}"
                    if r.std_error is not None:
                        shown += f" +- {r.std_error:.2g}"
                    where = " ".join(f"{k}={getattr(r, k):g}" for k in ("x", "y", "t", "s")
                                     if getattr(r, k) is not None)
                    table.append((name, f"{r.kind} {where}".strip(), r.verdict, shown))
    gw = max((len(t[0]) for t in table), default=5)
    width = max((len(t[1]) for t in table), default=10)
    for group, name, verdict, detail in table:
        print(f"{group:<{gw}}  {name:<{width}}  {verdict:<12}  {detail}")
        if verdict == "FAIL":
            code = EXIT_FAIL
    return code


def build_parser():
    p = argparse.ArgumentParser(prog="barrier-mc",
                                description="Monte Carlo experiments on Poisson-observed "
                                            "Brownian bridges below barrier curves.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the experiments of a spec file")
    r.add_argument("spec", help="spec file, or the name of a bundled spec")
    r.add_argument("--seed", type=_seed_arg, default=None, help="master seed (0 <= N < 2**64)")
    r.add_argument("--workers", type=_workers_arg, default=None, help="worker threads")
    r.add_argument("--plot", action="store_true", help="also write <name>.svg")
    r.add_argument("--out", default=".", help="output directory (default: current)")
    r.add_argument("--record-time", action="store_true",
                   help="fill the wall_time_s column (makes files run-dependent)")
    r.set_defaults(func=cmd_run)

    rp = sub.add_parser("replay", help="re-run a result CSV and compare bit for bit")
    rp.add_argument("csv")
    rp.add_argument("spec")
    rp.set_defaults(func=cmd_replay)

    s = sub.add_parser("suite", help="run the built-in checks")
    s.add_argument("which", choices=("unit", "paper", "all"))
    s.add_argument("--seed", type=_seed_arg, default=None)
    s.add_argument("--workers", type=_workers_arg, default=None)
    s.add_argument("--out", default="barrier_mc_suite", help="directory for the reproduction CSVs")
    s.add_argument("--plot", action="store_true")
    s.set_defaults(func=cmd_suite)

    pl = sub.add_parser("plot", help="draw the SVG of a result CSV")
    pl.add_argument("csv")
    pl.add_argument("-o", "--output", default=None)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecParseError as exc:
        print(f"barrier-mc: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigurationError as exc:
        field = f" [{exc.field}]" if exc.field else ""
        print(f"barrier-mc: configuration error{field}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SchemaError as exc:
        print(f"barrier-mc: schema mismatch: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (RuntimeFailure, BarrierMCError, OSError, KeyboardInterrupt) as exc:
        print(f"barrier-mc: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
