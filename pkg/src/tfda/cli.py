"""Command-line interface: ``tfda analyze | synth | stats | parse | spectrum``.

Exit codes: 0 success, 1 I/O or usage problem, 2 COT syntax error, 3 degenerate field.
"""

import argparse
import glob
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, calculus, cotlang, fieldio, stats
from .errors import CotSyntaxError, FieldFormatError, InsufficientDataError
from .pipeline import AnalysisConfig, analyze_field
from .vortex import read_vortex_csv, write_vortex_csv

EXIT_OK, EXIT_IO, EXIT_PARSE, EXIT_DEGENERATE = 0, 1, 2, 3


def _expand(patterns):
    paths = []
    for pat in patterns:
        hits = sorted(glob.glob(pat))
        paths.extend(hits if hits else [pat])
    return sorted(dict.fromkeys(paths))


def _write_text(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _analyze_one(path, out_dir, config, ascii_cot):
    """Analyze one snapshot into ``out_dir``; returns ``(path, exit code, message)``."""
    try:
        raw = fieldio.load_field(path)
    except (OSError, FieldFormatError) as exc:
        return path, EXIT_IO, str(exc)
    try:
        os.makedirs(out_dir, exist_ok=True)
        result = analyze_field(raw, config)
        summary = result.summary()
        summary["input"] = str(path)
        _write_text(os.path.join(out_dir, "report.json"), json.dumps(summary, indent=2, ensure_ascii=False) + "\n")
        if not result.stable:
            return path, EXIT_DEGENERATE, "degenerate: " + "; ".join(result.report.reasons)
        _write_text(os.path.join(out_dir, "cot.txt"), result.filtered.to_string(ascii=ascii_cot) + "\n")
        _write_text(os.path.join(out_dir, "reeb.json"), result.reeb.to_json() + "\n")
        write_vortex_csv(result.vortices, os.path.join(out_dir, "vortices.csv"))
    except OSError as exc:
        return path, EXIT_IO, str(exc)
    return path, EXIT_OK, result.filtered.to_string(ascii=ascii_cot)


def cmd_analyze(args):
    config = AnalysisConfig(
        eps0=args.eps0,
        coarse_factor=args.coarse,
        coarse_method=args.coarse_method,
        normalize=not args.no_normalize,
        half=args.half,
    )
    paths = _expand(args.fields)
    if len(paths) == 1:
        jobs = [(paths[0], args.out)]
    else:
        stems = [Path(p).stem for p in paths]
        if len(set(stems)) != len(stems):
            stems = [f"{i:04d}_{s}" for i, s in enumerate(stems)]
        jobs = [(p, os.path.join(args.out, s)) for p, s in zip(paths, stems)]

    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_analyze_one, p, o, config, args.ascii) for p, o in jobs]
            results = [f.result() for f in futures]
    else:
        results = [_analyze_one(p, o, config, args.ascii) for p, o in jobs]

    code = EXIT_OK
    for path, rc, msg in results:
        if len(results) == 1 and rc == EXIT_OK:
            print(msg)
        elif rc != EXIT_OK or len(results) > 1:
            print(f"{path}: {msg}", file=sys.stderr if rc else sys.stdout)
        code = max(code, rc)
    return code


def cmd_synth(args):
    count = max(1, args.count)
    seeds = [args.seed + i for i in range(count)]
    try:
        if count > 1:
            os.makedirs(args.out, exist_ok=True)
        for seed in seeds:
            field = fieldio.synth_field(args.nx, args.ny or args.nx, args.exponent, args.kmin, args.kmax, seed)
            path = args.out if count == 1 else os.path.join(args.out, f"snap_{seed:05d}.tfd")
            fieldio.save_field(field, path)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_stats(args):
    paths = _expand(args.tables)
    values = []
    try:
        for p in paths:
            for row in read_vortex_csv(p):
                if args.orientation in ("all", row["orientation"]):
                    values.append(row[args.fit])
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        os.makedirs(args.out, exist_ok=True)
        fits = stats.fit_all(values)
        stats.write_fit_table(fits, os.path.join(args.out, f"fit_{args.fit}.csv"))
        hist = stats.hist1d(values, args.bins, log=args.log_bins)
        stats.write_hist_csv(hist, os.path.join(args.out, f"hist_{args.fit}.csv"))
        if args.joint:
            xs, ys = [], []
            for p in paths:
                for row in read_vortex_csv(p):
                    if args.orientation in ("all", row["orientation"]):
                        xs.append(row["area"])
                        ys.append(row[args.joint])
            h2 = stats.hist2d(xs, ys, args.bins, log=args.log_bins)
            stats.write_hist_csv(h2, os.path.join(args.out, f"joint_area_{args.joint}.csv"))
        stats.RunManifest(
            inputs=paths,
            flags={"fit": args.fit, "bins": args.bins, "log_bins": args.log_bins,
                   "orientation": args.orientation, "joint": args.joint},
        ).write(os.path.join(args.out, "manifest.json"))
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for rank, f in enumerate(fits, 1):
        status = "" if f.converged else f"  (failed: {f.message})"
        print(f"{rank if f.converged else '-'}  {f.family:<12s} aic={f.aic:.6g}{status}")
    return EXIT_OK


def cmd_parse(args):
    mode = "permissive" if args.permissive else "strict"
    try:
        tree = cotlang.parse(args.text, mode)
    except CotSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(cotlang.emit(tree, ascii=args.ascii))
    return EXIT_OK


def cmd_spectrum(args):
    try:
        field = fieldio.load_field(args.field)
    except (OSError, FieldFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    spec = calculus.energy_spectrum(field, args.dk)
    try:
        if args.out:
            spec.to_csv(args.out)
        else:
            print("k,E")
            for k, e in zip(spec.k, spec.energy):
                print(f"{k:.17g},{e:.17g}")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="tfda", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tfda {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="COT, Reeb graph and terminal vortices of field file(s)")
    p.add_argument("fields", nargs="+", help="field files or glob patterns (TFD1 binary or .csv)")
    p.add_argument("--out", default="tfda_out", help="output directory")
    p.add_argument("--eps0", type=float, default=0.1, help="filter threshold on normalized values")
    p.add_argument("--coarse", type=int, default=1, help="coarse-graining factor")
    p.add_argument("--coarse-method", choices=["mean", "subsample"], default="mean")
    p.add_argument("--no-normalize", action="store_true", help="skip division by the value extent")
    p.add_argument("--half", action="store_true", help="use omega^2/2 and |u|^2/2 for vortex quantities")
    p.add_argument("--ascii", action="store_true", help="write cot.txt in ASCII syntax")
    p.add_argument("--seed", type=int, default=0, help="recorded for reproducibility; analysis is deterministic")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for batches")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="random-phase power-law stream function(s)")
    p.add_argument("--nx", type=int, default=256)
    p.add_argument("--ny", type=int, default=None)
    p.add_argument("--exponent", type=float, default=-3.0)
    p.add_argument("--kmin", type=int, default=1)
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1, help="number of snapshots (seeds seed..seed+count-1)")
    p.add_argument("--out", required=True, help="output file, or directory when --count > 1")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("stats", help="fit and histogram vortex quantities from vortices.csv files")
    p.add_argument("tables", nargs="+", help="vortex CSV files or glob patterns")
    p.add_argument("--fit", choices=["area", "enstrophy", "energy"], default="area")
    p.add_argument("--orientation", choices=["all", "plus", "minus"], default="all")
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--log-bins", action="store_true")
    p.add_argument("--joint", choices=["enstrophy", "energy"], default=None, help="also write a joint PDF with area")
    p.add_argument("--out", default="tfda_stats")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("parse", help="validate a COT string and print its canonical form")
    p.add_argument("text")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--strict", action="store_true", help="(default) require the strict grammar")
    g.add_argument("--permissive", action="store_true")
    p.add_argument("--ascii", action="store_true", help="print in ASCII syntax")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("spectrum", help="shell-binned energy spectrum of a stream function")
    p.add_argument("field")
    p.add_argument("--dk", type=float, default=1.0)
    p.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
