"""Command-line entry point ``qwp``.

Exit codes: 0 success, 2 bad arguments, 3 I/O error, 4 numeric
precondition violated.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import jobs
from .imaging import psnr, read_image

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


def _common(sp, levels=True, kind=False, tree=False):
    sp.add_argument("--p", type=int, default=9, help="spline order (default 9)")
    if levels:
        sp.add_argument("--levels", type=int, default=3, help="decomposition depth M")
    if kind:
        sp.add_argument("--kind", default="real",
                        help="real, complementary, qplus or qminus")
    if tree:
        sp.add_argument("--tree", choices=("plus", "minus", "both"), default="both")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qwp", description=(
        "Spline-based quasi-analytic wavelet packets: 1D and 2D transforms, "
        "denoising, waveform atlas and benchmarks."))
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("tables", help="spline sequences for one (p, N) as CSV")
    _common(sp, levels=False)
    sp.add_argument("--n", dest="N", type=int, default=64)
    sp.add_argument("--out", dest="output")

    sp = sub.add_parser("decompose1d", help="1D transform of a signal into a QWP1 file")
    _common(sp, kind=True)
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", dest="output", required=True)

    sp = sub.add_parser("reconstruct1d", help="signal from a QWP1 file")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", dest="output", required=True)
    sp.add_argument("--cover", choices=("level", "wavelet"), default="level")

    sp = sub.add_parser("hilbert", help="discrete periodic Hilbert transform of a signal")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", dest="output", required=True)

    sp = sub.add_parser("decompose2d", help="dual-tree transform of an image into a QWP2 file")
    _common(sp, tree=True)
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", dest="output", required=True)
    sp.add_argument("--extension", choices=("symmetric", "none"), default="symmetric")

    sp = sub.add_parser("reconstruct2d", help="image from a QWP2 file")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", dest="output", required=True)
    sp.add_argument("--dump-intermediates", dest="dump_intermediates", metavar="DIR",
                    help="also write the complex tree signals and their spectra to DIR")

    sp = sub.add_parser("denoise", help="threshold dual-tree coefficients of an image")
    _common(sp, tree=True)
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", dest="output")
    sp.add_argument("--ref", dest="reference", help="clean reference for metrics")
    sp.add_argument("--threshold", default="hard:3sigma",
                    help="RULE:VALUE, rule hard or soft, VALUE absolute or Ksigma")
    sp.add_argument("--sigma", type=float, help="known noise level of the input")
    sp.add_argument("--add-noise", dest="noise_sigma", type=float,
                    help="add Gaussian noise of this level to a clean input first")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--extension", choices=("symmetric", "none"), default="symmetric")
    sp.add_argument("--report", help="write metrics as JSON here")

    sp = sub.add_parser("atlas", help="dump waveforms of one level with a JSON index")
    _common(sp, levels=False)
    sp.add_argument("--n", dest="N", type=int, default=64)
    sp.add_argument("--level", dest="levels", type=int, default=2)
    sp.add_argument("--kind", action="append", dest="kinds",
                    help="1D kinds to dump (repeatable; default all four)")
    sp.add_argument("--no-2d-csv", dest="csv2d", action="store_false",
                    help="write 2D waveforms as PGM only")
    sp.add_argument("--out", dest="output", required=True)

    sp = sub.add_parser("bench", help="timing table as CSV")
    sp.add_argument("--out", dest="output")
    sp.add_argument("--repeats", type=int, default=3)
    sp.add_argument("--no-2d", dest="include_2d", action="store_false")
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("psnr", help="PSNR of an image against a reference")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--ref", dest="reference", required=True)
    return ap


_CFG_FIELDS = {f for f in jobs.JobConfig.__dataclass_fields__}


def config_from_args(args: argparse.Namespace) -> jobs.JobConfig:
    values = {k: v for k, v in vars(args).items() if k in _CFG_FIELDS and v is not None}
    cfg = jobs.JobConfig(**values)
    for k, v in vars(args).items():
        if k not in _CFG_FIELDS:
            cfg.extra[k] = v
    return cfg.validate()


def _write_rows(path, header, rows, out=None):
    fh = open(path, "w", newline="") if path else (out or sys.stdout)
    try:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    finally:
        if path:
            fh.close()


def dispatch(cfg: jobs.JobConfig, out=None) -> None:
    out = out or sys.stdout
    cmd = cfg.command
    if cmd == "tables":
        _write_rows(cfg.output, jobs.TABLE_HEADER, jobs.run_tables(cfg), out)
    elif cmd == "decompose1d":
        tree = jobs.run_decompose1d(cfg)
        print(f"wrote {cfg.output}: N={tree.N} M={tree.depth} kind={tree.kind.name.lower()}",
              file=out)
    elif cmd == "reconstruct1d":
        x = jobs.run_reconstruct1d(cfg)
        print(f"wrote {cfg.output}: {x.size} samples", file=out)
    elif cmd == "hilbert":
        jobs.run_hilbert(cfg)
        print(f"wrote {cfg.output}", file=out)
    elif cmd == "decompose2d":
        box = jobs.run_decompose2d(cfg)
        print(f"wrote {cfg.output}: side {box.N}, {len(box.channels)} channel(s), "
              f"crop {box.crop.height}x{box.crop.width}", file=out)
    elif cmd == "reconstruct2d":
        img = jobs.run_reconstruct2d(cfg)
        print(f"wrote {cfg.output}: {img.shape[0]}x{img.shape[1]}", file=out)
    elif cmd == "denoise":
        report = jobs.run_denoise(cfg)
        text = json.dumps(report.to_dict(), indent=1)
        if cfg.extra.get("report"):
            with open(cfg.extra["report"], "w") as fh:
                fh.write(text)
        print(text, file=out)
    elif cmd == "atlas":
        kinds = cfg.extra.get("kinds") or ("psi", "phi", "qplus", "qminus")
        index = jobs.write_atlas(cfg.p, cfg.N or 64, cfg.levels, cfg.output, kinds,
                                 cfg.extra.get("csv2d", True))
        print(f"wrote {len(index['waveforms1d'])} 1D and {len(index['waveforms2d'])} 2D "
              f"waveforms, {index['directionClasses']} direction classes", file=out)
    elif cmd == "bench":
        rows = jobs.run_bench(cfg, repeats=cfg.extra.get("repeats", 3),
                              include_2d=cfg.extra.get("include_2d", True))
        if not cfg.output:
            _write_rows(None, jobs.BENCH_HEADER, rows, out)
    elif cmd == "psnr":
        value = psnr(read_image(cfg.reference).data, read_image(cfg.input).data)
        print(f"{value:.4f}" if value != float("inf") else "inf", file=out)
    else:  # argparse restricts the choices
        raise jobs.ConfigError(f"unknown command {cmd!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = config_from_args(args)
        dispatch(cfg)
    except jobs.ConfigError as exc:
        print(f"qwp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qwp: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"qwp: numeric precondition violated: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
