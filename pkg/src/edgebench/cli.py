"""Command line entry point ``bench``.

Exit codes: 0 success, 2 configuration/parameter error, 3 numerical error
(solver or calibration failure).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import EMIT_FLAGS, BenchmarkConfig, emit_report, run_benchmark
from .calibration import (TARGET_DB, TOLERANCE_DB, CalibrationConfig, calibrate_all,
                          load_calibration_images)
from .errors import (CalibrationError, ConfigurationError, FormatError,
                     NumericalError, ParameterError)
from .filters import FilterId
from .image import save_image, save_mask
from .patterns import DEFAULT_SEED, DEFAULT_SIZE, PatternKind, generate_all

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_KIND_ALIASES = {k.value.lower(): k for k in PatternKind}


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _filter_list(text: str) -> list[FilterId]:
    try:
        return [FilterId(t.upper()) for t in _csv_list(text)]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"{exc}; choose from {','.join(f.value for f in FilterId)}") from exc


def _normalizers(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(t) for t in _csv_list(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if len(values) != 4:
        raise argparse.ArgumentTypeError("expected four values h,s,p,c")
    return values


def _emit_flags(text: str) -> list[str]:
    flags = _csv_list(text)
    bad = set(flags) - set(EMIT_FLAGS)
    if bad:
        raise argparse.ArgumentTypeError(f"unknown emit flags {sorted(bad)}")
    return flags


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench", description="Artifact benchmark of base+detail decomposition filters")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="score filters on the four test patterns")
    run.add_argument("--filters", type=_filter_list, default=list(FilterId),
                     help="comma separated filter ids (default: all seven)")
    run.add_argument("--params", choices=("paper", "calibrate"), default="paper")
    run.add_argument("--size", type=int, default=DEFAULT_SIZE)
    run.add_argument("--seed", type=int, default=DEFAULT_SEED)
    run.add_argument("--out", type=Path, default=Path("bench-out"))
    run.add_argument("--emit", type=_emit_flags, default=["csv", "json", "svg"],
                     help="comma separated subset of csv,json,svg,images")
    run.add_argument("--normalizers", type=_normalizers, default=None,
                     help="explicit normalizers h,s,p,c")
    run.add_argument("--images", type=Path, default=None,
                     help="calibration image directory (with --params calibrate)")
    run.add_argument("--jobs", type=int, default=1)

    cal = sub.add_parser("calibrate", help="solve each filter's detail knob")
    cal.add_argument("--images", type=Path, default=None,
                     help="directory of PGM/PNG images (default: bundled set)")
    cal.add_argument("--target-db", type=float, default=TARGET_DB)
    cal.add_argument("--tol", type=float, default=TOLERANCE_DB)
    cal.add_argument("--filters", type=_filter_list, default=list(FilterId))
    cal.add_argument("--out", type=Path, default=None, help="write the JSON result here")

    pat = sub.add_parser("pattern", help="export a test pattern and its masks")
    pat.add_argument("kind", type=str.lower, choices=sorted(_KIND_ALIASES))
    pat.add_argument("--out", type=Path, required=True)
    pat.add_argument("--size", type=int, default=DEFAULT_SIZE)
    pat.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return parser


def _cmd_run(args) -> int:
    config = BenchmarkConfig(
        filters=args.filters, params_mode=args.params, size=args.size, seed=args.seed,
        out_dir=args.out, emit=args.emit, normalizers=args.normalizers,
        calibration_images=args.images, jobs=args.jobs)
    report = run_benchmark(config, keep_layers="images" in args.emit)
    emit_report(report, args.out, args.emit)
    for rank, fid in enumerate(report.ranking, 1):
        print(f"{rank}. {fid}  A={report.scores[fid].fused:.6g}")
    return 0


def _cmd_calibrate(args) -> int:
    config = CalibrationConfig(load_calibration_images(args.images), target_db=args.target_db,
                               tolerance_db=args.tol, filters=args.filters)
    result = calibrate_all(config)
    summary = [e.summary() for e in result.entries.values()]
    text = json.dumps(summary, indent=2) + "\n"
    if args.out:
        args.out.write_text(text)
    sys.stdout.write(text)
    for fid in result.failures:
        print(f"{fid}: {result.entries[fid].error}", file=sys.stderr)
    return EXIT_NUMERICAL if result.failures else 0


def _cmd_pattern(args) -> int:
    kind = _KIND_ALIASES[args.kind]
    bundle = generate_all(args.size, args.seed)[kind]
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    stem = kind.value.lower()
    save_image(bundle.image, out / f"{stem}.png")
    if len(bundle.inputs) > 1:
        for i, img in enumerate(bundle.inputs):
            save_image(img, out / f"{stem}_{i}.png")
    for name, mask in bundle.masks.items():
        save_mask(mask, out / f"{stem}_mask_{name}.png")
    (out / f"{stem}_meta.json").write_text(json.dumps(bundle.meta, indent=2, sort_keys=True) + "\n")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"run": _cmd_run, "calibrate": _cmd_calibrate, "pattern": _cmd_pattern}
    try:
        return handlers[args.command](args)
    except (ConfigurationError, ParameterError, FormatError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, CalibrationError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
