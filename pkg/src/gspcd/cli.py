"""Command-line entry point: ``gspcd <subcommand> ...``.

Subcommands follow the processing chain: ``synth`` -> ``gsp`` -> ``detect``
-> ``evaluate`` / ``roc``, with ``stats`` for image summaries and
``pipeline`` to run everything into one output directory.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from . import io as gio
from .cda import detect
from .core import CdaParams, GspcdError, ImageStack
from .evaluation import (DEFAULT_C_VALUES, DEFAULT_MATCH_RADIUS_PX, Case, case_table, match,
                         roc_table, score, sweep_cases)
from .gsp import ESTIMATORS, EstimatorKind, predict_scene
from .stats import DEFAULT_HALF_WINDOW, describe, exclusion_mask, quality
from .synth import SynthConfig, default_scenario, generate

DESCRIBE_COLUMNS = ("image", "average", "std_dev", "skewness", "kurtosis")
QUALITY_COLUMNS = ("image", "mse", "mape", "mdae", "pixels_used")


class UsageError(Exception):
    pass


# -- helpers ----------------------------------------------------------------------

def _threads(args) -> int:
    value = args.threads
    if value is None:
        value = os.environ.get("GSPCD_THREADS", "1")
    try:
        value = int(value)
    except ValueError:
        raise UsageError(f"invalid thread count {value!r}") from None
    if value < 1:
        raise UsageError("thread count must be >= 1")
    return value


def _estimator(args) -> EstimatorKind:
    if not 0.0 <= args.alpha < 0.5:
        raise UsageError(f"--alpha must lie in [0, 0.5), got {args.alpha}")
    return EstimatorKind(args.est, alpha=args.alpha, centered=args.centered)


def _cda_params(args, c=None) -> CdaParams:
    c = args.C if c is None else c
    if c < 0:
        raise UsageError("-C must be non-negative")
    for name in ("opening", "dilation"):
        k = getattr(args, name)
        if k < 1 or k % 2 == 0:
            raise UsageError(f"--{name} must be an odd integer >= 1")
    return CdaParams(c, args.opening, args.dilation, args.connectivity)


def _check_positive(value, flag):
    if not value > 0:
        raise UsageError(f"{flag} must be positive, got {value}")


def _out_path(path) -> Path:
    path = Path(path)
    return path if path.suffix else path.with_suffix(".f32")


def _stack_from_paths(paths) -> ImageStack:
    return ImageStack(tuple(gio.read_raster(p) for p in paths))


def _describe_row(name, image):
    d = describe(image)
    return [name, gio.fmt(d.average), gio.fmt(d.std_dev), gio.fmt(d.skewness), gio.fmt(d.kurtosis)]


def _quality_row(name, interest, predicted, excluded):
    q = quality(interest, predicted, excluded)
    return [name, gio.fmt(q.mse), gio.fmt(q.mape), gio.fmt(q.mdae), q.pixels_used]


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _print_csv(header, rows):
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _read_cases_manifest(path):
    """Rows of ``mission,pass,surveillance,reference,targets``; paths relative to the file."""
    base = Path(path).parent
    cases = []
    with open(path, encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(line for line in fh if not line.startswith("#")):
            cases.append(Case(gio.read_raster(base / rec["surveillance"]),
                              gio.read_raster(base / rec["reference"]),
                              gio.read_targets(base / rec["targets"]),
                              rec["mission"], rec["pass"]))
    return cases


# -- subcommands --------------------------------------------------------------------

def cmd_gsp(args) -> int:
    kind = _estimator(args)
    threads = _threads(args)
    if len(args.inputs) < 2:
        raise UsageError("gsp needs at least 2 input rasters")
    stack = _stack_from_paths(args.inputs)
    predicted = predict_scene(stack, kind, threads=threads)
    out = _out_path(args.out)
    gio.write_raster(predicted, out)
    row = _describe_row(out.stem, predicted)
    print(",".join(str(v) for v in row))
    return 0


def cmd_stats(args) -> int:
    interest = gio.read_raster(args.interest)
    targets = gio.read_targets(args.targets) if args.targets else []
    if args.half_window < 0:
        raise UsageError("--half-window must be >= 0")
    excluded = exclusion_mask(targets, interest.rows, interest.cols, args.half_window)

    describe_rows = [_describe_row(Path(args.interest).stem, interest)]
    quality_rows = []
    for path in args.predicted:
        predicted = gio.read_raster(path)
        describe_rows.append(_describe_row(Path(path).stem, predicted))
        quality_rows.append(_quality_row(Path(path).stem, interest, predicted, excluded))

    _print_csv(DESCRIBE_COLUMNS, describe_rows)
    if quality_rows:
        print()
        _print_csv(QUALITY_COLUMNS, quality_rows)
    if args.describe_out:
        _write_csv(args.describe_out, DESCRIBE_COLUMNS, describe_rows)
    if args.quality_out and quality_rows:
        _write_csv(args.quality_out, QUALITY_COLUMNS, quality_rows)
    return 0


def cmd_detect(args) -> int:
    params = _cda_params(args)
    reference = gio.read_raster(args.reference)
    surveillance = gio.read_raster(args.surveillance)
    detections = detect(surveillance, reference, params)
    gio.write_detections(detections, args.out)
    print(f"{len(detections)} detections")
    return 0


def cmd_evaluate(args) -> int:
    _check_positive(args.radius, "--radius")
    _check_positive(args.area, "--area")
    if not args.case:
        raise UsageError("at least one --case DETECTIONS TARGETS is required")
    rows, total_det, total_known, total_fa = [], 0, 0, 0
    for i, (det_path, tgt_path) in enumerate(args.case, start=1):
        detections = gio.read_detections(det_path)
        targets = gio.read_targets(tgt_path)
        result = match(detections, targets, args.radius)
        known = len(targets)
        pd = score(result, known, args.area)[0] if known else 0.0
        rows.append([str(i), "1", known, result.detected, gio.fmt(pd), len(result.false_alarms)])
        total_det += result.detected
        total_known += known
        total_fa += len(result.false_alarms)
    _print_csv(gio.CASE_COLUMNS, rows)
    area = args.area * len(args.case)
    pd = total_det / total_known if total_known else 0.0
    print(f"total,,{total_known},{total_det},{gio.fmt(pd)},{total_fa}"
          f"  (FAR {gio.fmt(total_fa / area)} per km2 over {gio.fmt(area)} km2)")
    if args.out:
        _write_csv(args.out, gio.CASE_COLUMNS, rows)
    return 0


def _gather_roc_cases(args):
    cases = []
    if args.cases:
        cases.extend(_read_cases_manifest(args.cases))
    default_ref = gio.read_raster(args.reference) if args.reference else None
    for i, items in enumerate(args.case or [], start=1):
        if len(items) not in (2, 3):
            raise UsageError("--case takes SURVEILLANCE TARGETS [REFERENCE]")
        if len(items) == 2 and default_ref is None:
            raise UsageError("--case without REFERENCE requires --reference")
        reference = gio.read_raster(items[2]) if len(items) == 3 else default_ref
        cases.append(Case(gio.read_raster(items[0]), reference, gio.read_targets(items[1]),
                          str(len(cases) + 1), "1"))
    return cases


def _run_roc(cases, c_values, params, radius, area, threads, out_dir_files):
    roc_path, cases_path, table_c = out_dir_files
    per_case = sweep_cases(cases, c_values, params, radius, threads)
    table = roc_table(per_case, c_values, area)
    gio.write_roc(table, roc_path)
    if cases_path is not None:
        k = list(c_values).index(table_c) if table_c in c_values else len(c_values) - 1
        gio.write_case_table(case_table(cases, per_case, k), cases_path)
    return table


def _print_roc(table):
    for r in table:
        print(f"C={gio.fmt(r.c_constant)} lambda={gio.fmt(r.lam)} Pd={gio.fmt(r.pd)} "
              f"({r.detected}/{r.known}) false_alarms={r.false_alarms} FAR={gio.fmt(r.far)}/km2")


def cmd_roc(args) -> int:
    _check_positive(args.radius, "--radius")
    _check_positive(args.area, "--area")
    c_values = [float(c) for c in args.C]
    if not c_values:
        raise UsageError("need at least one -C value")
    params = _cda_params(args, c=c_values[0])
    threads = _threads(args)
    cases = _gather_roc_cases(args)
    if not cases:
        raise UsageError("no cases given (use --case or --cases)")
    table = _run_roc(cases, c_values, params, args.radius, args.area, threads,
                     (args.out, args.cases_out, args.table_c))
    _print_roc(table)
    return 0


def _synth_config(args) -> SynthConfig:
    for flag in ("rows", "cols"):
        if getattr(args, flag) < 1:
            raise UsageError(f"--{flag} must be positive")
    if args.n_images < 2:
        raise UsageError("--n-images must be >= 2")
    return default_scenario(rows=args.rows, cols=args.cols, n_images=args.n_images,
                            seed=args.seed, n_targets=args.n_targets,
                            size_px=args.target_size, amplitude_boost=args.boost)


def _write_synth(result, out_dir: Path):
    out_dir = gio.ensure_dir(out_dir)
    paths = []
    for i, (image, targets) in enumerate(zip(result.stack.images, result.targets)):
        path = out_dir / f"img_{i:02d}.f32"
        gio.write_raster(image, path)
        gio.write_targets(targets, out_dir / f"targets_{i:02d}.csv")
        paths.append(path)
    return paths


def cmd_synth(args) -> int:
    result = generate(_synth_config(args))
    paths = _write_synth(result, Path(args.out))
    print(f"wrote {len(paths)} images to {args.out}")
    return 0


def cmd_pipeline(args) -> int:
    kind = _estimator(args)
    threads = _threads(args)
    c_values = [float(c) for c in args.C]
    params = _cda_params(args, c=args.table_c)
    _check_positive(args.radius, "--radius")

    out = gio.ensure_dir(args.out)
    if args.stack:
        if not (args.surveillance and args.targets):
            raise UsageError("--stack requires --surveillance and --targets")
        stack = _stack_from_paths(args.stack)
        surveillance = gio.read_raster(args.surveillance)
        targets = gio.read_targets(args.targets)
    else:
        result = generate(_synth_config(args))
        _write_synth(result, out / "stack")
        stack, surveillance, targets = result.stack, result.stack.images[0], result.targets[0]

    predicted = predict_scene(stack, kind, threads=threads)
    gio.write_raster(predicted, out / "gsp.f32")

    excluded = exclusion_mask(targets, surveillance.rows, surveillance.cols, DEFAULT_HALF_WINDOW)
    _write_csv(out / "describe.csv", DESCRIBE_COLUMNS,
               [_describe_row("interest", surveillance), _describe_row(kind.name, predicted)])
    _write_csv(out / "quality.csv", QUALITY_COLUMNS,
               [_quality_row(kind.name, surveillance, predicted, excluded)])

    detections = detect(surveillance, predicted, params)
    gio.write_detections(detections, out / "detections.csv")

    area = args.area if args.area is not None else surveillance.area_km2
    _check_positive(area, "--area")
    cases = [Case(surveillance, predicted, targets, "1", "1")]
    table = _run_roc(cases, c_values, params, args.radius, area, threads,
                     (out / "roc.csv", out / "cases.csv", args.table_c))
    _print_roc(table)
    return 0


# -- parser -------------------------------------------------------------------------

def _add_threads(p):
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $GSPCD_THREADS or 1); never changes output")


def _add_estimator(p, required=True):
    p.add_argument("--est", choices=ESTIMATORS, required=required, default=None if required else "median",
                   help="ground scene estimator")
    p.add_argument("--alpha", type=float, default=0.3, help="trimming proportion in [0, 0.5)")
    p.add_argument("--centered", action="store_true",
                   help="AR only: fit on mean-removed samples")


def _add_cda(p, with_c=True):
    if with_c:
        p.add_argument("-C", type=float, default=5.0, help="threshold constant")
    p.add_argument("--opening", type=int, default=3, help="opening square size")
    p.add_argument("--dilation", type=int, default=7, help="dilation square size")
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8)


def _add_eval(p, area_default=6.0):
    p.add_argument("--radius", type=float, default=DEFAULT_MATCH_RADIUS_PX,
                   help="match radius in pixels")
    p.add_argument("--area", type=float, default=area_default, help="area per image in km2")


def _add_synth(p):
    p.add_argument("--rows", type=int, default=300)
    p.add_argument("--cols", type=int, default=200)
    p.add_argument("--n-images", type=int, default=8)
    p.add_argument("--n-targets", type=int, default=25)
    p.add_argument("--target-size", type=int, default=10)
    p.add_argument("--boost", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gspcd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gsp", help="predict the ground scene from a stack")
    _add_estimator(p)
    p.add_argument("--out", required=True, help="output raster (.f32; .hdr written alongside)")
    p.add_argument("inputs", nargs="+", help="stack rasters (.f32)")
    _add_threads(p)
    p.set_defaults(func=cmd_gsp)

    p = sub.add_parser("stats", help="descriptive statistics and prediction quality")
    p.add_argument("interest", help="interest (surveillance) raster")
    p.add_argument("predicted", nargs="*", help="predicted rasters to compare")
    p.add_argument("--targets", help="targets CSV; their regions are excluded from quality")
    p.add_argument("--half-window", type=int, default=DEFAULT_HALF_WINDOW)
    p.add_argument("--describe-out")
    p.add_argument("--quality-out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("detect", help="change detection against a reference")
    p.add_argument("--reference", required=True)
    p.add_argument("--surveillance", required=True)
    p.add_argument("--out", required=True, help="detections CSV")
    _add_cda(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("evaluate", help="score detection CSVs against targets")
    p.add_argument("--case", nargs=2, action="append", metavar=("DETECTIONS", "TARGETS"))
    p.add_argument("--out", help="per-case table CSV")
    _add_eval(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("roc", help="sweep C over cases and write a ROC table")
    p.add_argument("--case", nargs="+", action="append",
                   metavar="PATH", help="SURVEILLANCE TARGETS [REFERENCE]")
    p.add_argument("--cases", help="manifest CSV: mission,pass,surveillance,reference,targets")
    p.add_argument("--reference", help="reference raster shared by --case entries")
    p.add_argument("-C", type=float, nargs="*", default=list(DEFAULT_C_VALUES))
    p.add_argument("--table-c", type=float, default=5.0, help="C used for the per-case table")
    p.add_argument("--out", required=True, help="ROC CSV")
    p.add_argument("--cases-out", help="per-case table CSV")
    _add_cda(p, with_c=False)
    _add_eval(p)
    _add_threads(p)
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("synth", help="write a synthetic stack with planted targets")
    p.add_argument("--out", required=True, help="output directory")
    _add_synth(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("pipeline", help="synth or ingest -> gsp -> detect -> evaluate")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--synth-default", action="store_true",
                   help="use the default synthetic scenario (the default without --stack)")
    p.add_argument("--stack", nargs="+", help="stack rasters to ingest instead of synthesising")
    p.add_argument("--surveillance")
    p.add_argument("--targets")
    _add_estimator(p, required=False)
    _add_cda(p, with_c=False)
    p.add_argument("-C", type=float, nargs="*", default=list(DEFAULT_C_VALUES))
    p.add_argument("--table-c", type=float, default=5.0)
    _add_eval(p, area_default=None)
    _add_synth(p)
    _add_threads(p)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (GspcdError, ValueError, OSError, KeyError) as exc:
        print(f"gspcd: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
