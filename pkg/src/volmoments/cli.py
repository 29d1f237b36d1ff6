"""Command line interface: compute, verify, bench, project."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness, projection, volume as vol
from .errors import FormatError, InconsistencyError


def _parse_triple(text: str, cast, what: str):
    parts = text.replace(",", " ").split()
    if len(parts) != 3:
        raise ValueError(f"{what} needs three comma-separated values, got {text!r}")
    return tuple(cast(p) for p in parts)


def _add_volume_args(parser: argparse.ArgumentParser) -> None:
    src = parser.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="raw or .nrrd volume file")
    src.add_argument("--synth", metavar="KIND",
                     help="synthetic volume: uniform:V | delta:X,Y,Z,V | "
                          "random:DEPTH | ellipsoid:CX,CY,CZ,A,B,C,V")
    parser.add_argument("--meta", help="key=value sidecar for a raw --input")
    parser.add_argument("--dims", help="L,M,N voxel counts (raw input or --synth)")
    parser.add_argument("--depth", type=int, choices=(8, 16), default=8,
                        help="bit depth for raw input without --meta")
    parser.add_argument("--byte-order", default="little", choices=("little",))
    parser.add_argument("--spacing", help="physical spacing x,y,z (default 1,1,1)")
    parser.add_argument("--seed", type=int, default=0)


def _load_volume(args) -> vol.Volume:
    spacing = _parse_triple(args.spacing, float, "--spacing") if args.spacing else None
    if args.synth:
        if not args.dims:
            raise ValueError("--synth requires --dims")
        dims = _parse_triple(args.dims, int, "--dims")
        return vol.synth(args.synth, dims, args.seed, spacing=spacing or (1.0, 1.0, 1.0))
    path = Path(args.input)
    if path.suffix.lower() == ".nrrd":
        v = vol.load_nrrd(path)
    else:
        if args.meta:
            meta = vol.meta_from_header_file(args.meta)
        elif args.dims:
            meta = vol.VolumeMeta(
                dims=_parse_triple(args.dims, int, "--dims"),
                bit_depth=args.depth,
                byte_order=args.byte_order,
            )
        else:
            raise ValueError("raw --input requires --meta or --dims/--depth")
        v = vol.load_raw(path, meta)
    if spacing is not None:
        v = vol.Volume(v.voxels, spacing)
    return v


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cmd_compute(args) -> int:
    v = _load_volume(args)
    spacing = _parse_triple(args.spacing, float, "--spacing") if args.spacing else None
    report = harness.feature_report(v, args.order, args.engine, spacing)
    _emit(json.dumps(report, indent=2), args.output)
    return 0


def _cmd_verify(args) -> int:
    dims = _parse_triple(args.dims, int, "--dims")
    orders = (args.order,) if args.order else (3, 4)
    result = harness.verify_engines(dims, args.seeds, orders, args.depth)
    for div in result.divergences:
        print(div.describe())
    status = "ok" if result.ok else "FAILED"
    print(f"verify {status}: {result.checked} engine comparisons on dims "
          f"{dims[0]}x{dims[1]}x{dims[2]}, {args.seeds} seeds")
    return 0 if result.ok else 1


def _cmd_bench(args) -> int:
    progress = (lambda msg: print(f"  {msg}", file=sys.stderr)) if args.verbose else None
    report = harness.run_bench(
        max_size_mb=args.max_size_mb,
        orders=tuple(int(o) for o in args.orders.split(",")),
        repetitions=args.repetitions,
        seed=args.seed,
        min_size_mb=args.min_size_mb,
        progress=progress,
    )
    if args.csv:
        Path(args.csv).write_text(harness.bench_csv(report))
    if args.format == "csv":
        _emit(harness.bench_csv(report), args.output)
    elif args.format == "json":
        _emit(json.dumps(harness.bench_json(report), indent=2), args.output)
    else:
        _emit(harness.bench_markdown(report), args.output)
    return 0


def _cmd_project(args) -> int:
    v = _load_volume(args)
    if args.orientation == "all":
        wanted = list(projection.Orientation)
    else:
        wanted = [projection.Orientation(args.orientation)]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    images = projection.project_subset(v, tuple(wanted))
    for orientation, image in images.items():
        path = out_dir / f"{args.prefix}{orientation.value}.pgm"
        projection.write_pgm(image, path)
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="volmoments",
        description="3D raw moments of volumetric images via discrete projections",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", help="moments and features of one volume")
    _add_volume_args(p_compute)
    p_compute.add_argument("--order", type=int, choices=(3, 4), default=4)
    p_compute.add_argument("--engine", choices=("naive", "factored", "dpm"), default="dpm")
    p_compute.add_argument("--output", help="write the JSON report here instead of stdout")
    p_compute.set_defaults(fn=_cmd_compute)

    p_verify = sub.add_parser("verify", help="compare all engines on random volumes")
    p_verify.add_argument("--dims", default="64,64,64")
    p_verify.add_argument("--seeds", type=int, default=10)
    p_verify.add_argument("--order", type=int, choices=(3, 4))
    p_verify.add_argument("--depth", type=int, choices=(8, 16), default=8)
    p_verify.set_defaults(fn=_cmd_verify)

    p_bench = sub.add_parser("bench", help="timing and op-count sweep")
    p_bench.add_argument("--max-size-mb", type=int, default=128)
    p_bench.add_argument("--min-size-mb", type=int, default=1)
    p_bench.add_argument("--orders", default="3,4")
    p_bench.add_argument("--repetitions", type=int, default=9)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--threads", choices=("1", "auto"), default="1",
                         help="engines are single-threaded; accepted for compatibility")
    p_bench.add_argument("--csv", help="also write the CSV artifact to this path")
    p_bench.add_argument("--format", choices=("md", "csv", "json"), default="md")
    p_bench.add_argument("--output", help="write stdout payload here instead")
    p_bench.add_argument("--verbose", action="store_true")
    p_bench.set_defaults(fn=_cmd_bench)

    p_project = sub.add_parser("project", help="dump projection images as 16-bit PGM")
    _add_volume_args(p_project)
    p_project.add_argument("--orientation", default="all",
                           choices=("xy", "yz", "zx", "diag", "anti", "all"))
    p_project.add_argument("--out-dir", default=".")
    p_project.add_argument("--prefix", default="projection_")
    p_project.set_defaults(fn=_cmd_project)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (FormatError, InconsistencyError, ValueError, OverflowError, OSError) as exc:
        error = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(error), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
