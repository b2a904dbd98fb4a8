"""Command-line front end: solve, sweep and dump-mesh subcommands."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import analysis, output
from .config import ConfigError, MeshConfig, parse_config
from .geometry import classify, generate_mesh


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fgmbuckle",
        description="Critical buckling loads and temperatures of graded "
                    "plates with cracks and cutouts")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("solve", "run the configured single analysis"),
                        ("sweep", "run the configured parameter sweep"),
                        ("dump-mesh", "write the element classification CSV")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="path to the JSON configuration")
        p.add_argument("--mesh", nargs=2, type=int, metavar=("NX", "NY"),
                       help="override the mesh subdivision")
        p.add_argument("--output", metavar="DIR",
                       help="override the output directory")
    return parser


def _load_config(args):
    config = parse_config(args.config)
    if args.mesh:
        config = replace(config, mesh=MeshConfig(nx=args.mesh[0], ny=args.mesh[1]))
    if args.output:
        config = replace(config, output=replace(config.output, directory=args.output))
    return config


def _print_result(result: analysis.AnalysisResult) -> None:
    print(f"{result.label} = {result.normalized:.6g}  "
          f"(raw = {result.raw:.6g}, dofs = {result.n_dofs}, "
          f"residual = {result.residual:.2e})")


def _outdir(config) -> Path:
    directory = Path(config.output.directory)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def _cmd_solve(config) -> int:
    result = analysis.run(config, keep_mode=config.output.mode_shape)
    _print_result(result)
    directory = _outdir(config)
    output.results_to_csv([result], directory / config.output.csv)
    if config.output.mode_shape:
        mesh = generate_mesh(config.plate, config.mesh.nx, config.mesh.ny)
        output.write_vtk_mode(directory / "mode.vtk", mesh, result.mode_w0)
    return 0


def _cmd_sweep(config) -> int:
    if config.sweep is None:
        print("error: configuration has no sweep block", file=sys.stderr)
        return 2
    records = analysis.sweep(config)
    failures = [r for r in records if isinstance(r, analysis.SweepFailure)]
    for rec in records:
        if isinstance(rec, analysis.AnalysisResult):
            point = " ".join(f"{k}={v:g}" for k, v in rec.sweep_point.items())
            print(f"[{point}] {rec.label} = {rec.normalized:.6g}")
        else:
            point = " ".join(f"{k}={v:g}" for k, v in rec.sweep_point.items())
            print(f"[{point}] FAILED: {rec.message}")
    directory = _outdir(config)
    output.results_to_csv(records, directory / config.output.csv)
    print(f"{len(records) - len(failures)} of {len(records)} points completed; "
          f"results in {directory / config.output.csv}")
    return 0 if not failures else 1


def _cmd_dump_mesh(config) -> int:
    mesh = generate_mesh(config.plate, config.mesh.nx, config.mesh.ny)
    enrichment = classify(mesh, config.defects)
    directory = _outdir(config)
    path = directory / "mesh_classes.csv"
    output.dump_mesh_csv(path, mesh, enrichment)
    counts = enrichment.class_counts()
    print("element classes:", ", ".join(f"{k}: {v}" for k, v in sorted(counts.items())))
    print(f"classification written to {path}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load_config(args)
    except ConfigError as exc:
        print(f"configuration error:\n{exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "solve":
            return _cmd_solve(config)
        if args.command == "sweep":
            return _cmd_sweep(config)
        return _cmd_dump_mesh(config)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
