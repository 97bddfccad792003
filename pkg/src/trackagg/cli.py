"""Command-line front end.

Subcommands: generate | aggregate | evaluate | experiment | plot |
counterexample. Exit codes: 0 success (a detected cycle is success),
2 usage error, 3 data error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .evaluation import CSV_COLUMNS, evaluate
from .experiment import (DEFAULT_NOISE_STACK, ExperimentSpec, read_results,
                         run_sweep, write_results)
from .geometry import GeometryError, Trajectory
from .io import DataError, parse_gpx, read_csv, write_csv
from .miaa import (AggMode, MasterMode, MatchMode, MiaaConfig, RepresentMode,
                   miaa_run)
from .noisesim import (NoiseLayer, SimulationError, TrackShape,
                       apply_noise_stack, generate_base_track)
from . import plots

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


def _load_json_arg(arg: str) -> dict:
    """--config accepts a JSON file path or an inline JSON object."""
    p = Path(arg)
    try:
        if p.exists():
            return json.loads(p.read_text())
        return json.loads(arg)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read config {arg!r}: {exc}") from exc


def _read_trajectory(path: str) -> Trajectory:
    if str(path).lower().endswith(".gpx"):
        segs = parse_gpx(path)
        if len(segs) > 1:
            raise DataError(f"{path}: expected a single segment, found {len(segs)}")
        return segs[0]
    return read_csv(path)


def _noise_stack_from(cfg: dict | None):
    if cfg and "noise_stack" in cfg:
        return [NoiseLayer.from_dict(l) for l in cfg["noise_stack"]]
    return list(DEFAULT_NOISE_STACK)


# --- subcommands ----------------------------------------------------------

def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = _load_json_arg(args.config) if args.config else None
    stack = _noise_stack_from(cfg)
    shape = TrackShape(args.shape)
    rng = np.random.default_rng(args.seed)
    truth = generate_base_track(shape, args.length, rng)
    write_csv(truth, out / "truth.csv", ["ground truth", f"shape={shape.value}"])
    files = ["truth.csv"]
    for k in range(args.n):
        noised = apply_noise_stack(truth, stack, rng)
        name = f"track_{k:02d}.csv"
        write_csv(noised, out / name, [f"noised replicate {k}"])
        files.append(name)
    manifest = {
        "seed": args.seed,
        "shape": shape.value,
        "length_m": args.length,
        "n": args.n,
        "noise_stack": [l.to_dict() for l in stack],
        "files": files,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(files)} tracks to {out}")
    return EXIT_OK


def cmd_aggregate(args) -> int:
    cfg = MiaaConfig.from_dict(_load_json_arg(args.config)) if args.config else MiaaConfig()
    tracks = [_read_trajectory(p) for p in args.inputs]
    result = miaa_run(tracks, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(result.aggregated, out / "aggregate.csv",
              [f"termination={result.termination.value}"])
    report = {
        "iterations": result.iterations,
        "termination": result.termination.value,
        "per_iteration_deltas": result.per_iteration_deltas,
        "cycle_period": result.cycle_period,
        "config": cfg.to_dict(),
        "inputs": list(args.inputs),
    }
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    print(f"termination={result.termination.value} iterations={result.iterations}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    agg = _read_trajectory(args.aggregate)
    truth = _read_trajectory(args.truth)
    report = evaluate(agg, truth, metadata={"aggregate": args.aggregate, "truth": args.truth})
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "evaluation.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    (out / "evaluation.csv").write_text(
        ",".join(CSV_COLUMNS) + "\n" + report.to_csv_row() + "\n")
    plots.plot_trajectories([agg], ["aggregate"], out / "evaluation.svg", truth=truth)
    print(f"rmse_m={report.rmse_m:.4f} shape_deviation_m={report.shape_deviation_m:.4f}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    spec = ExperimentSpec.from_dict(_load_json_arg(args.config)) if args.config else ExperimentSpec()
    if args.seed is not None:
        spec = ExperimentSpec.from_dict({**spec.to_dict(), "master_seed": args.seed})
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "spec.json").write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
    rows = run_sweep(spec, jobs=args.jobs)
    write_results(rows, out / "results.csv")
    written = plots.plot_results(rows, out)
    failed = sum(1 for r in rows if r["error"])
    print(f"{len(rows)} cells ({failed} failed) -> {out / 'results.csv'}; "
          f"plots: {', '.join(p.name for p in written)}")
    return EXIT_OK


def cmd_plot(args) -> int:
    rows = read_results(args.results)
    written = plots.plot_results(rows, args.out)
    print(f"plots: {', '.join(str(p) for p in written)}")
    return EXIT_OK


COUNTEREXAMPLE_X = [(68.0, 20.0), (69.0, 22.0), (69.0, 24.0), (67.0, 25.0)]
COUNTEREXAMPLE_Y = [(71.0, 14.0), (71.0, 16.0), (72.0, 19.0), (70.0, 22.0)]
COUNTEREXAMPLE_CONFIG = MiaaConfig(
    master_mode=MasterMode.MIN_SUM_DISTANCE,
    match_mode=MatchMode.DTW_L1,
    represent_mode=RepresentMode.BARYCENTRE,
    agg_mode=AggMode.MARGINAL_MEDIAN,
    anchor=True,
)


def cmd_counterexample(args) -> int:
    """The two-trace configuration on which the iteration oscillates forever."""
    X = Trajectory.from_points(COUNTEREXAMPLE_X, ident="X")
    Y = Trajectory.from_points(COUNTEREXAMPLE_Y, ident="Y")
    result = miaa_run([X, Y], COUNTEREXAMPLE_CONFIG)
    report = {
        "termination": result.termination.value,
        "iterations": result.iterations,
        "cycle_period": result.cycle_period,
        "per_iteration_deltas": result.per_iteration_deltas,
        "masters": [m.xy.tolist() for m in result.masters],
        "aggregated": result.aggregated.xy.tolist(),
        "config": COUNTEREXAMPLE_CONFIG.to_dict(),
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "counterexample.json").write_text(json.dumps(report, indent=2) + "\n")
        write_csv(result.aggregated, out / "counterexample.csv",
                  [f"termination={result.termination.value}"])
    print(f"termination={result.termination.value} period={result.cycle_period} "
          f"iterations={result.iterations}")
    return EXIT_OK


# --- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="trackagg",
                                 description="GNSS trajectory aggregation toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="simulate a ground-truth track and noisy replicates")
    g.add_argument("--shape", choices=[s.value for s in TrackShape], default="moderate")
    g.add_argument("--length", type=float, default=300.0, help="target length in meters")
    g.add_argument("-n", type=int, default=5, help="number of noisy replicates")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="out")
    g.add_argument("--config", help="JSON (file or inline) with a noise_stack list")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("aggregate", help="aggregate trajectories into one track")
    a.add_argument("inputs", nargs="+", help="CSV or GPX trajectory files")
    a.add_argument("--config", help="JSON (file or inline) aggregation config")
    a.add_argument("--out", default="out")
    a.set_defaults(func=cmd_aggregate)

    e = sub.add_parser("evaluate", help="compare an aggregate against ground truth")
    e.add_argument("aggregate")
    e.add_argument("truth")
    e.add_argument("--out", default="out")
    e.set_defaults(func=cmd_evaluate)

    x = sub.add_parser("experiment", help="run the full calibration sweep")
    x.add_argument("--config", help="JSON (file or inline) experiment spec")
    x.add_argument("--seed", type=int, help="override the spec's master seed")
    x.add_argument("--jobs", type=int, default=1)
    x.add_argument("--out", default="out")
    x.set_defaults(func=cmd_experiment)

    p = sub.add_parser("plot", help="regenerate sweep figures from a results CSV")
    p.add_argument("results")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_plot)

    c = sub.add_parser("counterexample", help="reproduce the non-converging two-trace cycle")
    c.add_argument("--out")
    c.set_defaults(func=cmd_counterexample)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SimulationError, GeometryError, np.linalg.LinAlgError,
            FloatingPointError, AssertionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
