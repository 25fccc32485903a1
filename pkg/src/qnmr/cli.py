"""Command line front end for the simulation pipeline.

Five subcommands cover the pipeline end to end: ``simulate`` produces an
FID from a config, ``spectrum`` turns an FID file into a 1D spectrum,
``depth-stats`` reports transpiled-circuit structure without simulating,
``shot-protocol`` runs the budget sweep, and ``compare`` prints error
metrics between two series. Every failure maps to a stable exit code:
2 usage, 3 input data, 4 capability limits, 5 numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .circuits import observable_circuit
from .errors import QnmrError, UsageError
from .experiment import (
    load_experiment_config,
    prepare_experiment,
    run_simulation,
)
from .shots_protocol import DEFAULT_SHOTS_GRID, shot_budget_sweep
from .spectrum import (
    cosine_similarity,
    mse,
    peak_positions,
    read_fid_csv,
    to_spectrum,
    write_fid_csv,
    write_spectrum_csv,
    write_svg_plot,
)
from .transpile.pipeline import TranspileOptions, transpile
from .transpile.report import REPORT_FIELDS, depth_statistics, report_from_circuit


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _apply_overrides(cfg, args):
    changes = {}
    if getattr(args, "points", None) is not None:
        changes["points"] = args.points
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "label", None) is not None:
        changes["label"] = args.label
    return dataclasses.replace(cfg, **changes) if changes else cfg


def _workspace(args) -> str:
    if args.workspace is not None:
        return args.workspace
    return os.path.dirname(os.path.abspath(args.config))


def _outdir(args, workspace: str) -> str:
    out = args.outdir if args.outdir is not None else workspace
    os.makedirs(out, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    cfg = _apply_overrides(load_experiment_config(args.config), args)
    workspace = _workspace(args)
    started = time.perf_counter()
    result = run_simulation(cfg, workspace, workers=args.workers)
    total = time.perf_counter() - started
    outdir = _outdir(args, workspace)

    fid_path = os.path.join(outdir, f"{cfg.label}_fid.csv")
    write_fid_csv(fid_path, result.fid)

    setup = result.setup
    inputs = {"system": {"path": setup.system_path,
                         "sha256": _sha256_file(setup.system_path)}}
    if setup.noise_path is not None:
        inputs["noise"] = {"path": setup.noise_path,
                           "sha256": _sha256_file(setup.noise_path)}
    manifest = {
        "command": "simulate",
        "package": f"qnmr {__version__}",
        "config": cfg.as_dict(),
        "config_sha256": _sha256_file(args.config),
        "workspace": workspace,
        "inputs": inputs,
        "observed_indices": list(setup.observed),
        "reference_hz": setup.reference_hz,
        "acquisition_order": list(result.acquisition_order),
        "outputs": {"fid": {"path": os.path.basename(fid_path),
                            "sha256": _sha256_file(fid_path)}},
        "timing_seconds": {
            "total": total,
            "per_point": list(result.per_point_seconds),
        },
    }
    manifest_path = os.path.join(outdir, f"{cfg.label}_manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    per_point = result.per_point_seconds
    print(f"wrote {fid_path} ({cfg.points} points)")
    print(f"wrote {manifest_path}")
    print(f"total {total:.2f}s, per circuit pair mean {np.mean(per_point):.4f}s "
          f"max {max(per_point):.4f}s")
    return 0


def cmd_spectrum(args) -> int:
    fid = read_fid_csv(args.fid)
    spectrum = to_spectrum(
        fid,
        reference_hz=args.reference_mhz * 1e6,
        pad_factor=args.pad,
        apodization_hz=args.apodize_hz,
        carrier_ppm=args.carrier_ppm,
    )
    prefix = args.out
    if prefix is None:
        stem = args.fid
        for suffix in ("_fid.csv", ".csv"):
            if stem.endswith(suffix):
                stem = stem[: -len(suffix)]
                break
        prefix = stem
    spectrum_path = f"{prefix}_spectrum.csv"
    write_spectrum_csv(spectrum_path, spectrum)
    print(f"wrote {spectrum_path}")
    if args.svg:
        svg_path = f"{prefix}_spectrum.svg"
        write_svg_plot(
            svg_path, spectrum.ppm, spectrum.intensity,
            title=fid.label or "spectrum",
            x_label="ppm", y_label="intensity", flip_x=True,
        )
        print(f"wrote {svg_path}")
    peaks = peak_positions(spectrum, threshold=args.peak_threshold)
    print("peaks (ppm, intensity):")
    lookup = {float(p): i for i, p in enumerate(spectrum.ppm)}
    for p in peaks[: args.max_peaks]:
        print(f"  {p:12.4f}  {spectrum.intensity[lookup[float(p)]]:.6g}")
    if peaks.size == 0:
        print("  none above threshold")
    return 0


def cmd_depth_stats(args) -> int:
    cfg = _apply_overrides(load_experiment_config(args.config), args)
    if cfg.target == "logical":
        raise UsageError(
            "depth-stats needs a device target; set target = heavy-hex "
            "or all-to-all"
        )
    workspace = _workspace(args)
    setup = prepare_experiment(cfg, workspace)
    outdir = _outdir(args, workspace)

    stages: dict[str, list] = {"logical": [], "routed": [], "consolidated": []}
    rows = []
    for k in range(cfg.points):
        logical = observable_circuit(
            setup.hamiltonian, k * cfg.dwell_time, "X", setup.observed
        )
        routed = transpile(
            logical, setup.coupling_map,
            TranspileOptions(consolidate=False, decouple=False, seed=cfg.seed),
        )
        consolidated = transpile(
            logical, setup.coupling_map,
            TranspileOptions(decouple=cfg.decouple, seed=cfg.seed),
        )
        for stage, circuit in (
            ("logical", logical), ("routed", routed),
            ("consolidated", consolidated),
        ):
            stages[stage].append(circuit)
            row = {"time_index": k, "stage": stage}
            row.update(report_from_circuit(circuit).as_row())
            rows.append(row)

    depth_path = os.path.join(outdir, f"{cfg.label}_depth.csv")
    with open(depth_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=("time_index", "stage") + REPORT_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {depth_path}")

    hist_path = os.path.join(outdir, f"{cfg.label}_depth_hist.csv")
    with open(hist_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("stage", "two_qubit_depth", "count"))
        for stage in ("logical", "routed", "consolidated"):
            stats = depth_statistics(stages[stage])
            for depth, count in stats.histogram:
                writer.writerow((stage, depth, count))
            print(
                f"{stage}: {stats.count} circuits, two-qubit depth "
                f"mean {stats.mean:.2f} std {stats.std:.2f} "
                f"range {stats.minimum}..{stats.maximum}"
            )
    print(f"wrote {hist_path}")
    return 0


def _parse_grid(text: str) -> tuple[int, ...]:
    try:
        start, stop, step = (int(v) for v in text.split(":"))
        grid = tuple(range(start, stop + 1, step))
    except ValueError as exc:
        raise UsageError(f"grid must be start:stop:step, got {text!r}") from exc
    if not grid:
        raise UsageError(f"grid {text!r} is empty")
    return grid


def cmd_shot_protocol(args) -> int:
    cfg = _apply_overrides(load_experiment_config(args.config), args)
    if cfg.shots is None:
        raise UsageError("shot-protocol requires sampled mode")
    workspace = _workspace(args)
    setup = prepare_experiment(cfg, workspace)
    outdir = _outdir(args, workspace)
    grid = _parse_grid(args.grid) if args.grid else DEFAULT_SHOTS_GRID
    curve = shot_budget_sweep(
        setup.hamiltonian, cfg.dwell_time, cfg.points, setup.noise_model,
        observed=setup.observed, grid=grid,
        time_samples=args.time_samples, repeats=args.repeats,
        seed=cfg.seed, epsilon=args.epsilon,
    )
    points_path = os.path.join(outdir, f"{cfg.label}_shots.csv")
    with open(points_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("n_shots,time_index,mse\n")
        for n, row in zip(curve.grid, curve.point_mse):
            for k, value in zip(curve.time_indices, row):
                fh.write(f"{n},{k},{value!r}\n")
    curve_path = os.path.join(outdir, f"{cfg.label}_curve.csv")
    with open(curve_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("n_shots,mse\n")
        for n, value in zip(curve.grid, curve.mse):
            fh.write(f"{n},{value!r}\n")
    print(f"wrote {points_path}")
    print(f"wrote {curve_path}")
    print(f"selected budget: {curve.selected} shots "
          f"(epsilon {curve.epsilon}, {len(curve.time_indices)} sampled points)")
    return 0


def cmd_compare(args) -> int:
    a = read_fid_csv(args.series_a)
    b = read_fid_csv(args.series_b)
    if a.samples.size != b.samples.size:
        raise UsageError(
            f"length mismatch: {a.samples.size} vs {b.samples.size} rows"
        )

    def metric_row(name, xs, ys):
        return (
            name,
            mse(xs.real, ys.real),
            mse(xs.imag, ys.imag),
            cosine_similarity(xs.real, ys.real),
            cosine_similarity(xs.imag, ys.imag),
        )

    rows = [metric_row("full", a.samples, b.samples)]
    if args.window is not None:
        lo, hi = args.window
        if not 0 <= lo < hi <= a.samples.size:
            raise UsageError(
                f"window {lo}..{hi} outside series of {a.samples.size} rows"
            )
        rows.append(metric_row(f"{lo}..{hi}", a.samples[lo:hi], b.samples[lo:hi]))
    print("range        mse_re        mse_im        cos_re    cos_im")
    for name, mr, mi, cr, ci in rows:
        print(f"{name:<10} {mr:13.6e} {mi:13.6e} {cr:9.4f} {ci:9.4f}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="qnmr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"qnmr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a config and write its FID")
    sim.add_argument("config")
    sim.add_argument("--workspace", help="base for relative paths "
                     "(default: config directory)")
    sim.add_argument("--outdir", help="output directory (default: workspace)")
    sim.add_argument("--points", type=int, help="override config points")
    sim.add_argument("--seed", type=int, help="override config seed")
    sim.add_argument("--label", help="override output name stem")
    sim.add_argument("--workers", type=int, default=1,
                     help="process pool size for time points")
    sim.set_defaults(func=cmd_simulate)

    spec = sub.add_parser("spectrum", help="FFT an FID file into a spectrum")
    spec.add_argument("fid")
    spec.add_argument("--reference-mhz", type=float, required=True,
                      help="observed species reference frequency in MHz")
    spec.add_argument("--pad", type=int, default=1,
                      help="zero-padding factor (power-of-two multiples)")
    spec.add_argument("--apodize-hz", type=float, default=None,
                      help="exponential line broadening in Hz")
    spec.add_argument("--carrier-ppm", type=float, default=0.0,
                      help="ppm offset of the rotating frame")
    spec.add_argument("--peak-threshold", type=float, default=0.05,
                      help="peak table cutoff as a fraction of the maximum")
    spec.add_argument("--max-peaks", type=int, default=12)
    spec.add_argument("--svg", action="store_true", help="also write a plot")
    spec.add_argument("--out", help="output path prefix")
    spec.set_defaults(func=cmd_spectrum)

    depth = sub.add_parser("depth-stats",
                           help="transpile a config and report circuit shape")
    depth.add_argument("config")
    depth.add_argument("--workspace")
    depth.add_argument("--outdir")
    depth.add_argument("--points", type=int)
    depth.add_argument("--seed", type=int)
    depth.add_argument("--label")
    depth.set_defaults(func=cmd_depth_stats)

    protocol = sub.add_parser("shot-protocol",
                              help="sweep shot budgets and pick one")
    protocol.add_argument("config")
    protocol.add_argument("--workspace")
    protocol.add_argument("--outdir")
    protocol.add_argument("--points", type=int)
    protocol.add_argument("--seed", type=int)
    protocol.add_argument("--label")
    protocol.add_argument("--grid", help="start:stop:step shots grid")
    protocol.add_argument("--time-samples", type=int, default=20)
    protocol.add_argument("--repeats", type=int, default=3)
    protocol.add_argument("--epsilon", type=float, default=0.1)
    protocol.set_defaults(func=cmd_shot_protocol)

    compare = sub.add_parser("compare", help="error metrics between two FIDs")
    compare.add_argument("series_a")
    compare.add_argument("series_b")
    compare.add_argument("--window", nargs=2, type=int, metavar=("LO", "HI"),
                         help="also report metrics on rows LO..HI")
    compare.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except QnmrError as exc:
        print(f"qnmr: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"qnmr: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
