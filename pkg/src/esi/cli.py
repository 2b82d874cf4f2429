"""Command line entry point: ``esi {simulate,reconstruct,compare,bench}``.

Exit status: 0 on success, 1 on a runtime failure, 2 on a usage or
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import bench, evio, metrics, synth
from .baselines import METHODS, make_reconstructor
from .config import SCHEMA, ConfigError, load_config
from .errors import EsiError, NegativeInterval
from .events import DAVIS346, EventBatch, SensorGeometry

_BOOL_KEYS = {"strict_time", "pipelined"}


class UsageError(Exception):
    pass


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key-value config file (default: $ESI_CONFIG)")
    for key in SCHEMA:
        flag = "--" + key.replace("_", "-")
        if key == "method":
            p.add_argument(flag, dest=key, choices=list(METHODS))
        elif key in _BOOL_KEYS:
            p.add_argument(flag, dest=key, action="store_const", const="true")
        else:
            p.add_argument(flag, dest=key, metavar=key.upper())
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="esi", description="Event-stream intensity reconstruction")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()
    sub.add_parser("simulate", parents=[common], help="generate a synthetic event stream")
    sub.add_parser("reconstruct", parents=[common], help="events -> numbered PGM frames")
    sub.add_parser("compare", parents=[common], help="score several methods against ground truth")
    sub.add_parser("bench", parents=[common], help="throughput and per-frame timing")
    return parser


# -- helpers ---------------------------------------------------------------------

def _scene(cfg) -> synth.SceneSpec:
    geometry = SensorGeometry(cfg["width"] or 128, cfg["height"] or 128)
    circle = synth.Circle(cfg["radius"], cfg["reflectivity"], (cfg["center_x"], cfg["center_y"]),
                          cfg["velocity"])
    return synth.SceneSpec(geometry, cfg["bg_min"], cfg["bg_max"], circle, cfg["duration"],
                           cfg["lead_time"])


def _recon_params(cfg) -> dict:
    return dict(threshold=cfg["threshold"], s_min=cfg["smin"], s_max=cfg["smax"],
                frame_rate=cfg["fps"], k=cfg["k"], b=cfg["b"], rate=cfg["lambda"],
                alpha=cfg["alpha"])


def _event_path(cfg, default_name: str) -> Path:
    if cfg["output"]:
        return Path(cfg["output"])
    ext = ".csv" if cfg["format"] == "csv" else ".bin"
    return Path(cfg["output_dir"]) / (default_name + ext)


def _load_input(cfg) -> tuple[SensorGeometry, EventBatch]:
    if not cfg["input"]:
        raise UsageError("no input event file given (--input)")
    geometry, batch = evio.read_events(cfg["input"], cfg["format"], strict=cfg["strict_time"])
    if geometry is None:
        geometry = SensorGeometry(cfg["width"] or DAVIS346.width, cfg["height"] or DAVIS346.height)
    batch.validate(geometry)
    return geometry, batch


def _with_span(batch: EventBatch, t_start, t_end) -> EventBatch:
    if t_start is None and t_end is None:
        return batch
    return EventBatch(batch.t, batch.x, batch.y, batch.p,
                      t_start=t_start if t_start is not None else batch.t_start,
                      t_end=t_end if t_end is not None else batch.t_end, check=False)


def _reconstruct(method, geometry, batch, cfg, origin=None):
    r = make_reconstructor(method, geometry, origin=origin, **_recon_params(cfg))
    return r.process_events(batch)


# -- subcommands -------------------------------------------------------------

def cmd_simulate(cfg) -> int:
    scene = _scene(cfg)
    noise = synth.NoiseSpec(cfg["noise_rate"], cfg["hot_pixels"], cfg["seed"])
    batch = synth.generate_events(scene, synth.TriggerModel(cfg["threshold"]), noise,
                                  cfg["dt_sample"])
    path = _event_path(cfg, "events")
    path.parent.mkdir(parents=True, exist_ok=True)
    evio.write_events(path, batch, scene.geometry, cfg["format"])
    print(f"events: {len(batch)}  duration: {scene.duration:g} s  -> {path}")
    if cfg["truth_out"]:
        period = 1e6 / cfg["fps"]
        n = int(math.ceil(scene.duration * cfg["fps"] - 1e-9))
        t_us = np.array([int(round(i * period)) for i in range(n)], dtype=np.int64)
        truth = np.stack(synth.replay_ground_truth(scene, t_us / 1e6)).astype(np.float32)
        np.savez_compressed(cfg["truth_out"], t_us=t_us, log_intensity=truth)
        print(f"ground truth: {n} fields -> {cfg['truth_out']}")
    return 0


def cmd_reconstruct(cfg) -> int:
    geometry, batch = _load_input(cfg)
    batch = _with_span(batch, cfg["origin"], cfg["t_end"])
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    frames = _reconstruct(cfg["method"], geometry, batch, cfg, origin=cfg["origin"])
    with open(out / "manifest.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["index", "t_us", "path"])
        for i, fr in enumerate(frames, 1):
            name = f"frame_{i:06d}.pgm"
            evio.write_frame_pgm(fr, out / name)
            w.writerow([i, fr.t_emit, name])
    print(f"{cfg['method']}: {len(batch)} events -> {len(frames)} frames in {out}")
    return 0


def _truth_provider(t_us: np.ndarray, fields: np.ndarray):
    tol = (np.median(np.diff(t_us)) / 2) if len(t_us) > 1 else 0

    def provide(t):
        i = int(np.argmin(np.abs(t_us - t)))
        return fields[i] if abs(int(t_us[i]) - t) <= tol else None

    return provide


def cmd_compare(cfg) -> int:
    if not cfg["truth"]:
        raise UsageError("compare needs ground truth (--truth file.npz from 'esi simulate --truth-out')")
    try:
        with np.load(cfg["truth"]) as z:
            t_us = z["t_us"].astype(np.int64)
            fields = z["log_intensity"]
    except (OSError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot read ground truth {cfg['truth']}: {exc}") from None
    methods = cfg["methods"]
    if len(methods) < 2:
        raise UsageError("compare needs at least two methods")
    geometry, batch = _load_input(cfg)
    if fields.shape[1:] != geometry.shape:
        raise UsageError(f"ground truth shape {fields.shape[1:]} does not match sensor {geometry.shape}")
    origin = cfg["origin"] if cfg["origin"] is not None else int(t_us[0])
    t_end = cfg["t_end"] if cfg["t_end"] is not None else int(t_us[-1]) + 1
    batch = _with_span(batch, origin, max(t_end, batch.t_end or t_end))
    provide = _truth_provider(t_us, fields)
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    summary = []
    for m in methods:
        frames = _reconstruct(m, geometry, batch, cfg, origin=origin)
        run = metrics.score_run(frames, provide)
        rows += [(m, s) for s in run.scores]
        summary.append((m, run))
    with open(out / "scores.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["method", "t_us", "pearson", "mse_norm"])
        for m, s in rows:
            w.writerow([m, s.t, metrics.format_optional(s.pearson), metrics.format_optional(s.mse_norm)])
    print(f"{'method':<12}{'mean r':>10}{'min r':>10}{'scored':>8}{'missing':>9}")
    for m, run in summary:
        mean = "n/a" if run.mean_pearson is None else f"{run.mean_pearson:.4f}"
        mn = "n/a" if run.min_pearson is None else f"{run.min_pearson:.4f}"
        print(f"{m:<12}{mean:>10}{mn:>10}{run.n_scored:>8}{run.n_missing:>9}")
    return 0


def cmd_bench(cfg) -> int:
    if cfg["input"]:
        geometry, batch = _load_input(cfg)
    else:
        geometry = SensorGeometry(cfg["width"] or DAVIS346.width, cfg["height"] or DAVIS346.height)
        batch = bench.uniform_stream(cfg["n_events"], geometry, cfg["event_rate"], cfg["seed"])
    methods = [cfg["method"]]
    params = _recon_params(cfg)
    params.pop("frame_rate")
    reports = []
    for m in methods:
        rep = bench.bench_throughput(m, batch, geometry, cfg["repeats"], fps=cfg["fps"],
                                     pipelined=cfg["pipelined"], **params)
        rep.per_frame_time = bench.bench_frame_time(m, batch, geometry, cfg["fps_list"], **params)
        reports.append(rep)
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    bench.write_report_csv(out / "bench.csv", reports)
    text = "\n\n".join(bench.format_report(r) for r in reports)
    (out / "bench.txt").write_text(text + "\n")
    print(text)
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "compare": cmd_compare,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    overrides = {k: getattr(args, k) for k in SCHEMA}
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"esi: error: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"esi: error: {exc}", file=sys.stderr)
        return 2
    except NegativeInterval as exc:
        where = f" at event index {exc.index}" if exc.index is not None else ""
        print(f"esi: out-of-order timestamp{where}: {exc}", file=sys.stderr)
        return 1
    except (EsiError, OSError, ValueError) as exc:
        print(f"esi: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
