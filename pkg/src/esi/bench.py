"""Throughput and per-frame latency measurement for the reconstructors."""

from __future__ import annotations

import csv
import platform
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .baselines import METHODS, make_reconstructor
from .events import EventBatch, Frame, SensorGeometry
from .pipeline import packetize, run_pipeline
from .reconstruct import Reconstructor


class NullReconstructor(Reconstructor):
    """Does no per-event work and renders a constant frame; a timing floor."""

    method = "noop"

    def __init__(self, geometry: SensorGeometry, frame_rate: float = 100.0,
                 origin: int | None = None, **_):
        super().__init__(geometry, frame_rate, origin=origin)
        self._zero = np.zeros(geometry.shape)
        self._frame_px = np.full(geometry.shape, 128, dtype=np.uint8)
        self._frame_px.flags.writeable = False

    def _integrate(self, t, x, y, p) -> int:
        return -1

    def values(self, t_now: int) -> np.ndarray:
        return self._zero

    def render(self, t_now: int) -> Frame:
        return Frame(int(t_now), self._frame_px, self.geometry)

    def _clear(self) -> None:
        pass


BENCH_METHODS = (*METHODS, "noop")


def build(method: str, geometry: SensorGeometry, **params) -> Reconstructor:
    if method == "noop":
        return NullReconstructor(geometry, **params)
    return make_reconstructor(method, geometry, **params)


@dataclass
class FrameTiming:
    fps: float
    mean_ms: float | None
    p99_ms: float | None
    pct_of_period: float | None
    mean_events_per_frame: float
    n_frames: int


@dataclass
class BenchReport:
    method: str
    events_processed: int
    wall_time: float  # median seconds per full pass, frames emitted
    wall_time_no_emission: float
    per_frame_time: list[FrameTiming] = field(default_factory=list)
    pipelined_wall_time: float | None = None
    machine_note: str = ""

    @property
    def throughput(self) -> float | None:
        if not self.events_processed or self.wall_time <= 0:
            return None
        return self.events_processed / self.wall_time

    @property
    def throughput_no_emission(self) -> float | None:
        if not self.events_processed or self.wall_time_no_emission <= 0:
            return None
        return self.events_processed / self.wall_time_no_emission

    @property
    def throughput_pipelined(self) -> float | None:
        if not self.events_processed or not self.pipelined_wall_time:
            return None
        return self.events_processed / self.pipelined_wall_time


def machine_note() -> str:
    return f"{platform.processor() or platform.machine()} / {platform.python_implementation()} " \
           f"{platform.python_version()} / {platform.system()}"


def uniform_stream(n_events: int, geometry: SensorGeometry, rate: float = 12e6,
                   seed: int = 0) -> EventBatch:
    """Random events spread uniformly over the sensor at ``rate`` events/s."""
    rng = np.random.default_rng(seed)
    duration_us = max(1, int(round(n_events / rate * 1e6)))
    t = np.sort(rng.integers(0, duration_us, n_events))
    x = rng.integers(0, geometry.width, n_events)
    y = rng.integers(0, geometry.height, n_events)
    p = rng.integers(0, 2, n_events) * 2 - 1
    return EventBatch(t, x, y, p, t_start=0, t_end=duration_us)


def _median_time(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def bench_throughput(method: str, batch: EventBatch, geometry: SensorGeometry, repeats: int = 5,
                     fps: float = 100.0, pipelined: bool = False, **params) -> BenchReport:
    """Median-of-``repeats`` wall time for a full pass over an in-memory batch.

    Times the pass with frame emission at ``fps`` and, separately, the bare
    event loop.  Reconstructor construction and a warm-up pass (which also
    triggers JIT compilation) stay outside the timed region.
    """
    if repeats < 3:
        raise ValueError("use at least 3 repeats")
    origin = batch.t_start

    def fresh():
        return build(method, geometry, frame_rate=fps, origin=origin, **params)

    fresh().process_events(batch)  # warm-up
    recs = [fresh() for _ in range(repeats)]
    it = iter(recs)
    with_frames = _median_time(lambda: next(it).process_events(batch), repeats)
    recs = [fresh() for _ in range(repeats)]
    it = iter(recs)
    bare = _median_time(lambda: next(it).integrate(batch), repeats)

    report = BenchReport(method, len(batch), with_frames, bare, machine_note=machine_note())
    if pipelined:
        packets = packetize(batch)
        recs = [fresh() for _ in range(repeats)]
        it = iter(recs)
        report.pipelined_wall_time = _median_time(
            lambda: run_pipeline(packets, next(it), lambda f: None), repeats)
    return report


def bench_interleaved(methods, batch: EventBatch, geometry: SensorGeometry, repeats: int = 5,
                      fps: float = 100.0, **params) -> dict[str, BenchReport]:
    """Throughput of several methods with their timed passes interleaved.

    Each round times one pass of every method in turn, so slow drift in
    machine load lands on all of them alike; use this when the ratio between
    methods matters more than the absolute figures.
    """
    if repeats < 3:
        raise ValueError("use at least 3 repeats")
    origin = batch.t_start

    def fresh(m):
        return build(m, geometry, frame_rate=fps, origin=origin, **params)

    def timed(fn):
        t0 = time.perf_counter()
        fn()
        return time.perf_counter() - t0

    for m in methods:
        fresh(m).process_events(batch)  # warm-up
    with_frames = {m: [] for m in methods}
    bare = {m: [] for m in methods}
    for _ in range(repeats):
        for m in methods:
            r1, r2 = fresh(m), fresh(m)
            with_frames[m].append(timed(lambda: r1.process_events(batch)))
            bare[m].append(timed(lambda: r2.integrate(batch)))
    note = machine_note()
    return {m: BenchReport(m, len(batch), statistics.median(with_frames[m]),
                           statistics.median(bare[m]), machine_note=note) for m in methods}


def bench_frame_time(method: str, batch: EventBatch, geometry: SensorGeometry,
                     fps_list=(25, 50, 100, 200, 400), **params) -> list[FrameTiming]:
    """Per-frame processing time (event integration plus rendering) at each frame rate."""
    out = []
    for fps in fps_list:
        r = build(method, geometry, frame_rate=fps, origin=batch.t_start, **params)
        build(method, geometry, frame_rate=fps, origin=batch.t_start, **params).process_events(
            batch[: min(len(batch), 1000)])  # warm-up
        times, counts = [], []
        if batch.t_start is not None:
            t_end = batch.t_end
            i = 0
            n = 0
            while (f := r.frame_time(n)) < t_end:
                j = int(np.searchsorted(batch.t, f, side="right"))
                t0 = time.perf_counter()
                r.integrate(batch[i:j], offset=i)
                r.render(f)
                times.append(time.perf_counter() - t0)
                counts.append(j - i)
                i = j
                n += 1
        period_ms = 1e3 / fps
        if times:
            ms = np.asarray(times) * 1e3
            mean = float(ms.mean())
            out.append(FrameTiming(float(fps), mean, float(np.percentile(ms, 99)),
                                   100.0 * mean / period_ms, float(np.mean(counts)), len(times)))
        else:
            out.append(FrameTiming(float(fps), None, None, None, 0.0, 0))
    return out


def write_report_csv(path, reports: list[BenchReport]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["method", "events", "wall_s", "throughput_ev_s", "wall_s_no_emission",
                    "throughput_no_emission_ev_s", "pipelined_wall_s", "fps", "frame_mean_ms",
                    "frame_p99_ms", "pct_of_period", "events_per_frame"])
        for r in reports:
            base = [r.method, r.events_processed, _f(r.wall_time), _f(r.throughput),
                    _f(r.wall_time_no_emission), _f(r.throughput_no_emission),
                    _f(r.pipelined_wall_time)]
            if not r.per_frame_time:
                w.writerow(base + [""] * 5)
            for ft in r.per_frame_time:
                w.writerow(base + [_f(ft.fps), _f(ft.mean_ms), _f(ft.p99_ms), _f(ft.pct_of_period),
                                   _f(ft.mean_events_per_frame)])


def format_report(r: BenchReport) -> str:
    def rate(v):
        return "n/a" if v is None else f"{v / 1e6:.2f}e6 ev/s"

    lines = [
        f"method: {r.method}",
        f"events: {r.events_processed}",
        f"throughput (100 FPS emission): {rate(r.throughput)}  [{r.wall_time * 1e3:.1f} ms]",
        f"throughput (event loop only):  {rate(r.throughput_no_emission)}",
    ]
    if r.pipelined_wall_time is not None:
        lines.append(f"throughput (staged pipeline):  {rate(r.throughput_pipelined)}")
    for ft in r.per_frame_time:
        if ft.mean_ms is None:
            lines.append(f"  {ft.fps:g} FPS: no frames")
        else:
            lines.append(f"  {ft.fps:g} FPS: mean {ft.mean_ms:.3f} ms, p99 {ft.p99_ms:.3f} ms, "
                         f"{ft.pct_of_period:.1f}% of period, {ft.mean_events_per_frame:.0f} ev/frame")
    lines.append(f"machine: {r.machine_note}")
    return "\n".join(lines)


def _f(v):
    return "" if v is None else f"{v:.6g}"
