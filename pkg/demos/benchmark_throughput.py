"""
Measuring throughput and per-frame cost
=======================================

The harness times whole passes over an in-memory batch, with frames emitted
at 100 FPS and without, and reports the median of several repeats.  A no-op
reconstructor gives the floor set by the harness itself.
"""

from esi import bench
from esi.events import DAVIS346

batch = bench.uniform_stream(2_000_000, DAVIS346, rate=12e6, seed=0)

reports = bench.bench_interleaved(("noop", "naive", "esi", "expdecay"), batch, DAVIS346,
                                  repeats=5)
for r in reports.values():
    print(f"{r.method:9s} {r.throughput / 1e6:8.1f}e6 ev/s with frames   "
          f"{r.throughput_no_emission / 1e6:8.1f}e6 ev/s bare")

###############################################################################
# Per-frame cost grows with the number of events each frame has to absorb,
# so doubling the frame rate roughly halves it.

for ft in bench.bench_frame_time("esi", batch, DAVIS346, fps_list=(50, 100, 200, 400)):
    print(f"{ft.fps:5.0f} FPS: {ft.mean_ms:.3f} ms per frame, "
          f"{ft.pct_of_period:.1f}% of the period, {ft.mean_events_per_frame:.0f} events")
