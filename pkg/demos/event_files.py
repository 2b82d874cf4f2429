"""
Event files and frame files
===========================

Events travel as text (``t_us,x,y,p`` per line) or as a small binary format
with a 20-byte header and 16-byte records.  Frames are written as binary PGM.
"""

from pathlib import Path

import numpy as np

from esi import evio
from esi.events import EventBatch, Frame, SensorGeometry

out = Path("demo_output")
out.mkdir(exist_ok=True)
geometry = SensorGeometry(346, 260)

batch = EventBatch([0, 5, 5, 1200], [1, 1, 300, 12], [2, 2, 259, 40], [1, -1, 1, -1])
evio.write_events(out / "tiny.csv", batch, geometry)
evio.write_events(out / "tiny.bin", batch, geometry)
print((out / "tiny.csv").read_text())
print("binary size:", (out / "tiny.bin").stat().st_size, "bytes = 20 + 4 * 16")

###############################################################################
# Both readers give back exactly the batch that was written, and the
# geometry travels with it.

g_csv, from_csv = evio.read_events(out / "tiny.csv")
g_bin, from_bin = evio.read_events(out / "tiny.bin")
assert from_csv == from_bin == batch and g_csv == g_bin == geometry

###############################################################################
# Large files can be streamed in chunks instead of loaded whole.

for chunk in evio.iter_events_bin(out / "tiny.bin", chunk_size=3):
    print("chunk of", len(chunk), "events, t =", chunk.t.tolist())

###############################################################################
# A 2 x 2 black frame is the PGM header followed by four zero bytes.

frame = Frame(0, np.zeros((2, 2), np.uint8), SensorGeometry(2, 2))
print(evio.frame_pgm_bytes(frame))
