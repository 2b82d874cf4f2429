"""Event-stream and frame file formats.

Text events: one ``t_us,x,y,p`` line per event, ``p`` in {1, -1}, with an
optional first line ``# width,height``.

Binary events (all little-endian)::

    offset  size  field
    0       8     magic  b"EVS1BIN\\0"
    8       2     width  u16
    10      2     height u16
    12      8     count  u64
    20      16*n  records: t u64 (µs), x u16, y u16, p i8, 3 zero pad bytes

Frames are written as binary PGM (``P5``, maxval 255).
"""

from __future__ import annotations

import io
import os
import re
import warnings
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import BadMagic, CountMismatch, NonMonotoneTime, ParseError, TruncatedFile
from .events import EventBatch, Frame, SensorGeometry

MAGIC = b"EVS1BIN\0"
HEADER_DTYPE = np.dtype([("magic", "S8"), ("width", "<u2"), ("height", "<u2"), ("count", "<u8")])
RECORD_DTYPE = np.dtype([("t", "<u8"), ("x", "<u2"), ("y", "<u2"), ("p", "i1"), ("pad", "V3")])
HEADER_SIZE = HEADER_DTYPE.itemsize  # 20
RECORD_SIZE = RECORD_DTYPE.itemsize  # 16

_GEOM_RE = re.compile(r"^#\s*(\d+)\s*,\s*(\d+)\s*$")
_INT64_MAX = np.iinfo(np.int64).max


# -- CSV ---------------------------------------------------------------------

def _parse_line(line: str, lineno: int) -> tuple[int, int, int, int]:
    parts = line.split(",")
    if len(parts) != 4:
        raise ParseError(f"expected 4 comma-separated fields, got {len(parts)}", lineno)
    try:
        t, x, y, p = (int(s) for s in parts)
    except ValueError:
        raise ParseError(f"non-integer field in {line!r}", lineno) from None
    if t < 0 or t > _INT64_MAX:
        raise ParseError(f"timestamp {t} out of range", lineno)
    if not (0 <= x <= 0xFFFF and 0 <= y <= 0xFFFF):
        raise ParseError(f"coordinate ({x}, {y}) out of range", lineno)
    if p not in (1, -1):
        raise ParseError(f"polarity must be 1 or -1, got {p}", lineno)
    return t, x, y, p


def _finish(rows_t, rows_x, rows_y, rows_p, strict: bool, first_line: int = 1) -> EventBatch:
    t = np.asarray(rows_t, dtype=np.int64)
    bad = np.flatnonzero(t[1:] < t[:-1])
    if len(bad):
        msg = f"timestamps decrease at event {int(bad[0]) + 1} (line ~{int(bad[0]) + 1 + first_line})"
        if strict:
            raise NonMonotoneTime(msg)
        warnings.warn(msg + "; events re-sorted by time", stacklevel=3)
        order = np.argsort(t, kind="stable")
        return EventBatch(t[order], np.asarray(rows_x)[order], np.asarray(rows_y)[order],
                          np.asarray(rows_p)[order])
    return EventBatch(t, rows_x, rows_y, rows_p)


def _iter_csv_rows(f, start_line: int):
    for lineno, line in enumerate(f, start=start_line):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def _read_header(f) -> tuple[SensorGeometry | None, str | None, int]:
    """Consume an optional geometry comment; return (geometry, pending line, next lineno)."""
    first = f.readline()
    if not first:
        return None, None, 2
    m = _GEOM_RE.match(first.strip())
    if m:
        return SensorGeometry(int(m.group(1)), int(m.group(2))), None, 2
    return None, first, 1


def iter_events_csv(path, chunk_size: int = 1 << 16) -> Iterator[EventBatch]:
    """Stream a CSV event file as consecutive batches of at most ``chunk_size`` events.

    A streamed file cannot be re-sorted, so any decreasing timestamp raises
    :class:`NonMonotoneTime`.
    """
    with open(path, "r", encoding="ascii", newline="") as f:
        _, pending, lineno = _read_header(f)
        lines = _iter_csv_rows(f, lineno + (0 if pending is None else 1))
        if pending is not None:
            lines = _chain_pending(pending, lineno, lines)
        last_t = -1
        buf = ([], [], [], [])
        for ln, line in lines:
            row = _parse_line(line, ln)
            if row[0] < last_t:
                raise NonMonotoneTime(f"line {ln}: timestamp {row[0]} after {last_t}")
            last_t = row[0]
            for col, v in zip(buf, row):
                col.append(v)
            if len(buf[0]) >= chunk_size:
                yield EventBatch(*buf)
                buf = ([], [], [], [])
        if buf[0]:
            yield EventBatch(*buf)


def _chain_pending(pending, lineno, rest):
    s = pending.strip()
    if s and not s.startswith("#"):
        yield lineno, s
    yield from rest


def read_events_csv(path, strict: bool = False) -> tuple[SensorGeometry | None, EventBatch]:
    """Read a whole CSV event file.

    Decreasing timestamps raise :class:`NonMonotoneTime` when ``strict`` is
    set; otherwise a warning is issued and the events are stably re-sorted.
    """
    with open(path, "r", encoding="ascii", newline="") as f:
        geometry, pending, lineno = _read_header(f)
        body = f.read()
    if pending is not None:
        body = pending + body
        start = 1
    else:
        start = lineno
    if not any(ln and not ln.startswith("#") for ln in map(str.strip, body.splitlines())):
        return geometry, EventBatch.empty()
    try:
        data = np.loadtxt(io.StringIO(body), dtype=np.int64, delimiter=",", comments="#",
                          ndmin=2)
        ok = data.shape[1] == 4 if data.size else True
    except ValueError:
        ok = False
    if ok and data.size:
        t, x, y, p = data.T
        if (t.min() >= 0 and x.min() >= 0 and y.min() >= 0 and x.max() <= 0xFFFF
                and y.max() <= 0xFFFF and np.all((p == 1) | (p == -1))):
            return geometry, _finish(t, x, y, p, strict, start)
    # slow path: locate and report the first bad line
    cols = ([], [], [], [])
    for ln, line in _iter_csv_rows(io.StringIO(body), start):
        for col, v in zip(cols, _parse_line(line, ln)):
            col.append(v)
    return geometry, _finish(*cols, strict=strict, first_line=start)


def write_events_csv(path, batch: EventBatch, geometry: SensorGeometry | None = None) -> None:
    with open(path, "w", encoding="ascii", newline="") as f:
        if geometry is not None:
            f.write(f"# {geometry.width},{geometry.height}\n")
        if len(batch):
            arr = np.column_stack([batch.t, batch.x.astype(np.int64), batch.y.astype(np.int64),
                                   batch.p.astype(np.int64)])
            np.savetxt(f, arr, fmt="%d", delimiter=",")


# -- binary ------------------------------------------------------------------

def _header_bytes(geometry: SensorGeometry, count: int) -> bytes:
    h = np.zeros((), dtype=HEADER_DTYPE)
    h["magic"] = MAGIC
    h["width"] = geometry.width
    h["height"] = geometry.height
    h["count"] = count
    return h.tobytes()


def _records(batch: EventBatch) -> np.ndarray:
    rec = np.zeros(len(batch), dtype=RECORD_DTYPE)
    rec["t"] = batch.t
    rec["x"] = batch.x
    rec["y"] = batch.y
    rec["p"] = batch.p
    return rec


def write_events_bin(path, batch: EventBatch, geometry: SensorGeometry) -> None:
    if geometry.width > 0xFFFF or geometry.height > 0xFFFF:
        raise ValueError("geometry does not fit the u16 header fields")
    with open(path, "wb") as f:
        f.write(_header_bytes(geometry, len(batch)))
        f.write(_records(batch).tobytes())


def _parse_header(raw: bytes) -> tuple[SensorGeometry, int]:
    if len(raw) < HEADER_SIZE:
        if not MAGIC.startswith(raw[:8]):
            raise BadMagic(f"bad magic {raw[:8]!r}")
        raise TruncatedFile(f"file is {len(raw)} bytes, shorter than the {HEADER_SIZE}-byte header")
    h = np.frombuffer(raw[:HEADER_SIZE], dtype=HEADER_DTYPE)[0]
    magic = raw[:8]
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    return SensorGeometry(int(h["width"]), int(h["height"])), int(h["count"])


def _batch_from_records(rec: np.ndarray) -> EventBatch:
    if len(rec) and rec["t"].max() > _INT64_MAX:
        raise ParseError("timestamp exceeds the signed 64-bit range")
    return EventBatch(rec["t"].astype(np.int64), rec["x"], rec["y"], rec["p"])


def read_events_bin(path) -> tuple[SensorGeometry, EventBatch]:
    raw = Path(path).read_bytes()
    geometry, count = _parse_header(raw)
    payload = len(raw) - HEADER_SIZE
    expected = count * RECORD_SIZE
    if payload < expected:
        raise TruncatedFile(f"header announces {count} events ({expected} bytes), "
                            f"payload has {payload} bytes")
    if payload > expected:
        raise CountMismatch(f"header announces {count} events but payload holds "
                            f"{payload / RECORD_SIZE:g} records")
    rec = np.frombuffer(raw, dtype=RECORD_DTYPE, count=count, offset=HEADER_SIZE)
    return geometry, _batch_from_records(rec)


def iter_events_bin(path, chunk_size: int = 1 << 16) -> Iterator[EventBatch]:
    """Stream a binary event file in batches of at most ``chunk_size`` events."""
    size = os.path.getsize(path)
    with open(path, "rb") as f:
        geometry, count = _parse_header(f.read(HEADER_SIZE))
        payload = size - HEADER_SIZE
        if payload < count * RECORD_SIZE:
            raise TruncatedFile(f"header announces {count} events, payload has {payload} bytes")
        if payload > count * RECORD_SIZE:
            raise CountMismatch(f"header announces {count} events but payload is {payload} bytes")
        left = count
        while left:
            n = min(chunk_size, left)
            rec = np.frombuffer(f.read(n * RECORD_SIZE), dtype=RECORD_DTYPE)
            left -= n
            yield _batch_from_records(rec)


def read_events(path, fmt: str | None = None, strict: bool = False):
    """Dispatch on ``fmt`` (``"csv"``/``"bin"``) or the file suffix."""
    fmt = fmt or ("csv" if str(path).lower().endswith((".csv", ".txt")) else "bin")
    if fmt == "csv":
        return read_events_csv(path, strict=strict)
    if fmt == "bin":
        return read_events_bin(path)
    raise ValueError(f"unknown event format {fmt!r}")


def write_events(path, batch: EventBatch, geometry: SensorGeometry, fmt: str | None = None) -> None:
    fmt = fmt or ("csv" if str(path).lower().endswith((".csv", ".txt")) else "bin")
    if fmt == "csv":
        write_events_csv(path, batch, geometry)
    elif fmt == "bin":
        write_events_bin(path, batch, geometry)
    else:
        raise ValueError(f"unknown event format {fmt!r}")


# -- PGM ---------------------------------------------------------------------

def frame_pgm_bytes(frame: Frame) -> bytes:
    g = frame.geometry
    return b"P5\n%d %d\n255\n" % (g.width, g.height) + np.ascontiguousarray(frame.pixels).tobytes()


def write_frame_pgm(frame: Frame, path) -> None:
    with open(path, "wb") as f:
        f.write(frame_pgm_bytes(frame))


def read_pgm(path) -> np.ndarray:
    """Minimal binary PGM reader (``P5``, maxval <= 255), returns ``(H, W)`` uint8."""
    data = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    if tokens[0] != b"P5":
        raise BadMagic(f"not a binary PGM: {tokens[0]!r}")
    w, h, maxval = (int(tok) for tok in tokens[1:])
    if maxval > 255:
        raise ParseError("16-bit PGM not supported")
    pixels = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos + 1)
    return pixels.reshape(h, w).copy()
