"""Core value types: events, event batches, sensor geometry and frames."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BadPolarity, EventError, OutOfBounds

T_DTYPE = np.int64
XY_DTYPE = np.uint16
P_DTYPE = np.int8


@dataclass(frozen=True, slots=True)
class Event:
    """A single polarity-tagged pixel change.

    ``t`` is an integer timestamp in microseconds, ``p`` is +1 (brighter)
    or -1 (darker).
    """

    t: int
    x: int
    y: int
    p: int


@dataclass(frozen=True, slots=True)
class SensorGeometry:
    width: int = 346
    height: int = 260

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"sensor must be at least 1x1, got {self.width}x{self.height}")

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape ``(height, width)`` for row-major pixel matrices."""
        return (self.height, self.width)

    @property
    def n_pixels(self) -> int:
        return self.width * self.height


DAVIS346 = SensorGeometry(346, 260)


def validate_event(e: Event, g: SensorGeometry) -> None:
    """Raise if ``e`` does not address a pixel of ``g`` or has a bad polarity."""
    if not (0 <= e.x < g.width and 0 <= e.y < g.height):
        raise OutOfBounds(f"event at ({e.x}, {e.y}) outside {g.width}x{g.height} sensor")
    if e.p not in (1, -1):
        raise BadPolarity(f"polarity must be +1 or -1, got {e.p!r}")


class EventBatch:
    """An ordered, immutable run of events stored column-wise.

    Events are sorted by timestamp (ties allowed, arrival order kept). The
    batch may carry an explicit time span ``[t_start, t_end]`` which tells a
    reconstructor how far stream time has advanced even where no events
    occurred; by default the span is that of the events themselves.
    """

    __slots__ = ("t", "x", "y", "p", "_t_start", "_t_end")

    def __init__(self, t, x, y, p, t_start: int | None = None, t_end: int | None = None,
                 check: bool = True):
        t = np.ascontiguousarray(t, dtype=T_DTYPE)
        if check:
            for col in (x, y):
                col = np.asarray(col)
                if col.size and (col.min() < 0 or col.max() > np.iinfo(XY_DTYPE).max):
                    raise OutOfBounds("pixel coordinate outside the representable range")
            x = np.ascontiguousarray(x, dtype=XY_DTYPE)
            y = np.ascontiguousarray(y, dtype=XY_DTYPE)
            p_raw = np.asarray(p)
            if p_raw.size and not np.all((p_raw == 1) | (p_raw == -1)):
                raise BadPolarity("polarity must be +1 or -1")
            p = np.ascontiguousarray(p_raw, dtype=P_DTYPE)
        else:
            x, y, p = np.ascontiguousarray(x), np.ascontiguousarray(y), np.ascontiguousarray(p)
        if not (t.ndim == x.ndim == y.ndim == p.ndim == 1):
            raise ValueError("event columns must be one-dimensional")
        if not (len(t) == len(x) == len(y) == len(p)):
            raise ValueError("event columns differ in length")
        if check and len(t):
            if t[0] < 0:
                raise EventError("timestamps must be non-negative")
            if np.any(t[1:] < t[:-1]):
                raise EventError("events are not sorted by timestamp")
        for a in (t, x, y, p):
            a.flags.writeable = False
        self.t, self.x, self.y, self.p = t, x, y, p
        if t_start is not None and len(t) and t_start > t[0]:
            raise EventError("t_start is after the first event")
        if t_end is not None and len(t) and t_end < t[-1]:
            raise EventError("t_end is before the last event")
        if t_start is not None and t_end is not None and t_end < t_start:
            raise EventError("t_end precedes t_start")
        self._t_start = None if t_start is None else int(t_start)
        self._t_end = None if t_end is None else int(t_end)

    @classmethod
    def empty(cls, t_start: int | None = None, t_end: int | None = None) -> "EventBatch":
        z = np.zeros(0)
        return cls(z, z, z, z, t_start=t_start, t_end=t_end)

    @classmethod
    def from_events(cls, events: Iterable[Event], **span) -> "EventBatch":
        events = list(events)
        for e in events:
            if e.p not in (1, -1):
                raise BadPolarity(f"polarity must be +1 or -1, got {e.p!r}")
            if e.x < 0 or e.y < 0:
                raise OutOfBounds(f"negative coordinate in {e}")
        cols = np.array([(e.t, e.x, e.y, e.p) for e in events], dtype=np.int64).reshape(-1, 4)
        return cls(cols[:, 0], cols[:, 1], cols[:, 2], cols[:, 3], **span)

    @classmethod
    def concat(cls, batches: Sequence["EventBatch"]) -> "EventBatch":
        batches = list(batches)
        if not batches:
            return cls.empty()
        return cls(
            np.concatenate([b.t for b in batches]),
            np.concatenate([b.x for b in batches]),
            np.concatenate([b.y for b in batches]),
            np.concatenate([b.p for b in batches]),
            t_start=batches[0]._t_start,
            t_end=batches[-1]._t_end,
        )

    def __len__(self) -> int:
        return len(self.t)

    @property
    def count(self) -> int:
        return len(self.t)

    @property
    def t_start(self) -> int | None:
        if self._t_start is not None:
            return self._t_start
        return int(self.t[0]) if len(self.t) else None

    @property
    def t_end(self) -> int | None:
        if self._t_end is not None:
            return self._t_end
        return int(self.t[-1]) if len(self.t) else None

    @property
    def duration_us(self) -> int:
        if self.t_start is None or self.t_end is None:
            return 0
        return self.t_end - self.t_start

    def __iter__(self) -> Iterator[Event]:
        for t, x, y, p in zip(self.t.tolist(), self.x.tolist(), self.y.tolist(), self.p.tolist()):
            yield Event(t, x, y, p)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return EventBatch(self.t[item], self.x[item], self.y[item], self.p[item], check=False)
        i = int(item)
        return Event(int(self.t[i]), int(self.x[i]), int(self.y[i]), int(self.p[i]))

    def __eq__(self, other):
        if not isinstance(other, EventBatch):
            return NotImplemented
        return (np.array_equal(self.t, other.t) and np.array_equal(self.x, other.x)
                and np.array_equal(self.y, other.y) and np.array_equal(self.p, other.p))

    __hash__ = None

    def __repr__(self):
        return f"EventBatch(count={self.count}, span=[{self.t_start}, {self.t_end}])"

    def split(self, index: int) -> tuple["EventBatch", "EventBatch"]:
        """Prefix/suffix pair at ``index``; the explicit span, if any, is kept at the outer ends."""
        head = EventBatch(self.t[:index], self.x[:index], self.y[:index], self.p[:index],
                          t_start=self._t_start, check=False)
        tail = EventBatch(self.t[index:], self.x[index:], self.y[index:], self.p[index:],
                          t_end=self._t_end, check=False)
        return head, tail

    def time_slice(self, t0: int, t1: int) -> "EventBatch":
        """Events with ``t0 <= t < t1``."""
        i, j = np.searchsorted(self.t, [t0, t1], side="left")
        return self[i:j]

    def validate(self, g: SensorGeometry) -> None:
        """Vectorized :func:`validate_event` over the whole batch."""
        bad = np.flatnonzero((self.x >= g.width) | (self.y >= g.height))
        if len(bad):
            i = int(bad[0])
            raise OutOfBounds(f"event {i} at ({self.x[i]}, {self.y[i]}) outside "
                              f"{g.width}x{g.height} sensor")


@dataclass(frozen=True)
class Frame:
    """An 8-bit grayscale image emitted at stream time ``t_emit`` (µs)."""

    t_emit: int
    pixels: np.ndarray = field(repr=False)
    geometry: SensorGeometry

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.shape != self.geometry.shape:
            raise ValueError(f"pixel array shape {px.shape} does not match {self.geometry.shape}")
        if px.dtype != np.uint8:
            raise ValueError("frame pixels must be uint8")
        px = px.copy() if px.flags.writeable else px
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_values(cls, t_emit: int, values, geometry: SensorGeometry) -> "Frame":
        v = np.asarray(values)
        if v.size and (v.min() < 0 or v.max() > 255):
            raise ValueError("frame values must lie in [0, 255]")
        return cls(int(t_emit), v.astype(np.uint8).reshape(geometry.shape), geometry)

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return (self.t_emit == other.t_emit and self.geometry == other.geometry
                and np.array_equal(self.pixels, other.pixels))

    __hash__ = None
