"""Event-to-frame reconstruction: shared frame-emission loop and the ESI reconstructor."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decay import DecayParams, StateMatrices, _esi_kernel, peek_decayed
from .errors import NegativeInterval
from .events import DAVIS346, EventBatch, Frame, SensorGeometry

DEFAULT_THRESHOLD = 0.15
DEFAULT_S_MIN = -1.5
DEFAULT_S_MAX = 1.5
DEFAULT_FPS = 100.0


def clamp(v, s_min: float, s_max: float):
    """``min(max(v, s_min), s_max)`` for scalars or arrays."""
    out = np.minimum(np.maximum(v, s_min), s_max)
    return float(out) if np.ndim(out) == 0 else out


def map_to_gray(v, s_min: float, s_max: float):
    """Linearly map ``[s_min, s_max]`` onto ``0..255``, rounding halves away from zero.

    Returns an ``int`` for scalar input and a ``uint8`` array otherwise.
    """
    # divide before scaling so the midpoint of symmetric bounds is exactly 127.5
    scaled = (np.asarray(v, dtype=np.float64) - s_min) / (s_max - s_min) * 255.0
    # values are non-negative here, so half-away-from-zero is floor(x + 0.5)
    g = np.clip(np.floor(scaled + 0.5), 0, 255)
    if g.ndim == 0:
        return int(g)
    return g.astype(np.uint8)


def _check_bounds(s_min, s_max, frame_rate):
    if not s_min < s_max:
        raise ValueError(f"s_min must be below s_max, got [{s_min}, {s_max}]")
    if not frame_rate > 0:
        raise ValueError(f"frame rate must be positive, got {frame_rate}")


@dataclass(frozen=True)
class EsiParams:
    decay: DecayParams = field(default_factory=DecayParams)
    threshold: float = DEFAULT_THRESHOLD
    s_min: float = DEFAULT_S_MIN
    s_max: float = DEFAULT_S_MAX
    frame_rate: float = DEFAULT_FPS

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError(f"threshold must be positive, got {self.threshold}")
        _check_bounds(self.s_min, self.s_max, self.frame_rate)


class Reconstructor:
    """Base class: owns the frame grid and turns a value matrix into frames.

    Subclasses implement ``_integrate`` (update state from event columns,
    returning the index of a per-pixel time violation or -1), ``values``
    (the read-time value matrix, before clamping) and ``_clear``.

    Frames are emitted at ``origin + round(n * 1e6 / frame_rate)`` µs.
    Events stamped exactly on a frame time are included in that frame.
    The origin defaults to the start of the first batch seen.
    """

    method = "base"

    def __init__(self, geometry: SensorGeometry = DAVIS346, frame_rate: float = DEFAULT_FPS,
                 s_min: float = DEFAULT_S_MIN, s_max: float = DEFAULT_S_MAX,
                 origin: int | None = None):
        _check_bounds(s_min, s_max, frame_rate)
        self.geometry = geometry
        self.frame_rate = float(frame_rate)
        self.s_min = float(s_min)
        self.s_max = float(s_max)
        self._fixed_origin = origin
        self.origin = origin
        self.frame_index = 0

    # -- subclass hooks ------------------------------------------------------

    def _integrate(self, t, x, y, p) -> int:
        raise NotImplementedError

    def values(self, t_now: int) -> np.ndarray:
        raise NotImplementedError

    def _clear(self) -> None:
        raise NotImplementedError

    # -- public API ------------------------------------------------------------

    def reset(self):
        """Zero the state and rewind the frame grid to the stream origin."""
        self._clear()
        self.origin = self._fixed_origin
        self.frame_index = 0
        return self

    def frame_time(self, n: int) -> int:
        return self.origin + int(round(n * 1e6 / self.frame_rate))

    @property
    def next_frame_t(self) -> int | None:
        if self.origin is None:
            return None
        return self.frame_time(self.frame_index)

    def integrate(self, batch: EventBatch, offset: int = 0) -> None:
        """Feed events into the state without emitting frames."""
        if not len(batch):
            return
        bad = self._integrate(batch.t, batch.x, batch.y, batch.p)
        if bad >= 0:
            raise NegativeInterval(
                f"event {bad + offset} (t={int(batch.t[bad])}, x={int(batch.x[bad])}, "
                f"y={int(batch.y[bad])}) precedes its pixel's last update", index=bad + offset)

    def render(self, t_now: int) -> Frame:
        v = clamp(self.values(t_now), self.s_min, self.s_max)
        return Frame(int(t_now), map_to_gray(v, self.s_min, self.s_max), self.geometry)

    def process_events(self, batch: EventBatch) -> list[Frame]:
        """Integrate ``batch`` and return every frame whose time falls inside its span.

        A frame at time ``F`` is emitted once stream time is known to be
        past ``F``, i.e. when ``F < batch.t_end``; it reflects every event
        with ``t <= F``.
        """
        if self.origin is None:
            if batch.t_start is None:
                return []
            self.origin = batch.t_start
        frames = []
        t_end = batch.t_end
        if t_end is None:
            return frames
        t = batch.t
        i = 0
        while True:
            f = self.frame_time(self.frame_index)
            if f >= t_end:
                break
            j = int(np.searchsorted(t, f, side="right"))
            if j > i:
                self.integrate(batch[i:j], offset=i)
                i = j
            frames.append(self.render(f))
            self.frame_index += 1
        if i < len(batch):
            self.integrate(batch[i:], offset=i)
        return frames

    def advance_to(self, t_end: int) -> list[Frame]:
        """Emit the frames due before ``t_end`` without any new events."""
        start = self.origin if self.origin is not None else t_end
        return self.process_events(EventBatch.empty(t_start=start, t_end=t_end))


class EsiReconstructor(Reconstructor):
    """Accumulate, decay polynomially, clamp each touched pixel, map linearly to 8 bits."""

    method = "esi"

    def __init__(self, params: EsiParams | None = None, geometry: SensorGeometry = DAVIS346,
                 origin: int | None = None):
        params = params or EsiParams()
        super().__init__(geometry, params.frame_rate, params.s_min, params.s_max, origin)
        self.params = params
        self.state = StateMatrices.zeros(geometry)
        self._buf = np.empty(geometry.shape)

    def _integrate(self, t, x, y, p) -> int:
        prm = self.params
        return _esi_kernel(t, x, y, p, self.state.S, self.state.T, prm.threshold,
                           prm.decay.k, prm.decay.b, self.s_min, self.s_max, True)

    def values(self, t_now: int) -> np.ndarray:
        return peek_decayed(self.state, t_now, self.params.decay, out=self._buf)

    def _clear(self) -> None:
        self.state.clear()


def run_esi(batch: EventBatch, geometry: SensorGeometry, params: EsiParams | None = None,
            origin: int | None = None) -> tuple[list[Frame], StateMatrices]:
    """One-shot helper: reconstruct a whole batch, return frames and final state."""
    r = EsiReconstructor(params, geometry, origin=origin)
    frames = r.process_events(batch)
    return frames, r.state


__all__ = [
    "EsiParams", "EsiReconstructor", "Reconstructor", "clamp", "map_to_gray", "run_esi",
]
