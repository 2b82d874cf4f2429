"""Polynomial decay and the lazy two-matrix accumulation state.

Each pixel stores only its accumulated value ``S`` and the time ``T`` at
which that value was last decayed.  An incoming event adds ``p * C`` to
``S`` and then decays the sum by ``d(t - T)`` where

    d(dt) = max((1 - k * dt) ** b, 0)

Between events the stored value is stale; :func:`peek_decayed` gives the
read-time view without touching the state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import NegativeInterval
from .events import Event, EventBatch, SensorGeometry

US_PER_S = 1e6


@dataclass(frozen=True)
class DecayParams:
    k: float = 10.0  # 1/s; full-decay horizon is 1/k seconds
    b: float = 2.0

    def __post_init__(self):
        if not (self.k > 0 and self.b > 0):
            raise ValueError(f"decay parameters must be positive, got k={self.k}, b={self.b}")

    @property
    def horizon_s(self) -> float:
        return 1.0 / self.k


@dataclass(eq=False)
class StateMatrices:
    """Per-pixel accumulation ``S`` (float64) and last-decay time ``T`` (int64 µs)."""

    S: np.ndarray
    T: np.ndarray

    @classmethod
    def zeros(cls, geometry: SensorGeometry) -> "StateMatrices":
        return cls(np.zeros(geometry.shape, dtype=np.float64),
                   np.zeros(geometry.shape, dtype=np.int64))

    def copy(self) -> "StateMatrices":
        return StateMatrices(self.S.copy(), self.T.copy())

    def clear(self) -> None:
        self.S.fill(0.0)
        self.T.fill(0)

    def identical(self, other: "StateMatrices") -> bool:
        """Bit-exact comparison of both matrices."""
        return (self.S.shape == other.S.shape
                and np.array_equal(self.S.view(np.uint64), other.S.view(np.uint64))
                and np.array_equal(self.T, other.T))


def decay_factor(dt, params: DecayParams):
    """Residual weight ``max((1 - k*dt)**b, 0)`` after a gap of ``dt`` seconds.

    Accepts a scalar or an array; raises :class:`NegativeInterval` on any
    negative gap.
    """
    arr = np.asarray(dt, dtype=np.float64)
    if np.any(arr < 0):
        raise NegativeInterval(f"negative decay interval {arr.min()!r} s")
    base = np.clip(1.0 - params.k * arr, 0.0, None)
    out = base ** params.b
    return float(out) if out.ndim == 0 else out


def apply_event(state: StateMatrices, e: Event, threshold: float, params: DecayParams) -> StateMatrices:
    """Accumulate one event into ``state`` (in place) and return it.

    Order matters: the contribution is added first and the sum is then
    decayed by the gap since the pixel's previous update.
    """
    last = int(state.T[e.y, e.x])
    if e.t < last:
        raise NegativeInterval(f"event at t={e.t} precedes pixel ({e.x}, {e.y}) time {last}")
    s = state.S[e.y, e.x] + e.p * threshold
    f = _scalar_decay((e.t - last) / US_PER_S, params.k, params.b)
    s = s * f if f > 0.0 else 0.0
    state.S[e.y, e.x] = s
    state.T[e.y, e.x] = e.t
    return state


def integrate(state: StateMatrices, batch: EventBatch, threshold: float, params: DecayParams,
              s_min: float | None = None, s_max: float | None = None) -> StateMatrices:
    """Run a whole batch through the accumulate-then-decay update.

    When both bounds are given the touched pixel is clamped after every
    event.  On a per-pixel time violation the events before the offender
    have already been applied and :class:`NegativeInterval` carries its
    index.
    """
    do_clamp = s_min is not None and s_max is not None
    bad = _esi_kernel(batch.t, batch.x, batch.y, batch.p, state.S, state.T,
                      float(threshold), float(params.k), float(params.b),
                      float(s_min) if do_clamp else 0.0, float(s_max) if do_clamp else 0.0,
                      do_clamp)
    if bad >= 0:
        raise NegativeInterval(f"event {bad} (t={int(batch.t[bad])}) precedes its pixel's "
                               "last update", index=bad)
    return state


def peek_decayed(state: StateMatrices, t_now: int, params: DecayParams,
                 out: np.ndarray | None = None) -> np.ndarray:
    """``S * d(t_now - T)`` for every pixel, leaving ``state`` untouched."""
    if out is None:
        out = np.empty_like(state.S)
    if not _peek_kernel(state.S, state.T, int(t_now), float(params.k), float(params.b), out):
        raise NegativeInterval(f"read time {t_now} precedes a pixel's last update "
                               f"({int(state.T.max())})")
    return out


def _scalar_decay(dt: float, k: float, b: float) -> float:
    base = 1.0 - k * dt
    if base <= 0.0:
        return 0.0
    return base ** b


_MAX_INT_EXPONENT = 16


@njit(cache=True, nogil=True, inline="always")
def _powb(base, b, ib):
    # ib >= 0 means b is that small integer: repeated products are exact enough
    # and much cheaper than a general pow
    if ib >= 0:
        r = 1.0
        for _ in range(ib):
            r *= base
        return r
    return base ** b


@njit(cache=True, nogil=True)
def _int_exponent(b):
    if b == np.floor(b) and b <= _MAX_INT_EXPONENT:
        return int(b)
    return -1


@njit(cache=True, nogil=True)
def _esi_kernel(t, x, y, p, S, T, c, k, b, s_min, s_max, do_clamp):
    ib = _int_exponent(b)
    for i in range(t.shape[0]):
        xi = x[i]
        yi = y[i]
        ti = t[i]
        last = T[yi, xi]
        if ti < last:
            return i
        s = S[yi, xi] + p[i] * c
        base = 1.0 - k * ((ti - last) / 1e6)
        if base <= 0.0:
            s = 0.0
        elif base < 1.0:
            s *= _powb(base, b, ib)
        if do_clamp:
            if s < s_min:
                s = s_min
            elif s > s_max:
                s = s_max
        S[yi, xi] = s
        T[yi, xi] = ti
    return -1


@njit(cache=True, nogil=True)
def _peek_kernel(S, T, t_now, k, b, out):
    ib = _int_exponent(b)
    h, w = S.shape
    for r in range(h):
        for c in range(w):
            last = T[r, c]
            if t_now < last:
                return False
            base = 1.0 - k * ((t_now - last) / 1e6)
            if base <= 0.0:
                out[r, c] = 0.0
            elif base < 1.0:
                out[r, c] = S[r, c] * _powb(base, b, ib)
            else:
                out[r, c] = S[r, c]
    return True
