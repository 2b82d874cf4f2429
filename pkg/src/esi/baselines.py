"""Comparison reconstructors sharing the :class:`Reconstructor` interface.

These are deliberately small events-only analogs, not ports of any
third-party code:

* :class:`NaiveIntegrator` sums ``p * C`` forever (no decay, clamped only
  when rendered).
* :class:`ExpDecayAccumulator` is the ESI loop with ``exp(-lambda * dt)``
  in place of the polynomial decay, in the style of a generic accumulator
  plugin.
* :class:`ComplementaryFilterEventsOnly` relaxes its estimate
  exponentially toward zero and adds ``p * C`` after the decay.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .decay import DecayParams
from .errors import NegativeInterval
from .events import DAVIS346, SensorGeometry
from .reconstruct import (DEFAULT_FPS, DEFAULT_S_MAX, DEFAULT_S_MIN, DEFAULT_THRESHOLD,
                          EsiParams, EsiReconstructor, Reconstructor)

DEFAULT_RATE = 10.0  # 1/s, same horizon scale as the ESI default k


def exp_decay_factor(dt, rate: float):
    """``exp(-rate * dt)`` for a gap of ``dt`` seconds."""
    out = np.exp(-rate * np.asarray(dt, dtype=np.float64))
    return float(out) if out.ndim == 0 else out


class NaiveIntegrator(Reconstructor):
    method = "naive"

    def __init__(self, geometry: SensorGeometry = DAVIS346, threshold: float = DEFAULT_THRESHOLD,
                 s_min: float = DEFAULT_S_MIN, s_max: float = DEFAULT_S_MAX,
                 frame_rate: float = DEFAULT_FPS, origin: int | None = None):
        super().__init__(geometry, frame_rate, s_min, s_max, origin)
        self.threshold = float(threshold)
        self.S = np.zeros(geometry.shape)

    def _integrate(self, t, x, y, p) -> int:
        _naive_kernel(x, y, p, self.S, self.threshold)
        return -1

    def values(self, t_now: int) -> np.ndarray:
        return self.S

    def _clear(self) -> None:
        self.S.fill(0.0)


class _ExpStateMixin:
    def _init_state(self, geometry):
        self.S = np.zeros(geometry.shape)
        self.T = np.zeros(geometry.shape, dtype=np.int64)
        self._buf = np.empty(geometry.shape)

    def values(self, t_now: int) -> np.ndarray:
        if not _exp_peek_kernel(self.S, self.T, int(t_now), self.rate, self._buf):
            raise NegativeInterval(f"read time {t_now} precedes a pixel's last update")
        return self._buf

    def _clear(self) -> None:
        self.S.fill(0.0)
        self.T.fill(0)


class ExpDecayAccumulator(_ExpStateMixin, Reconstructor):
    """Add ``p * C``, decay by ``exp(-rate * dt)``, clamp the touched pixel."""

    method = "expdecay"

    def __init__(self, geometry: SensorGeometry = DAVIS346, threshold: float = DEFAULT_THRESHOLD,
                 rate: float = DEFAULT_RATE, s_min: float = DEFAULT_S_MIN,
                 s_max: float = DEFAULT_S_MAX, frame_rate: float = DEFAULT_FPS,
                 origin: int | None = None):
        if not rate > 0:
            raise ValueError(f"decay rate must be positive, got {rate}")
        super().__init__(geometry, frame_rate, s_min, s_max, origin)
        self.threshold = float(threshold)
        self.rate = float(rate)
        self._init_state(geometry)

    def _integrate(self, t, x, y, p) -> int:
        return _expdecay_kernel(t, x, y, p, self.S, self.T, self.threshold, self.rate,
                                self.s_min, self.s_max)


class ComplementaryFilterEventsOnly(_ExpStateMixin, Reconstructor):
    """Fixed-gain events-only filter: ``L <- L * exp(-alpha * dt) + p * C``."""

    method = "compfilter"

    def __init__(self, geometry: SensorGeometry = DAVIS346, threshold: float = DEFAULT_THRESHOLD,
                 alpha: float = DEFAULT_RATE, s_min: float = DEFAULT_S_MIN,
                 s_max: float = DEFAULT_S_MAX, frame_rate: float = DEFAULT_FPS,
                 origin: int | None = None):
        if not alpha > 0:
            raise ValueError(f"filter gain must be positive, got {alpha}")
        super().__init__(geometry, frame_rate, s_min, s_max, origin)
        self.threshold = float(threshold)
        self.rate = float(alpha)
        self._init_state(geometry)

    @property
    def alpha(self) -> float:
        return self.rate

    @property
    def L(self) -> np.ndarray:
        return self.S

    def _integrate(self, t, x, y, p) -> int:
        return _compfilter_kernel(t, x, y, p, self.S, self.T, self.threshold, self.rate)


METHODS = {
    "esi": EsiReconstructor,
    "naive": NaiveIntegrator,
    "expdecay": ExpDecayAccumulator,
    "compfilter": ComplementaryFilterEventsOnly,
}


def make_reconstructor(method: str, geometry: SensorGeometry = DAVIS346, *,
                       threshold: float = DEFAULT_THRESHOLD, s_min: float = DEFAULT_S_MIN,
                       s_max: float = DEFAULT_S_MAX, frame_rate: float = DEFAULT_FPS,
                       k: float = 10.0, b: float = 2.0, rate: float = DEFAULT_RATE,
                       alpha: float = DEFAULT_RATE, origin: int | None = None) -> Reconstructor:
    """Build any registered reconstructor from one flat set of parameters."""
    common = dict(s_min=s_min, s_max=s_max, frame_rate=frame_rate)
    if method == "esi":
        params = EsiParams(DecayParams(k, b), threshold, **common)
        return EsiReconstructor(params, geometry, origin=origin)
    if method == "naive":
        return NaiveIntegrator(geometry, threshold, origin=origin, **common)
    if method == "expdecay":
        return ExpDecayAccumulator(geometry, threshold, rate, origin=origin, **common)
    if method == "compfilter":
        return ComplementaryFilterEventsOnly(geometry, threshold, alpha, origin=origin, **common)
    raise ValueError(f"unknown method {method!r}; valid methods: {', '.join(METHODS)}")


@njit(cache=True, nogil=True)
def _naive_kernel(x, y, p, S, c):
    for i in range(x.shape[0]):
        S[y[i], x[i]] += p[i] * c


@njit(cache=True, nogil=True)
def _expdecay_kernel(t, x, y, p, S, T, c, rate, s_min, s_max):
    per_us = -rate / 1e6
    for i in range(t.shape[0]):
        xi = x[i]
        yi = y[i]
        ti = t[i]
        last = T[yi, xi]
        if ti < last:
            return i
        s = (S[yi, xi] + p[i] * c) * math.exp(per_us * (ti - last))
        if s < s_min:
            s = s_min
        elif s > s_max:
            s = s_max
        S[yi, xi] = s
        T[yi, xi] = ti
    return -1


@njit(cache=True, nogil=True)
def _compfilter_kernel(t, x, y, p, L, T, c, alpha):
    per_us = -alpha / 1e6
    for i in range(t.shape[0]):
        xi = x[i]
        yi = y[i]
        ti = t[i]
        last = T[yi, xi]
        if ti < last:
            return i
        L[yi, xi] = L[yi, xi] * math.exp(per_us * (ti - last)) + p[i] * c
        T[yi, xi] = ti
    return -1


@njit(cache=True, nogil=True)
def _exp_peek_kernel(S, T, t_now, rate, out):
    per_us = -rate / 1e6
    h, w = S.shape
    for r in range(h):
        for col in range(w):
            last = T[r, col]
            if t_now < last:
                return False
            out[r, col] = S[r, col] * math.exp(per_us * (t_now - last))
    return True
