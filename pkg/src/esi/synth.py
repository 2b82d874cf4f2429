"""Ground-truth event simulator.

The scene is a background whose intensity rises linearly along x, with a
dark circle of given reflectivity that sits still for a lead time and then
moves at constant speed along x.  Events come from an ideal threshold
trigger: each pixel keeps a reference log level and emits one event per
whole threshold step between it and the current log intensity, moving the
reference by that step.  Background activity (Poisson, random polarity)
and hot pixels can be mixed in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveIntensity, SamplingTooCoarse
from .events import EventBatch, SensorGeometry

_LEVEL_EPS = 1e-9


@dataclass(frozen=True)
class Circle:
    radius: float = 18.0
    reflectivity: float = 0.3
    center: tuple[float, float] = (100.0, 64.0)
    velocity: float = -60.0  # px/s along x


@dataclass(frozen=True)
class SceneSpec:
    geometry: SensorGeometry = SensorGeometry(128, 128)
    bg_min: float = 0.2
    bg_max: float = 1.0
    circle: Circle = field(default_factory=Circle)
    duration: float = 2.5
    lead_time: float = 0.5

    def __post_init__(self):
        if not (self.bg_min > 0 and self.bg_max > 0):
            raise NonPositiveIntensity(f"background intensity must be positive, "
                                       f"got [{self.bg_min}, {self.bg_max}]")
        if not 0 < self.circle.reflectivity <= 1:
            raise NonPositiveIntensity(f"reflectivity must lie in (0, 1], got {self.circle.reflectivity}")
        if self.circle.radius < 0:
            raise ValueError("circle radius must be non-negative")
        if self.duration <= 0 or self.lead_time < 0:
            raise ValueError("duration must be positive and lead time non-negative")

    def circle_center(self, t: float) -> tuple[float, float]:
        cx, cy = self.circle.center
        return cx + self.circle.velocity * max(0.0, t - self.lead_time), cy

    def departure_time(self) -> float | None:
        """Time at which the moving circle no longer overlaps its starting disk."""
        v = abs(self.circle.velocity)
        if v == 0:
            return None
        return self.lead_time + 2 * self.circle.radius / v

    def circle_mask(self, t: float) -> np.ndarray:
        """Pixels whose centre lies within the circle at time ``t``."""
        cx, cy = self.circle_center(t)
        ys, xs = np.indices(self.geometry.shape)
        return (xs - cx) ** 2 + (ys - cy) ** 2 <= self.circle.radius ** 2

    def background(self) -> np.ndarray:
        w = self.geometry.width
        ramp = np.full(w, self.bg_min) if w == 1 else np.linspace(self.bg_min, self.bg_max, w)
        return np.broadcast_to(ramp, self.geometry.shape)


@dataclass(frozen=True)
class TriggerModel:
    """Ideal contrast-threshold pixel: one event per ``threshold`` of log change."""

    threshold: float = 0.15

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError("contrast threshold must be positive")

    def step(self, ref: np.ndarray, L0: np.ndarray, L1: np.ndarray, t0_us: int, t1_us: int):
        """Fire events for one sample interval; updates ``ref`` in place.

        Returns flat pixel indices, timestamps and polarities, ordered by
        pixel and then by crossing order.  Crossing times are interpolated
        linearly in log intensity between the interval ends.
        """
        diff = (L1 - ref).ravel()
        n = np.floor(np.abs(diff) / self.threshold + _LEVEL_EPS).astype(np.int64)
        idx = np.flatnonzero(n)
        if not len(idx):
            return idx, np.zeros(0, np.int64), np.zeros(0, np.int8)
        counts = n[idx]
        sign = np.sign(diff[idx])
        pix = np.repeat(idx, counts)
        # j-th crossing (1-based) of each firing pixel
        j = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts) + 1
        sgn = np.repeat(sign, counts)
        level = ref.ravel()[pix] + sgn * j * self.threshold
        l0 = L0.ravel()[pix]
        l1 = L1.ravel()[pix]
        span = l1 - l0
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(span != 0, (level - l0) / span, 1.0)
        frac = np.clip(frac, 0.0, 1.0)
        ts = np.rint(t0_us + frac * (t1_us - t0_us)).astype(np.int64)
        ref.ravel()[idx] += sign * counts * self.threshold
        return pix, ts, sgn.astype(np.int8)


@dataclass(frozen=True)
class NoiseSpec:
    background_rate: float = 0.0  # events / pixel / s
    hot_pixels: tuple[tuple[int, int, float, int], ...] = ()  # (x, y, rate, polarity)
    seed: int = 0

    def __post_init__(self):
        if self.background_rate < 0 or any(h[2] < 0 for h in self.hot_pixels):
            raise ValueError("noise rates must be non-negative")
        if any(h[3] not in (1, -1) for h in self.hot_pixels):
            raise ValueError("hot pixel polarity must be +1 or -1")


def render_log_intensity(scene: SceneSpec, t: float) -> np.ndarray:
    """Log intensity of every pixel at time ``t`` (seconds), shape ``(H, W)``."""
    L = np.log(scene.background()).copy()
    if scene.circle.reflectivity != 1.0:
        L[scene.circle_mask(t)] += math.log(scene.circle.reflectivity)
    return L


def replay_ground_truth(scene: SceneSpec, times) -> list[np.ndarray]:
    return [render_log_intensity(scene, float(t)) for t in times]


def _check_sampling(scene: SceneSpec, L0, L1, m0, m1, threshold, dt_sample):
    # Crossing the circle edge is a step in log intensity at that pixel and is
    # spread linearly over the sample; limit it to one step per sample by
    # keeping the per-sample displacement under one pixel.
    if abs(scene.circle.velocity) * dt_sample > 1.0:
        raise SamplingTooCoarse(f"circle moves {abs(scene.circle.velocity) * dt_sample:.3g} px "
                                "per sample; reduce dt_sample below one pixel of motion")
    smooth = m0 == m1
    if np.any(np.abs(L1 - L0)[smooth] >= 2 * threshold):
        raise SamplingTooCoarse("log intensity changes by two thresholds or more within one sample")


def _noise_events(scene: SceneSpec, noise: NoiseSpec, rng: np.random.Generator):
    g = scene.geometry
    t_end = int(round(scene.duration * 1e6))
    parts = []
    if noise.background_rate > 0:
        n = rng.poisson(noise.background_rate * g.n_pixels * scene.duration)
        parts.append((rng.integers(0, t_end, n), rng.integers(0, g.width, n),
                      rng.integers(0, g.height, n), rng.choice(np.array([-1, 1]), n)))
    for hx, hy, rate, pol in noise.hot_pixels:
        if not (0 <= hx < g.width and 0 <= hy < g.height):
            raise ValueError(f"hot pixel ({hx}, {hy}) outside the sensor")
        n = rng.poisson(rate * scene.duration)
        parts.append((rng.integers(0, t_end, n), np.full(n, hx), np.full(n, hy), np.full(n, pol)))
    return parts


def generate_events(scene: SceneSpec, trigger: TriggerModel | None = None,
                    noise: NoiseSpec | None = None, dt_sample: float = 1e-3) -> EventBatch:
    """Simulate the scene and return a time-ordered batch spanning ``[0, duration]``.

    Signal events come first among equal timestamps, then background noise,
    then hot-pixel events.  Output is a deterministic function of the inputs
    and ``noise.seed``.
    """
    trigger = trigger or TriggerModel()
    noise = noise or NoiseSpec()
    if dt_sample <= 0:
        raise SamplingTooCoarse("sample interval must be positive")
    g = scene.geometry
    n_samples = max(1, int(math.ceil(scene.duration / dt_sample - 1e-9)))
    times = np.minimum(np.arange(n_samples + 1) * dt_sample, scene.duration)

    L_prev = render_log_intensity(scene, 0.0)
    m_prev = scene.circle_mask(0.0)
    ref = L_prev.copy()
    sig_pix, sig_t, sig_p = [], [], []
    for s in range(n_samples):
        t0, t1 = float(times[s]), float(times[s + 1])
        if scene.circle.velocity == 0 or t1 <= scene.lead_time:
            continue  # static scene: nothing changes
        L = render_log_intensity(scene, t1)
        m = scene.circle_mask(t1)
        _check_sampling(scene, L_prev, L, m_prev, m, trigger.threshold, dt_sample)
        pix, ts, ps = trigger.step(ref, L_prev, L, int(round(t0 * 1e6)), int(round(t1 * 1e6)))
        if len(pix):
            sig_pix.append(pix)
            sig_t.append(ts)
            sig_p.append(ps)
        L_prev, m_prev = L, m

    if sig_pix:
        pix = np.concatenate(sig_pix)
        cols = [np.concatenate(sig_t), pix % g.width, pix // g.width, np.concatenate(sig_p)]
    else:
        cols = [np.zeros(0, np.int64)] * 4
    parts = [cols]
    parts += _noise_events(scene, noise, np.random.default_rng(noise.seed))
    t = np.concatenate([np.asarray(c[0], np.int64) for c in parts])
    x = np.concatenate([np.asarray(c[1], np.int64) for c in parts])
    y = np.concatenate([np.asarray(c[2], np.int64) for c in parts])
    p = np.concatenate([np.asarray(c[3], np.int64) for c in parts])
    order = np.argsort(t, kind="stable")
    return EventBatch(t[order], x[order], y[order], p[order],
                      t_start=0, t_end=int(round(scene.duration * 1e6)))


def default_scene(**overrides) -> SceneSpec:
    return SceneSpec(**overrides)


def stationary_scene(scene: SceneSpec | None = None) -> SceneSpec:
    scene = scene or SceneSpec()
    c = scene.circle
    return SceneSpec(scene.geometry, scene.bg_min, scene.bg_max,
                     Circle(c.radius, c.reflectivity, c.center, 0.0),
                     scene.duration, scene.lead_time)


def noise_only_scene(geometry: SensorGeometry = SensorGeometry(128, 128),
                     duration: float = 2.0) -> SceneSpec:
    """A static scene with no circle, for pure-noise streams."""
    return SceneSpec(geometry, circle=Circle(reflectivity=1.0, velocity=0.0), duration=duration)
