"""Key-value configuration shared by all subcommands.

File format: one ``key = value`` per line, ``#`` starts a comment, blank
lines ignored.  Keys use underscores (``output_dir``); the matching command
line flag uses dashes (``--output-dir``).  Precedence: built-in defaults,
then the config file, then flags.

Recognised keys
---------------

=============== ========================================================
method          esi | naive | expdecay | compfilter
methods         comma list of methods (compare / bench)
fps             frame rate, frames/s
k, b            polynomial decay rate (1/s) and exponent
threshold       contrast threshold C per event
smin, smax      clamp bounds
lambda          exponential-decay baseline rate (1/s)
alpha           complementary-filter gain (1/s)
seed            RNG seed for simulation and synthetic benchmarks
input, output   event file paths
output_dir      directory for frames, manifests, reports
format          csv | bin (event files; default from suffix)
strict_time     reject decreasing timestamps in CSV input
origin, t_end   frame-grid origin and stream end, µs
width, height   sensor size (simulation, or CSV input lacking a header)
truth           ground-truth ``.npz`` (compare)
truth_out       where simulate writes ground truth
bg_min, bg_max  background intensity ramp ends (linear units)
radius          circle radius, px
reflectivity    circle reflectivity in (0, 1]
center_x/_y     circle centre at t=0, px
velocity        circle speed along x, px/s
duration        simulated duration, s
lead_time       stationary lead before motion, s
dt_sample       simulator sampling step, s
noise_rate      background activity, events/pixel/s
hot_pixels      ``x:y:rate:polarity`` entries separated by ``;``
n_events        synthetic benchmark size
event_rate      synthetic benchmark event rate, events/s
repeats         benchmark repeats (>= 3)
fps_list        comma list of frame rates for per-frame timing
pipelined       also time the staged pipeline
=============== ========================================================
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Any, Callable

from .baselines import METHODS


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config key '{key}': {message}")
        self.key = key


def _bool(s: str) -> bool:
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _pos(conv):
    def f(s):
        v = conv(s)
        if not v > 0:
            raise ValueError(f"must be positive, got {v}")
        return v
    return f


def _nonneg(conv):
    def f(s):
        v = conv(s)
        if v < 0:
            raise ValueError(f"must be non-negative, got {v}")
        return v
    return f


def _choice(*options):
    def f(s):
        s = str(s).strip()
        if s not in options:
            raise ValueError(f"{s!r} is not one of: {', '.join(options)}")
        return s
    return f


def _method_list(s):
    items = [m.strip() for m in str(s).split(",") if m.strip()]
    for m in items:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; valid methods: {', '.join(METHODS)}")
    if not items:
        raise ValueError("empty method list")
    return items


def _float_list(s):
    vals = [float(v) for v in str(s).split(",") if v.strip()]
    if not vals or any(v <= 0 for v in vals):
        raise ValueError("need one or more positive numbers")
    return vals


def _hot_pixels(s):
    out = []
    for item in str(s).split(";"):
        item = item.strip()
        if not item:
            continue
        x, y, rate, pol = item.split(":")
        pol = int(pol)
        if pol not in (1, -1):
            raise ValueError(f"hot pixel polarity must be 1 or -1 in {item!r}")
        out.append((int(x), int(y), float(rate), pol))
    return tuple(out)


def _int_or_none(s):
    return None if s is None or str(s).strip() == "" else int(s)


def _str(s):
    return str(s).strip()


@dataclass(frozen=True)
class Key:
    conv: Callable[[Any], Any]
    default: Any


SCHEMA: dict[str, Key] = {
    "method": Key(_choice(*METHODS), "esi"),
    "methods": Key(_method_list, list(METHODS)),
    "fps": Key(_pos(float), 100.0),
    "k": Key(_pos(float), 10.0),
    "b": Key(_pos(float), 2.0),
    "threshold": Key(_pos(float), 0.15),
    "smin": Key(float, -1.5),
    "smax": Key(float, 1.5),
    "lambda": Key(_pos(float), 10.0),
    "alpha": Key(_pos(float), 10.0),
    "seed": Key(int, 0),
    "input": Key(_str, None),
    "output": Key(_str, None),
    "output_dir": Key(_str, "."),
    "format": Key(_choice("csv", "bin"), None),
    "strict_time": Key(_bool, False),
    "origin": Key(_int_or_none, None),
    "t_end": Key(_int_or_none, None),
    "width": Key(_pos(int), None),
    "height": Key(_pos(int), None),
    "truth": Key(_str, None),
    "truth_out": Key(_str, None),
    "bg_min": Key(_pos(float), 0.2),
    "bg_max": Key(_pos(float), 1.0),
    "radius": Key(_nonneg(float), 18.0),
    "reflectivity": Key(_pos(float), 0.3),
    "center_x": Key(float, 100.0),
    "center_y": Key(float, 64.0),
    "velocity": Key(float, -60.0),
    "duration": Key(_pos(float), 2.5),
    "lead_time": Key(_nonneg(float), 0.5),
    "dt_sample": Key(_pos(float), 1e-3),
    "noise_rate": Key(_nonneg(float), 0.0),
    "hot_pixels": Key(_hot_pixels, ()),
    "n_events": Key(_pos(int), 10_000_000),
    "event_rate": Key(_pos(float), 12e6),
    "repeats": Key(int, 5),
    "fps_list": Key(_float_list, [25.0, 50.0, 100.0, 200.0, 400.0]),
    "pipelined": Key(_bool, False),
}

ENV_VAR = "ESI_CONFIG"


def read_kv_file(path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(line, f"line {lineno} of {path} is not 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in SCHEMA:
                raise ConfigError(key, "unknown key")
            out[key] = value
    return out


def convert(key: str, value: Any) -> Any:
    if key not in SCHEMA:
        raise ConfigError(key, "unknown key")
    if value is None:
        return None
    try:
        return SCHEMA[key].conv(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(key, str(exc)) from None


def load_config(path=None, overrides: dict[str, Any] | None = None) -> dict[str, Any]:
    """Defaults, then ``path`` (or ``$ESI_CONFIG``), then non-None ``overrides``; all validated."""
    cfg = {k: spec.default for k, spec in SCHEMA.items()}
    path = path or os.environ.get(ENV_VAR)
    if path:
        try:
            entries = read_kv_file(path)
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        for k, v in entries.items():
            cfg[k] = convert(k, v)
    for k, v in (overrides or {}).items():
        if v is not None:
            cfg[k] = convert(k, v)
    if not cfg["smin"] < cfg["smax"]:
        raise ConfigError("smin", f"must be below smax ({cfg['smin']} >= {cfg['smax']})")
    if cfg["repeats"] < 3:
        raise ConfigError("repeats", "must be at least 3")
    if cfg["reflectivity"] > 1:
        raise ConfigError("reflectivity", "must not exceed 1")
    return cfg


def write_kv_file(path, cfg: dict[str, Any], keys=None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for k in keys or cfg:
            v = cfg[k]
            if v is None:
                continue
            if isinstance(v, (list, tuple)):
                if k == "hot_pixels":
                    v = ";".join(":".join(str(p) for p in h) for h in v)
                else:
                    v = ",".join(str(i) for i in v)
            f.write(f"{k} = {v}\n")
