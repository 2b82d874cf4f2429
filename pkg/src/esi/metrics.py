"""Scale- and offset-invariant scoring of frames against ground-truth log intensity."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import GeometryMismatch
from .events import Frame


@dataclass(frozen=True)
class FrameScore:
    t: int
    pearson: float | None  # None when either image is constant
    mse_norm: float | None

    @property
    def missing(self) -> bool:
        return self.pearson is None


@dataclass(frozen=True)
class RunScores:
    scores: list[FrameScore]
    mean_pearson: float | None
    min_pearson: float | None
    n_scored: int
    n_missing: int


def _standardize(a: np.ndarray) -> np.ndarray | None:
    a = np.asarray(a, dtype=np.float64).ravel()
    sd = a.std()
    if not np.isfinite(sd) or sd <= 1e-12 * max(1.0, np.abs(a).max()):
        return None
    return (a - a.mean()) / sd


def score_arrays(recon: np.ndarray, truth: np.ndarray, t: int = 0) -> FrameScore:
    if np.shape(recon) != np.shape(truth):
        raise GeometryMismatch(f"shape {np.shape(recon)} vs ground truth {np.shape(truth)}")
    zr = _standardize(recon)
    zt = _standardize(truth)
    if zr is None or zt is None:
        return FrameScore(t, None, None)
    r = float(np.clip(np.mean(zr * zt), -1.0, 1.0))
    mse = float(np.mean((zr - zt) ** 2))
    return FrameScore(t, r, mse)


def score_frame(recon: Frame, truth_log_intensity: np.ndarray) -> FrameScore:
    """Pearson correlation and normalized MSE of a frame against the true log intensity.

    Both images are standardized to zero mean and unit variance first, so
    only relative intensity matters.  A constant image on either side yields
    a score with both fields missing.
    """
    return score_arrays(recon.pixels, truth_log_intensity, recon.t_emit)


def score_run(frames: Sequence[Frame], truth_provider: Callable[[int], np.ndarray | None]) -> RunScores:
    """Score every frame that has ground truth at its timestamp.

    ``truth_provider`` maps a frame timestamp (µs) to a log-intensity matrix,
    or ``None`` if no truth is available, in which case the frame is skipped.
    """
    scores = []
    for f in frames:
        truth = truth_provider(f.t_emit)
        if truth is None:
            continue
        scores.append(score_frame(f, truth))
    valid = [s.pearson for s in scores if s.pearson is not None]
    return RunScores(
        scores,
        float(np.mean(valid)) if valid else None,
        float(np.min(valid)) if valid else None,
        len(valid),
        len(scores) - len(valid),
    )


def write_scores_csv(path, scores: Iterable[FrameScore], method: str | None = None) -> None:
    """Write ``t_us,pearson,mse_norm`` rows (prefixed by ``method`` when given); missing is blank."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        header = ["t_us", "pearson", "mse_norm"]
        w.writerow((["method"] if method else []) + header)
        for s in scores:
            row = [s.t, format_optional(s.pearson), format_optional(s.mse_norm)]
            w.writerow(([method] if method else []) + row)


def format_optional(v):
    return "" if v is None else repr(float(v))
