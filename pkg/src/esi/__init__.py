"""Fast intensity reconstruction from event-camera streams.

The main entry points are :class:`EsiReconstructor` (lazy polynomial-decay
accumulation with clamping and linear 8-bit mapping), the baselines in
:mod:`esi.baselines`, the simulator in :mod:`esi.synth` and the file
formats in :mod:`esi.evio`.
"""

from .baselines import (METHODS, ComplementaryFilterEventsOnly, ExpDecayAccumulator,
                        NaiveIntegrator, make_reconstructor)
from .decay import DecayParams, StateMatrices, apply_event, decay_factor, integrate, peek_decayed
from .errors import (BadMagic, BadPolarity, CountMismatch, EsiError, GeometryMismatch,
                     NegativeInterval, NonMonotoneTime, NonPositiveIntensity, OutOfBounds,
                     ParseError, SamplingTooCoarse, TruncatedFile)
from .events import DAVIS346, Event, EventBatch, Frame, SensorGeometry, validate_event
from .reconstruct import EsiParams, EsiReconstructor, Reconstructor, clamp, map_to_gray, run_esi

__version__ = "0.1.0"

__all__ = [
    "METHODS", "ComplementaryFilterEventsOnly", "ExpDecayAccumulator", "NaiveIntegrator",
    "make_reconstructor", "DecayParams", "StateMatrices", "apply_event", "decay_factor",
    "integrate", "peek_decayed", "BadMagic", "BadPolarity", "CountMismatch", "EsiError",
    "GeometryMismatch", "NegativeInterval", "NonMonotoneTime", "NonPositiveIntensity",
    "OutOfBounds", "ParseError", "SamplingTooCoarse", "TruncatedFile", "DAVIS346", "Event",
    "EventBatch", "Frame", "SensorGeometry", "validate_event", "EsiParams", "EsiReconstructor",
    "Reconstructor", "clamp", "map_to_gray", "run_esi",
]
