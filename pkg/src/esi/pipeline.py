"""Staged ingestion -> reconstruction -> encoding pipeline over bounded queues."""

from __future__ import annotations

import queue
import threading
from typing import Callable, Iterable

import numpy as np

from .events import EventBatch, Frame
from .reconstruct import Reconstructor

_DONE = object()


def packetize(batch: EventBatch, period_us: int = 10_000) -> list[EventBatch]:
    """Split a batch into consecutive packets covering ``period_us`` of stream time each.

    Packet spans tile the batch span, so feeding them in order to a
    reconstructor yields the same frames as the whole batch.
    """
    if batch.t_start is None:
        return []
    t0, t_end = batch.t_start, batch.t_end
    edges = list(range(t0, t_end, period_us)) + [t_end]
    if len(edges) == 1:
        edges.append(t_end)
    idx = np.searchsorted(batch.t, edges[1:-1], side="left")
    bounds = [0, *idx.tolist(), len(batch)]
    packets = []
    for n, (i, j) in enumerate(zip(bounds[:-1], bounds[1:])):
        part = batch[i:j]
        packets.append(EventBatch(part.t, part.x, part.y, part.p, t_start=edges[n],
                                  t_end=edges[n + 1], check=False))
    return packets


def run_pipeline(source: Iterable[EventBatch], reconstructor: Reconstructor,
                 sink: Callable[[Frame], None], maxsize: int = 8) -> int:
    """Run the three stages on separate threads and return the number of frames emitted.

    Ordering is preserved end to end.  The first exception raised in any
    stage is re-raised here after the other stages wind down.
    """
    batches: queue.Queue = queue.Queue(maxsize)
    frames: queue.Queue = queue.Queue(maxsize * 4)
    errors: list[BaseException] = []
    stop = threading.Event()
    count = 0

    def put(q, item):
        while not stop.is_set():
            try:
                q.put(item, timeout=0.05)
                return True
            except queue.Full:
                continue
        return False

    def get(q):
        while True:
            try:
                return q.get(timeout=0.05)
            except queue.Empty:
                if stop.is_set():
                    return _DONE

    def ingest():
        try:
            for b in source:
                if not put(batches, b):
                    return
        except BaseException as exc:  # noqa: BLE001 - forwarded to caller
            errors.append(exc)
            stop.set()
        finally:
            put(batches, _DONE)

    def reconstruct():
        try:
            while True:
                b = get(batches)
                if b is _DONE or stop.is_set():
                    break
                for f in reconstructor.process_events(b):
                    if not put(frames, f):
                        return
        except BaseException as exc:  # noqa: BLE001
            errors.append(exc)
            stop.set()
        finally:
            frames.put(_DONE)

    threads = [threading.Thread(target=ingest, daemon=True),
               threading.Thread(target=reconstruct, daemon=True)]
    for th in threads:
        th.start()
    try:
        while True:
            f = frames.get()
            if f is _DONE:
                break
            if not stop.is_set():
                sink(f)
                count += 1
    except BaseException as exc:
        errors.append(exc)
        stop.set()
        # drain so the producers can exit
        while frames.get() is not _DONE:
            pass
    finally:
        stop.set()
        for th in threads:
            th.join()
    if errors:
        raise errors[0]
    return count
