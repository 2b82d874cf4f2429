import numpy as np
import pytest

from esi.events import EventBatch, SensorGeometry


def random_stream(rng, n, geometry, t_max_us=500_000):
    """Sorted random events with duplicate timestamps likely."""
    t = np.sort(rng.integers(0, t_max_us, n))
    x = rng.integers(0, geometry.width, n)
    y = rng.integers(0, geometry.height, n)
    p = rng.choice([-1, 1], n)
    return EventBatch(t, x, y, p)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def g8():
    return SensorGeometry(8, 8)


# -- acceptance reporting -----------------------------------------------------
# Each acceptance check records one verdict line; the lines are echoed as they
# happen (visible with -s) and repeated together at the end of the run.

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    def record(criterion: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
