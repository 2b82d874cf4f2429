import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esi import evio, metrics
from esi.baselines import (METHODS, ComplementaryFilterEventsOnly, ExpDecayAccumulator,
                           NaiveIntegrator, exp_decay_factor, make_reconstructor)
from esi.decay import DecayParams, decay_factor
from esi.errors import NegativeInterval
from esi.events import EventBatch, SensorGeometry
from esi.reconstruct import Reconstructor

from conftest import random_stream

G = SensorGeometry(4, 3)


def test_naive_cancellation():
    r = NaiveIntegrator(G)
    r.integrate(EventBatch([10, 20], [1, 1], [1, 1], [1, -1]))
    assert r.S[1, 1] == 0.0


@pytest.mark.parametrize("n", [1, 7, 40])
def test_naive_linearity(n):
    r = NaiveIntegrator(G, threshold=0.15)
    r.integrate(EventBatch(np.arange(n) * 1000, np.zeros(n), np.zeros(n), np.ones(n)))
    assert r.S[0, 0] == pytest.approx(n * 0.15, rel=1e-12)


def test_naive_clamps_only_at_render():
    n = 40
    r = NaiveIntegrator(G)
    frames = r.process_events(EventBatch(np.arange(n) * 1000, np.zeros(n), np.zeros(n), np.ones(n)))
    assert r.S[0, 0] == pytest.approx(6.0)
    assert frames[-1].pixels[0, 0] == 255


def test_naive_ignores_time_order():
    # naive has no time dependence, so it never rejects a stream on timing grounds
    r = NaiveIntegrator(G)
    r.integrate(EventBatch([100], [0], [0], [1]))
    r.integrate(EventBatch([50], [0], [0], [1]))
    assert r.S[0, 0] == pytest.approx(0.3)


def test_exp_factor_examples():
    assert exp_decay_factor(0.0, 10) == 1.0
    assert exp_decay_factor(0.1, 10) == pytest.approx(0.36787944117, abs=1e-10)


@settings(max_examples=300, deadline=None)
@given(rate=st.floats(0.1, 100), dt=st.floats(0, 0.1), n=st.integers(1, 50))
def test_exp_compounding_is_exact(rate, dt, n):
    # negative control: the exponential family gives no extra suppression for split gaps
    assert exp_decay_factor(dt, rate) ** n == pytest.approx(exp_decay_factor(n * dt, rate),
                                                            abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(a=st.floats(0, 1), b=st.floats(0, 1), rate=st.floats(0.1, 50))
def test_exp_product_identity(a, b, rate):
    assert abs(exp_decay_factor(a, rate) * exp_decay_factor(b, rate)
               - exp_decay_factor(a + b, rate)) <= 1e-12


def test_polynomial_vs_exponential_split_contrast():
    p = DecayParams(10, 2)
    # several short gaps decay less than one long gap for the polynomial family
    split = decay_factor(0.01, p) ** 5
    assert split > decay_factor(0.05, p)
    assert exp_decay_factor(0.01, 10) ** 5 == pytest.approx(exp_decay_factor(0.05, 10), abs=1e-15)


def test_expdecay_update_order_matches_esi_loop():
    r = ExpDecayAccumulator(G, threshold=0.15, rate=10)
    r.integrate(EventBatch([0, 100_000], [2, 2], [0, 0], [1, 1]))
    s0 = 0.15  # first event at t=0: dt=0, factor 1
    want = (s0 + 0.15) * math.exp(-1.0)
    assert r.S[0, 2] == pytest.approx(want, rel=1e-12)


def test_expdecay_clamps_per_event():
    n = 100
    r = ExpDecayAccumulator(G)
    r.integrate(EventBatch(np.arange(n), np.zeros(n), np.zeros(n), np.ones(n)))
    assert r.S[0, 0] == 1.5


def test_expdecay_negative_interval():
    r = ExpDecayAccumulator(G)
    with pytest.raises(NegativeInterval):
        r.integrate(EventBatch([100, 50], [0, 0], [1, 1], [1, 1], check=False))


def test_compfilter_examples():
    r = ComplementaryFilterEventsOnly(G, threshold=0.15, alpha=5)
    r.integrate(EventBatch([300_000], [1], [2], [1]))
    assert r.L[2, 1] == pytest.approx(0.15)
    r.integrate(EventBatch([500_000], [1], [2], [1]))
    assert r.L[2, 1] == pytest.approx(0.15 * math.exp(-1) + 0.15, abs=1e-12)
    assert r.L[2, 1] == pytest.approx(0.2052, abs=1e-4)


def test_compfilter_relaxes_to_mid_gray():
    r = ComplementaryFilterEventsOnly(G, alpha=10)
    b = EventBatch([0, 10, 20], [0, 1, 2], [0, 1, 2], [1, -1, 1], t_start=0, t_end=3_000_000)
    frames = r.process_events(b)
    assert frames[0].pixels[0, 0] != 128
    assert np.abs(r.values(b.t_end)).max() < 1e-12
    # a vanishing negative value sits just under the 127.5 midpoint
    assert np.all(np.abs(frames[-1].pixels.astype(int) - 128) <= 1)


def test_compfilter_negative_interval():
    r = ComplementaryFilterEventsOnly(G)
    r.integrate(EventBatch([100], [0], [0], [1]))
    with pytest.raises(NegativeInterval):
        r.integrate(EventBatch([50], [0], [0], [1]))


def test_parameter_validation():
    with pytest.raises(ValueError):
        ExpDecayAccumulator(G, rate=0)
    with pytest.raises(ValueError):
        ComplementaryFilterEventsOnly(G, alpha=-1)
    with pytest.raises(ValueError, match="valid methods"):
        make_reconstructor("bogus", G)


@pytest.mark.parametrize("method", list(METHODS))
def test_common_interface_swap(method, tmp_path, rng):
    # the same I/O and scoring code drives every reconstructor
    g = SensorGeometry(8, 8)
    b = random_stream(rng, 500, g, t_max_us=100_000)
    r = make_reconstructor(method, g, origin=0)
    assert isinstance(r, Reconstructor)
    frames = r.process_events(b)
    assert len(frames) == 10
    evio.write_frame_pgm(frames[-1], tmp_path / "f.pgm")
    assert evio.read_pgm(tmp_path / "f.pgm").shape == g.shape
    truth = rng.normal(size=g.shape)
    metrics.score_frame(frames[-1], truth)
    r.reset()
    assert np.all(r.render(0).pixels == 128)


@pytest.mark.parametrize("method", list(METHODS))
def test_frame_rate_independence_all_methods(method, rng):
    g = SensorGeometry(8, 8)
    b = random_stream(rng, 1500, g, t_max_us=500_000)
    finals = []
    for fps in (10, 100, 1000):
        r = make_reconstructor(method, g, frame_rate=fps, origin=0)
        r.process_events(b)
        finals.append(r.render(b.t_end).pixels)
    assert np.array_equal(finals[0], finals[1]) and np.array_equal(finals[0], finals[2])


def test_naive_random_walk_grows_while_esi_stays_bounded():
    g = SensorGeometry(16, 16)
    rng = np.random.default_rng(7)
    worst = {}
    for n in (2_000, 50_000):
        b = random_stream(rng, n, g, t_max_us=n * 100)
        for m in ("naive", "esi"):
            r = make_reconstructor(m, g)
            r.integrate(b)
            worst[m, n] = float(np.abs(r.values(b.t_end)).max())
    assert worst["naive", 50_000] > 2 * worst["naive", 2_000]
    assert worst["esi", 50_000] <= 1.5
