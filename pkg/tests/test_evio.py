import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esi import evio
from esi.errors import BadMagic, CountMismatch, NonMonotoneTime, ParseError, TruncatedFile
from esi.events import EventBatch, Frame, SensorGeometry

from conftest import random_stream

G = SensorGeometry(346, 260)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_csv_example(tmp_path):
    geom, b = evio.read_events_csv(write(tmp_path, "a.csv", "0,1,2,1\n5,1,2,-1\n"))
    assert geom is None
    assert b.t.tolist() == [0, 5] and b.p.tolist() == [1, -1]
    assert b.x.tolist() == [1, 1] and b.y.tolist() == [2, 2]


def test_csv_geometry_header(tmp_path):
    geom, b = evio.read_events_csv(write(tmp_path, "a.csv", "# 64,48\n3,63,47,-1\n"))
    assert geom == SensorGeometry(64, 48)
    assert len(b) == 1


@pytest.mark.parametrize("body,line", [
    ("0,1,2,0\n", 1),
    ("0,1,2,1\n5,1,2,1\n7,1,x,1\n", 3),
    ("# 8,8\n0,1,2,1\n1,2,3\n", 3),
    ("0,1,2,1\n-4,1,2,1\n", 2),
])
def test_csv_parse_error_reports_line(tmp_path, body, line):
    with pytest.raises(ParseError) as ei:
        evio.read_events_csv(write(tmp_path, "bad.csv", body))
    assert ei.value.line == line


def test_csv_non_monotone(tmp_path):
    p = write(tmp_path, "nm.csv", "10,0,0,1\n5,1,1,-1\n")
    with pytest.raises(NonMonotoneTime):
        evio.read_events_csv(p, strict=True)
    with pytest.warns(UserWarning, match="re-sorted"):
        _, b = evio.read_events_csv(p)
    assert b.t.tolist() == [5, 10] and b.p.tolist() == [-1, 1]


def test_csv_empty_and_comments(tmp_path):
    _, b = evio.read_events_csv(write(tmp_path, "e.csv", ""))
    assert len(b) == 0
    _, b = evio.read_events_csv(write(tmp_path, "c.csv", "# 4,4\n\n# note\n1,0,0,1\n"))
    assert len(b) == 1


def test_bin_empty_is_header_only(tmp_path):
    p = tmp_path / "e.bin"
    evio.write_events_bin(p, EventBatch.empty(), SensorGeometry(346, 260))
    raw = p.read_bytes()
    assert len(raw) == 20
    assert raw == b"EVS1BIN\0" + struct.pack("<HHQ", 346, 260, 0)


def test_bin_one_event_layout(tmp_path):
    p = tmp_path / "one.bin"
    evio.write_events_bin(p, EventBatch([123456789], [300], [7], [-1]), G)
    raw = p.read_bytes()
    assert len(raw) == 36
    assert raw[20:] == struct.pack("<QHHb3x", 123456789, 300, 7, -1)
    geom, b = evio.read_events_bin(p)
    assert geom == G and b.t.tolist() == [123456789] and b.p.tolist() == [-1]


def test_bin_errors(tmp_path):
    p = tmp_path / "ok.bin"
    evio.write_events_bin(p, EventBatch([1, 2], [0, 1], [0, 1], [1, -1]), G)
    raw = p.read_bytes()

    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"EVS2BIN\0" + raw[8:])
    with pytest.raises(BadMagic):
        evio.read_events_bin(bad)
    bad.write_bytes(raw[:-1])
    with pytest.raises(TruncatedFile):
        evio.read_events_bin(bad)
    bad.write_bytes(raw[:10])
    with pytest.raises(TruncatedFile):
        evio.read_events_bin(bad)
    bad.write_bytes(raw + bytes(16))
    with pytest.raises(CountMismatch):
        evio.read_events_bin(bad)
    with pytest.raises(CountMismatch):
        list(evio.iter_events_bin(bad))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(0, 300))
def test_round_trips(tmp_path_factory, seed, n):
    d = tmp_path_factory.mktemp("rt")
    rng = np.random.default_rng(seed)
    b = random_stream(rng, n, G, t_max_us=2**40)
    evio.write_events_csv(d / "a.csv", b, G)
    g1, b1 = evio.read_events_csv(d / "a.csv")
    evio.write_events_bin(d / "a.bin", b1, g1)
    g2, b2 = evio.read_events_bin(d / "a.bin")
    evio.write_events_csv(d / "b.csv", b2, g2)
    assert g1 == g2 == G
    assert b1 == b and b2 == b
    assert (d / "a.csv").read_bytes() == (d / "b.csv").read_bytes()


@pytest.mark.parametrize("fmt", ["csv", "bin"])
def test_chunked_equals_whole(tmp_path, rng, fmt):
    b = random_stream(rng, 1000, G)
    path = tmp_path / f"s.{fmt}"
    evio.write_events(path, b, G)
    _, whole = evio.read_events(path)
    it = evio.iter_events_csv if fmt == "csv" else evio.iter_events_bin
    chunks = list(it(path, chunk_size=77))
    assert all(len(c) <= 77 for c in chunks)
    assert EventBatch.concat(chunks) == whole == b


def test_pgm_zero_frame_bytes(tmp_path):
    g = SensorGeometry(2, 2)
    f = Frame(0, np.zeros((2, 2), np.uint8), g)
    evio.write_frame_pgm(f, tmp_path / "z.pgm")
    assert (tmp_path / "z.pgm").read_bytes() == b"P5\n2 2\n255\n" + bytes(4)


def test_pgm_all_white_and_row_major(tmp_path):
    g = SensorGeometry(3, 2)
    assert evio.frame_pgm_bytes(Frame(0, np.full((2, 3), 255, np.uint8), g)).endswith(b"\xff" * 6)
    px = np.arange(6, dtype=np.uint8).reshape(2, 3)
    data = evio.frame_pgm_bytes(Frame(0, px, g))
    assert data == b"P5\n3 2\n255\n" + bytes(range(6))


def test_pgm_readable_by_pillow(tmp_path, rng):
    Image = pytest.importorskip("PIL.Image")
    g = SensorGeometry(17, 9)
    px = rng.integers(0, 256, g.shape).astype(np.uint8)
    evio.write_frame_pgm(Frame(0, px, g), tmp_path / "r.pgm")
    with Image.open(tmp_path / "r.pgm") as im:
        assert im.size == (17, 9)
        assert np.array_equal(np.asarray(im), px)
    assert np.array_equal(evio.read_pgm(tmp_path / "r.pgm"), px)


def test_format_dispatch(tmp_path):
    b = EventBatch([1], [2], [3], [1])
    evio.write_events(tmp_path / "x.dat", b, G, fmt="csv")
    assert (tmp_path / "x.dat").read_text().startswith("# 346,260")
    with pytest.raises(ValueError):
        evio.write_events(tmp_path / "x.dat", b, G, fmt="aedat")
