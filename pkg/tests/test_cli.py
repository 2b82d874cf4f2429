import csv

import numpy as np
import pytest

from esi import evio
from esi.cli import main

SMALL = ["--width", "40", "--height", "32", "--radius", "6", "--center-x", "30",
         "--center-y", "16", "--velocity", "-40", "--duration", "0.5", "--lead-time", "0.1"]


def simulate(tmp_path, *extra, name="ev.bin"):
    out = tmp_path / name
    assert main(["simulate", *SMALL, "--output", str(out), *extra]) == 0
    return out


def test_simulate_deterministic(tmp_path, capsys):
    a = simulate(tmp_path, "--noise-rate", "2", "--seed", "5", name="a.bin")
    b = simulate(tmp_path, "--noise-rate", "2", "--seed", "5", name="b.bin")
    assert a.read_bytes() == b.read_bytes()
    assert "events:" in capsys.readouterr().out
    _, batch = evio.read_events(a)
    assert len(batch) > 0


def test_simulate_stationary_is_empty(tmp_path):
    out = simulate(tmp_path, "--velocity", "0")
    assert out.stat().st_size == 20


def test_simulate_csv_format(tmp_path):
    out = simulate(tmp_path, "--format", "csv", name="ev.csv")
    geom, batch = evio.read_events(out)
    assert (geom.width, geom.height) == (40, 32) and len(batch) > 0


def test_bad_config_key_exits_2(tmp_path, capsys):
    conf = tmp_path / "c.conf"
    conf.write_text("speed = 3\n")
    assert main(["simulate", "--config", str(conf)]) == 2
    assert "speed" in capsys.readouterr().err


def test_bad_value_names_key(tmp_path, capsys):
    assert main(["reconstruct", "--smin", "2", "--smax", "1"]) == 2
    assert "smin" in capsys.readouterr().err


def test_unknown_method_exits_2(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["reconstruct", "--method", "e2vid"])
    assert ei.value.code == 2
    err = capsys.readouterr().err
    assert all(m in err for m in ("esi", "naive", "expdecay", "compfilter"))


def test_reconstruct_frame_count_and_manifest(tmp_path):
    ev = simulate(tmp_path)
    out = tmp_path / "frames"
    assert main(["reconstruct", "--input", str(ev), "--output-dir", str(out),
                 "--origin", "0", "--t-end", "500000"]) == 0
    with open(out / "manifest.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["index", "t_us", "path"]
    assert len(rows) - 1 == 50  # ceil(0.5 s * 100 FPS)
    assert rows[1] == ["1", "0", "frame_000001.pgm"]
    assert rows[-1] == ["50", "490000", "frame_000050.pgm"]
    first = evio.read_pgm(out / "frame_000001.pgm")
    assert first.shape == (32, 40) and np.all(first == 128)


def test_reconstruct_missing_input_exits_2(tmp_path):
    assert main(["reconstruct", "--output-dir", str(tmp_path)]) == 2


def test_reconstruct_negative_interval_exits_1(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("# 4,4\n10,0,0,1\n5,0,0,1\n")
    assert main(["reconstruct", "--input", str(p), "--strict-time",
                 "--output-dir", str(tmp_path)]) == 1
    assert "decrease" in capsys.readouterr().err


def test_compare_outputs_scores(tmp_path, capsys):
    ev = simulate(tmp_path, "--truth-out", str(tmp_path / "truth.npz"))
    out = tmp_path / "cmp"
    assert main(["compare", "--input", str(ev), "--truth", str(tmp_path / "truth.npz"),
                 "--methods", "esi,naive", "--output-dir", str(out)]) == 0
    text = capsys.readouterr().out
    assert "esi" in text and "naive" in text
    with open(out / "scores.csv") as f:
        rows = list(csv.DictReader(f))
    assert {r["method"] for r in rows} == {"esi", "naive"}
    assert len(rows) == 2 * 50


def test_compare_without_truth_exits_2(tmp_path):
    ev = simulate(tmp_path)
    assert main(["compare", "--input", str(ev), "--output-dir", str(tmp_path)]) == 2
    assert main(["compare", "--input", str(ev), "--truth", str(tmp_path / "none.npz"),
                 "--output-dir", str(tmp_path)]) == 2


def test_noise_saturates_naive_but_not_esi(tmp_path):
    ev = tmp_path / "noise.bin"
    assert main(["simulate", "--width", "64", "--height", "64", "--reflectivity", "1",
                 "--velocity", "0", "--duration", "2", "--noise-rate", "5",
                 "--hot-pixels", "10:10:10000:1", "--seed", "9", "--output", str(ev)]) == 0
    last = {}
    for m in ("naive", "esi"):
        out = tmp_path / m
        assert main(["reconstruct", "--method", m, "--input", str(ev), "--output-dir", str(out),
                     "--origin", "0", "--t-end", "2000000"]) == 0
        last[m] = evio.read_pgm(out / "frame_000200.pgm").astype(int)
    dev = {m: np.abs(px - 128) for m, px in last.items()}
    assert dev["naive"].mean() > 5 * dev["esi"].mean()
    assert last["naive"][10, 10] == 255
    assert np.percentile(dev["esi"], 99) < 20


def test_bench_writes_reports(tmp_path, capsys):
    out = tmp_path / "b"
    assert main(["bench", "--method", "esi", "--n-events", "20000", "--width", "64",
                 "--height", "48", "--repeats", "3", "--fps-list", "100,200",
                 "--output-dir", str(out)]) == 0
    assert "throughput" in (out / "bench.txt").read_text()
    rows = list(csv.DictReader(open(out / "bench.csv")))
    assert [r["fps"] for r in rows] == ["100", "200"]
    assert float(rows[0]["throughput_ev_s"]) > 0
