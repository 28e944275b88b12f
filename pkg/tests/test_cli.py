import io
import json
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from fbpstream.cli import main

SPEC = {
    "n_streams": 5,
    "window_size": 10,
    "seed": 21,
    "regimes": [
        {"start_window": 0, "end_window": 4, "kind": "constant",
         "params": {"level": 1.0, "spread": 1.5}, "noise_sd": 0.3},
        {"start_window": 4, "end_window": 8, "kind": "constant",
         "params": {"level": 12.0, "spread": 1.5}, "noise_sd": 0.3},
    ],
}


@pytest.fixture(scope="module")
def stream_file(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli-data")
    spec_path = root / "spec.json"
    spec_path.write_text(json.dumps(SPEC))
    out = root / "stream.csv"
    assert main(["synth", "--spec", str(spec_path), "--output", str(out)]) == 0
    return out


def run_args(stream_file, out_dir, extra=()):
    return ["run", "--input", str(stream_file), "--out", str(out_dir),
            "--window-size", "10", "--snapshot-every", "2", *extra]


def tree_bytes(directory):
    return {p.name: p.read_bytes() for p in sorted(Path(directory).iterdir())}


def test_run_produces_report_snapshots_events(stream_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(run_args(stream_file, out)) == 0
    printed = capsys.readouterr().out
    assert "windows processed : 8" in printed
    assert (out / "report.txt").read_text() == printed
    names = {p.name for p in out.iterdir()}
    assert {"report.txt", "events.tsv"} <= names
    # snapshots at 0, 2, 4, 6, 8 (the final one coincides with the schedule)
    assert sorted(n for n in names if n.endswith(".fbpsnap")) == [
        f"snap_{t:08d}.fbpsnap" for t in (0, 2, 4, 6, 8)]


def test_report_conservation(stream_file, tmp_path):
    out = tmp_path / "out"
    report_file = tmp_path / "report.tsv"
    assert main(run_args(stream_file, out, ["--report-file", str(report_file)])) == 0
    rows = report_file.read_text().strip().splitlines()
    assert rows[0] == "cluster_id\tn_allocated\tlast_update"
    allocated = sum(int(r.split("\t")[1]) for r in rows[1:])
    report_text = (out / "report.txt").read_text()
    discarded = int(next(line for line in report_text.splitlines()
                         if line.startswith("discarded weight")).split(":")[1])
    assert allocated + discarded == 8


def test_run_is_byte_deterministic(stream_file, tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(run_args(stream_file, out1)) == 0
    assert main(run_args(stream_file, out2)) == 0
    assert tree_bytes(out1) == tree_bytes(out2)


def test_summarize_writes_summaries_and_figures(stream_file, tmp_path):
    out = tmp_path / "out"
    assert main(run_args(stream_file, out)) == 0
    sum1, sum2 = tmp_path / "s1", tmp_path / "s2"
    args = ["summarize", "--snapshots", str(out), "--from", "0", "--to", "8",
            "--clusters", "2", "--seed", "7"]
    assert main(args + ["--out", str(sum1)]) == 0
    assert main(args + ["--out", str(sum2)]) == 0
    assert tree_bytes(sum1) == tree_bytes(sum2)

    names = {p.name for p in sum1.iterdir()}
    assert names == {"summary_c0.fbp", "summary_c0.svg", "summary_c1.fbp",
                     "summary_c1.svg", "labels.tsv"}
    for svg in sorted(sum1.glob("*.svg")):
        root = ET.fromstring(svg.read_text())
        classes = {el.get("class") for el in root.iter() if el.get("class")}
        assert {"axes", "central-region", "median",
                "envelope-min", "envelope-max"} <= classes
    labels = (sum1 / "labels.tsv").read_text().strip().splitlines()
    assert labels[0] == "cluster_id\tmacro_index\tweight"
    assert sum(int(row.split("\t")[2]) for row in labels[1:]) == 8
    fbp_lines = (sum1 / "summary_c0.fbp").read_text().strip().splitlines()
    assert fbp_lines[0].startswith("fbp macro=0 weight=")
    assert len(fbp_lines) == 6


def test_stdin_run(stream_file, tmp_path, monkeypatch, capsys):
    out = tmp_path / "out"
    monkeypatch.setattr("sys.stdin", io.StringIO(stream_file.read_text()))
    assert main(["run", "--input", "-", "--out", str(out),
                 "--window-size", "10"]) == 0
    assert "windows processed : 8" in capsys.readouterr().out


def test_empty_input_runs_clean(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    out = tmp_path / "out"
    assert main(["run", "--input", str(empty), "--out", str(out)]) == 0
    assert "windows processed : 0" in capsys.readouterr().out
    assert (out / "snap_00000000.fbpsnap").exists()


def test_no_smooth_constant_regimes(tmp_path, capsys):
    spec = dict(SPEC)
    spec["regimes"] = [
        {"start_window": 0, "end_window": 4, "kind": "constant",
         "params": {"level": 1.0, "spread": 1.0}},
        {"start_window": 4, "end_window": 8, "kind": "constant",
         "params": {"level": 12.0, "spread": 1.0}},
    ]
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    stream = tmp_path / "stream.csv"
    assert main(["synth", "--spec", str(spec_path), "--output", str(stream)]) == 0
    out = tmp_path / "out"
    assert main(["run", "--input", str(stream), "--out", str(out),
                 "--window-size", "10", "--no-smooth"]) == 0
    report = (out / "report.txt").read_text()
    rows = [line.split() for line in report.splitlines()
            if line and line[0] == " " and line.strip()[0].isdigit()]
    # noiseless regimes: dominant clusters absorb all windows after bootstrap
    totals = sorted(int(r[1]) for r in rows)
    assert sum(totals) == 8


def test_exit_codes(tmp_path):
    missing = tmp_path / "missing.csv"
    assert main(["run", "--input", str(missing), "--out", str(tmp_path / "o")]) == 3
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3,x\n" * 6)
    assert main(["run", "--input", str(bad), "--out", str(tmp_path / "o2"),
                 "--window-size", "2"]) == 3
    good = tmp_path / "good.csv"
    good.write_text("1,2\n3,4\n")
    assert main(["run", "--input", str(good), "--out", str(tmp_path / "o3"),
                 "--window-size", "1"]) == 2
    assert main(["run", "--input", str(good), "--out", str(tmp_path / "o4"),
                 "--k-max", "1", "--window-size", "2"]) == 2
    assert main(["summarize", "--snapshots", str(tmp_path / "nowhere"),
                 "--from", "0", "--to", "8", "--clusters", "2",
                 "--out", str(tmp_path / "s")]) == 4


def test_degenerate_slot_exit(stream_file, tmp_path):
    out = tmp_path / "out"
    assert main(run_args(stream_file, out)) == 0
    assert main(["summarize", "--snapshots", str(out), "--from", "0", "--to", "1",
                 "--clusters", "1", "--out", str(tmp_path / "s")]) == 4
