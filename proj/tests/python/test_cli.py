"""End-to-end checks of the fogkit command-line tool."""

import csv
import filecmp
import json
import os
import subprocess
from pathlib import Path

import pytest

BIN = os.environ.get("FOGKIT_BIN", "fogkit")

# Small grid and few replications keep each evaluation to seconds.
FAST = [
    "--replications", "2",
    "--folds", "3",
    "--set", "grid.C=[1,16]",
    "--set", "grid.gamma=[0.01,0.1]",
]


def run(*args, check=True):
    proc = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"{args} exited {proc.returncode}:\n{proc.stderr}")
    return proc


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth") / "data"
    run("synth", "--subjects", 2, "--duration", 40, "--episodes", 2, "--seed", 7, "--out", out)
    return out


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def test_missing_input_is_an_input_error(tmp_path):
    missing = tmp_path / "nowhere"
    proc = run("features", "--in", missing, "--out", tmp_path / "o", check=False)
    assert proc.returncode == 1
    assert str(missing) in proc.stderr


def test_unknown_flag_is_an_input_error(tmp_path):
    proc = run("synth", "--out", tmp_path, "--bogus", check=False)
    assert proc.returncode == 1


def test_subcommand_is_required():
    assert run(check=False).returncode == 1


def test_bad_config_value_is_an_input_error(tmp_path):
    proc = run("synth", "--out", tmp_path, "--set", "window=-1", check=False)
    assert proc.returncode == 1
    proc = run("synth", "--out", tmp_path, "--set", "no.such.key=1", check=False)
    assert proc.returncode == 1
    assert "no.such.key" in proc.stderr


def test_synth_layout(dataset):
    recordings = sorted(p.parent for p in dataset.rglob("meta.json"))
    assert len(recordings) == 2
    for rec in recordings:
        for name in ("eeg.csv", "emg.csv", "acc.csv", "sc.csv", "labels.csv"):
            assert (rec / name).is_file()
    proc = run("validate", "--in", dataset)
    assert proc.stdout.count(": ok") == 2


def test_segment_manifest_follows_the_window_formula(dataset, tmp_path):
    run("align", "--in", dataset, "--out", tmp_path / "aligned")
    run("segment", "--in", dataset, "--out", tmp_path / "seg", "--window", 3, "--step", 0.3)
    rows = read_csv(tmp_path / "seg" / "segments.csv")

    window, step = 1500, 150
    expected = 0
    for rec in sorted(p.parent for p in (tmp_path / "aligned").rglob("meta.json")):
        with open(rec / "acc.csv") as f:
            n = sum(1 for _ in f) - 1
        expected += (n - window) // step + 1
    assert len(rows) == expected

    by_recording = {}
    for row in rows:
        by_recording.setdefault((row["subject"], row["task"]), []).append(row)
    for seg_rows in by_recording.values():
        starts = [int(r["start_index"]) for r in seg_rows]
        assert starts == list(range(0, step * len(starts), step))
        for r in seg_rows:
            p = float(r["pfg"])
            assert 0.0 <= p <= 1.0
            assert int(r["label"]) == (1 if p >= 0.8 else -1)
    assert any(int(r["label"]) == 1 for r in rows)


def test_synth_and_evaluation_are_deterministic(dataset, tmp_path):
    again = tmp_path / "again"
    run("synth", "--subjects", 2, "--duration", 40, "--episodes", 2, "--seed", 7, "--out", again)
    for meta in dataset.rglob("*.csv"):
        twin = again / meta.relative_to(dataset)
        assert filecmp.cmp(meta, twin, shallow=False), meta

    for name in ("a", "b"):
        run("eval-independent", "--in", dataset, "--seed", 7, "--mask", "ALL", *FAST, "--out", tmp_path / name)
    for f in ("runs.csv", "report.json", "summary.txt", "roc.csv"):
        assert filecmp.cmp(tmp_path / "a" / f, tmp_path / "b" / f, shallow=False), f
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report[0]["subject"] == "ALL"
    assert report[0]["runs"] == 2


def test_subcommand_chain_equals_end_to_end(dataset, tmp_path):
    run("preprocess", "--in", dataset, "--out", tmp_path / "pre")
    run("features", "--in", tmp_path / "pre", "--out", tmp_path / "feat_chain")
    run("features", "--in", dataset, "--out", tmp_path / "feat_direct")
    assert filecmp.cmp(tmp_path / "feat_chain" / "features.csv", tmp_path / "feat_direct" / "features.csv",
                       shallow=False)

    features = tmp_path / "feat_chain" / "features.csv"
    run("eval-independent", "--features", features, "--seed", 3, "--mask", "ACC", *FAST, "--out", tmp_path / "chain")
    run("eval-independent", "--in", dataset, "--seed", 3, "--mask", "ACC", *FAST, "--out", tmp_path / "direct")
    assert filecmp.cmp(tmp_path / "chain" / "runs.csv", tmp_path / "direct" / "runs.csv", shallow=False)


def test_subject_dependent_report_rows(dataset, tmp_path):
    run("eval-dependent", "--in", dataset, "--seed", 1, *FAST, "--out", tmp_path / "dep")
    report = json.loads((tmp_path / "dep" / "report.json").read_text())
    assert len(report) == 2 * 4
    assert [r["mask"] for r in report[:4]] == ["EEG", "EMG", "ACC", "ALL"]
    summary = (tmp_path / "dep" / "summary.txt").read_text()
    assert "Sensitivity" in summary and "AUC" in summary


def test_train_writes_a_loadable_model(dataset, tmp_path):
    run("features", "--in", dataset, "--out", tmp_path / "feat")
    run("train", "--features", tmp_path / "feat" / "features.csv", "--mask", "ACC", "--C", 4, "--gamma", 0.05,
        "--out", tmp_path / "model")
    model = json.loads((tmp_path / "model" / "model.json").read_text())
    assert model
    resolved = json.loads((tmp_path / "model" / "config.resolved.json").read_text())
    assert resolved["window"] == 3.0
