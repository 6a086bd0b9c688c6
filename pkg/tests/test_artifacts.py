import json

import numpy as np
import pandas as pd

from dark_zeno.artifacts import ArtifactWriter, frame_to_csv, read_frame, summary_to_json


def test_csv_starts_with_schema_line():
    text = frame_to_csv(pd.DataFrame({"t": [0.0, 0.5], "norm": [1.0, 0.25]}))
    lines = text.split("\n")
    assert lines[0] == "#schema=1"
    assert lines[1] == "t,norm"
    assert "\r" not in text


def test_csv_keeps_seventeen_significant_digits():
    text = frame_to_csv(pd.DataFrame({"x": [0.1, 1.0 / 3.0]}))
    assert "0.10000000000000001" in text
    assert "0.33333333333333331" in text


def test_written_frame_reads_back(tmp_path):
    frame = pd.DataFrame({"t": np.linspace(0.0, 1.0, 7), "survival_prob": np.linspace(1.0, 0.9, 7)})
    writer = ArtifactWriter(tmp_path / "nested" / "run")
    target = writer.write_frame(frame)
    assert target.read_text(encoding="utf-8").startswith("#schema=1\n")
    loaded = read_frame(target)
    assert list(loaded.columns) == ["t", "survival_prob"]
    assert np.array_equal(loaded["t"].to_numpy(), frame["t"].to_numpy())


def test_summary_json_is_sorted_and_plain(tmp_path):
    summary = {"zeta": np.float64(0.5), "alpha": np.array([1.0, 2.0]), "c": 1 + 2j, "path": tmp_path, "n": np.int64(3)}
    decoded = json.loads(summary_to_json(summary))
    assert list(decoded) == ["alpha", "c", "n", "path", "zeta"]
    assert decoded["c"] == [1.0, 2.0]
    assert decoded["alpha"] == [1.0, 2.0]
    assert decoded["n"] == 3
    assert decoded["path"] == str(tmp_path)


def test_writer_respects_formats(tmp_path):
    writer = ArtifactWriter(tmp_path, formats=("json",))
    assert writer.write_frame(pd.DataFrame({"t": [0.0]})) is None
    target = writer.write_summary({"mode": "continuous"})
    assert writer.written == [target]
    assert target.name == "summary.json"
