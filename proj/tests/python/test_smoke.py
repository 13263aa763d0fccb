import json
import os
from pathlib import Path

import pytest

import insightsearch as ins

DATA = Path(os.environ.get("INSIGHT_TEST_DATA", Path(__file__).resolve().parents[1] / "data"))
IRIS = DATA / "iris.csv"


def test_presets():
    assert ins.presets() == [f"C{i}" for i in range(1, 11)]
    c8 = ins.preset("C8")
    assert c8["expansion"] == "fixed-fan-out" and c8["fanOut"] == 3
    with pytest.raises(ValueError):
        ins.preset("C0")


def test_dataset_loading():
    d = ins.Dataset.from_csv(str(IRIS))
    assert len(d) == 150
    assert d.columns[-1] == "class"
    small = ins.Dataset.from_csv_text("a,b\n1,x\n2,y\n")
    assert small.rows == 2
    assert json.loads(small.schema_json())["a"] == "numerical"
    with pytest.raises(ValueError):
        ins.Dataset.from_csv("/nonexistent.csv")


def test_discover_iris():
    report = ins.discover(str(IRIS), preset="C4", iterations=500, seed=7)
    assert report["schemaVersion"] == 1
    trees = [p for p in report["patterns"] if p["modelKind"] == "decisionTree" and p["targetBase"] == "class"]
    assert any("petal_length" in p["summary"] for p in trees)
    again = ins.discover(str(IRIS), preset="C4", iterations=500, seed=7)
    assert again == report


def test_discover_overrides():
    d = ins.Dataset.from_csv(str(IRIS))
    report = ins.discover(d, preset="C3", iterations=0)
    assert report["patterns"] == [] and report["run"]["nodeCount"] == 1
    with pytest.raises(ValueError):
        ins.discover(d, preset="C3", iterations=5, treePolicy="greedy")


def test_scores():
    assert ins.scores.quantitative_outlier(4.0) == pytest.approx(0.5, abs=1e-12)
    assert ins.scores.trend(True, False, True) == pytest.approx(0.5 + 2 / 6, abs=1e-12)
    assert ins.scores.rule(1.0, 0.0) == 1.0
    assert ins.scores.kulczynski(0.5, 0.5, 0.25) == pytest.approx(0.5)
    assert ins.scores.imbalance_ratio(0.4, 0.4, 0.4) == 0.0
    assert ins.scores.tree(0.9, 0.8, 1.0) == pytest.approx(0.72)


def test_cli_and_generate(tmp_path):
    code, out, err = ins.run_cli(["generate", "--scenario", "2", "--variant", "A", "--output", str(tmp_path)])
    assert code == 0, err
    paths = ins.generate(2, "A", 1, str(tmp_path / "again"))
    assert [Path(p).name for p in paths] == ["SD_A.csv", "SD_A.schema.json", "SD_A.manifest.json"]
    manifest = json.loads(Path(paths[2]).read_text())
    assert manifest["name"] == "SD_A" and manifest["specs"]
    assert ins.run_cli(["discover"])[0] == 2
    assert ins.run_cli(["generate", "--scenario", "3", "--variant", "A"])[0] == 2
