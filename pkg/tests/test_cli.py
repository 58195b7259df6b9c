import csv
import json

import numpy as np
import pytest

from robustpareto.cli import EXIT_CONFIG, EXIT_EMPTY_FRONT, EXIT_OK, main

TOY_NOMINAL = {
    "problem": "toy",
    "method": "nominal",
    "scenarios": {"strategy": "oat"},
    "scalarization": {"type": "epsilon_constraint", "n_points": 7},
    "seed": 0,
}


def write_config(tmp_path, name, config):
    path = tmp_path / name
    path.write_text(json.dumps(config))
    return path


def run_artifact(tmp_path, config, out_name):
    cfg = write_config(tmp_path, out_name + ".cfg.json", config)
    out = tmp_path / out_name
    assert main(["run", str(cfg), "--out", str(out)]) == EXIT_OK
    return out


class TestRun:
    def test_artifact_shape(self, tmp_path):
        config = dict(TOY_NOMINAL, method="maro", overrides={"kind": "wsv"})
        out = run_artifact(tmp_path, config, "maro.json")
        doc = json.loads(out.read_text())
        assert doc["stats"]["n_scenarios"] == 3
        assert doc["stats"]["n_points"] <= 7
        assert doc["method"] == "maro_replication"
        assert all("wsv_per_scenario" in p for p in doc["front"]["points"])

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path, "cfg.json", TOY_NOMINAL)
        out = tmp_path / "a.json"
        assert main(["run", str(cfg), "--out", str(out)]) == EXIT_OK
        first = out.read_bytes()
        assert main(["run", str(cfg), "--out", str(out)]) == EXIT_OK
        assert out.read_bytes() == first

    def test_seed_override_changes_nothing_for_smooth_front(self, tmp_path):
        cfg = write_config(tmp_path, "cfg.json", TOY_NOMINAL)
        out1, out2 = tmp_path / "s0.json", tmp_path / "s1.json"
        assert main(["run", str(cfg), "--out", str(out1)]) == EXIT_OK
        assert main(["run", str(cfg), "--out", str(out2), "--seed", "1"]) == EXIT_OK
        a = json.loads(out1.read_text())
        b = json.loads(out2.read_text())
        assert b["config"]["seed"] == 1
        fa = np.array([p["objectives"] for p in a["front"]["points"]])
        fb = np.array([p["objectives"] for p in b["front"]["points"]])
        np.testing.assert_allclose(fa, fb, atol=1e-6)

    def test_unknown_problem_lists_valid_ids(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "bad.json", dict(TOY_NOMINAL, problem="mystery"))
        assert main(["run", str(cfg)]) == EXIT_CONFIG
        err = capsys.readouterr().err
        assert "column" in err and "toy" in err

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["run", str(path)]) == EXIT_CONFIG

    def test_invalid_method_and_solver(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "bad.json", dict(TOY_NOMINAL, method="sqp", solver={"max_iter": 0}))
        assert main(["run", str(cfg)]) == EXIT_CONFIG
        err = capsys.readouterr().err
        assert "method" in err and "solver" in err

    def test_empty_front_exit_code(self, tmp_path):
        config = {
            "problem": "column",
            "method": "nominal",
            "overrides": {"bounds": {"Q_r": [0.0625, 0.07]}},
            "scenarios": {"strategy": "oat"},
            "scalarization": {"type": "epsilon_constraint", "n_points": 3},
            "solver": {"multistart_count": 3},
            "seed": 0,
        }
        cfg = write_config(tmp_path, "cfg.json", config)
        out = tmp_path / "empty.json"
        assert main(["run", str(cfg), "--out", str(out)]) == EXIT_EMPTY_FRONT
        doc = json.loads(out.read_text())
        assert doc["front"]["points"] == []

    def test_explicit_scenarios(self, tmp_path):
        config = dict(TOY_NOMINAL, scenarios={"strategy": "explicit", "rows": [{"u": 0.05}, {"u": -0.02}]})
        out = run_artifact(tmp_path, config, "explicit.json")
        doc = json.loads(out.read_text())
        values = [s["values"]["u"] for s in doc["scenario_set"]["scenarios"]]
        assert values == [0.0, 0.05, -0.02]


class TestCompare:
    @pytest.fixture()
    def artifacts(self, tmp_path):
        nominal = run_artifact(tmp_path, TOY_NOMINAL, "nominal.json")
        rmo = run_artifact(tmp_path, dict(TOY_NOMINAL, method="rmo"), "rmo.json")
        maro = run_artifact(tmp_path, dict(TOY_NOMINAL, method="maro", overrides={"kind": "wsv"}), "maro.json")
        return nominal, rmo, maro

    def test_report(self, tmp_path, artifacts, capsys):
        nominal, rmo, maro = artifacts
        report = tmp_path / "report.csv"
        assert main(["compare", str(nominal), str(rmo), str(maro), "--report", str(report)]) == EXIT_OK
        rows = list(csv.DictReader(report.open()))
        pair = {(r["artifact_a"], r["artifact_b"]): r for r in rows if r["record"] == "pair"}
        n_points = int(next(r for r in rows if r["record"] == "artifact")["n_points"])
        # every rmo point is dominated by some nominal point
        assert int(pair[("rmo", "nominal")]["a_points_dominated_by_b"]) == n_points
        # maro dominates rmo somewhere, never the reverse
        assert int(pair[("rmo", "maro")]["a_points_dominated_by_b"]) >= 1
        assert int(pair[("maro", "rmo")]["a_points_dominated_by_b"]) == 0

    def test_self_compare_zero_dominations(self, tmp_path, artifacts):
        nominal, _, _ = artifacts
        copy = nominal.parent / "nominal2.json"
        copy.write_bytes(nominal.read_bytes())
        report = tmp_path / "self.csv"
        assert main(["compare", str(nominal), str(copy), "--report", str(report)]) == EXIT_OK
        rows = [r for r in csv.DictReader(report.open()) if r["record"] == "pair"]
        assert all(int(r["a_points_dominated_by_b"]) == 0 for r in rows)

    def test_mismatched_problems_rejected(self, tmp_path, artifacts, capsys):
        nominal, _, _ = artifacts
        other_cfg = {
            "problem": "column",
            "method": "nominal",
            "scenarios": {"strategy": "oat"},
            "scalarization": {"type": "epsilon_constraint", "n_points": 3},
            "solver": {"multistart_count": 2},
            "seed": 0,
        }
        column_art = run_artifact(tmp_path, other_cfg, "column.json")
        report = tmp_path / "bad.csv"
        assert main(["compare", str(nominal), str(column_art), "--report", str(report)]) == EXIT_CONFIG
