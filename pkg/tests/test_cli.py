import json
import subprocess
import sys

import pytest

from lventire.cli import DEFAULT_SEED, OUTPUT_ENV, RunConfig, emit_plot_script, run_command, write_atomic
from lventire.errors import MissingArtifact

SMALL_SCHEME = ["--half-length", "60", "--nx", "601", "--dt", "0.02", "--t-start=-5", "--t-end", "5"]


def read(path):
    return path.read_bytes()


class TestExitCodes:
    def test_classify_prints_tag(self, capsys):
        assert run_command(["classify", "--k1", "0.5", "--k2", "0.5"]) == 0
        assert capsys.readouterr().out.strip() == "Case_iv_weak"

    def test_degenerate_regime_is_usage_error(self):
        assert run_command(["classify", "--k1", "1.0", "--k2", "0.5"]) == 2

    def test_unknown_flag(self):
        assert run_command(["classify", "--bogus"]) == 2

    def test_unknown_command(self):
        assert run_command(["unknown"]) == 2

    def test_subminimal_speed(self, tmp_path):
        assert run_command(["front", "solve", "--c", "1.5", "--out", str(tmp_path)]) == 2

    def test_certified_failure_exits_one(self, tmp_path):
        # From sub-solution data v vanishes at every start time, so the decay property fails.
        argv = ["properties", "--n", "3,6", "--window=-2,2", "--out", str(tmp_path)] + SMALL_SCHEME
        assert run_command(argv) == 1
        report = json.loads((tmp_path / "properties.json").read_text())
        assert report["passed"]["2"] is False and report["passed"]["1"] is True

    def test_alias(self, tmp_path):
        argv = ["check42", "--n", "3,6", "--window=-2,2", "--out", str(tmp_path)] + SMALL_SCHEME
        assert run_command(argv) == 1

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "lventire", "classify", "--k1", "2", "--k2", "3"], capture_output=True, text=True)
        assert proc.returncode == 0 and proc.stdout.strip() == "Case_iii"


class TestOutputs:
    def test_front_solve_files(self, tmp_path):
        assert run_command(["front", "solve", "--c", "2.2", "--out", str(tmp_path)]) == 0
        tails = json.loads((tmp_path / "tails.json").read_text())
        assert tails["plus_infinity"]["relative_error"] < 0.02
        assert (tmp_path / "front.csv").read_text().startswith("# c=2.2")
        cfg = json.loads((tmp_path / "run_config.json").read_text())
        assert cfg["c"] == 2.2 and cfg["seed"] == DEFAULT_SEED

    def test_front_from_config_file(self, tmp_path):
        conf = tmp_path / "run.json"
        conf.write_text(json.dumps({"model": {"k1": 0.3, "k2": 0.6, "r": 1.5, "d": 0.8}, "c": 2.6, "output_dir": str(tmp_path / "o")}))
        assert run_command(["front", "solve", "--config", str(conf)]) == 0
        assert (tmp_path / "o" / "front.csv").exists()

    def test_flags_override_config(self, tmp_path):
        conf = tmp_path / "run.json"
        conf.write_text(json.dumps({"c": 2.6, "output_dir": str(tmp_path / "o")}))
        assert run_command(["front", "solve", "--config", str(conf), "--c", "3.0"]) == 0
        assert json.loads((tmp_path / "o" / "run_config.json").read_text())["c"] == 3.0

    def test_unknown_config_key(self, tmp_path):
        conf = tmp_path / "run.json"
        conf.write_text(json.dumps({"speed": 2.6}))
        assert run_command(["front", "solve", "--config", str(conf)]) == 2

    def test_environment_overrides_config_and_flag_overrides_environment(self, tmp_path, monkeypatch):
        conf = tmp_path / "run.json"
        conf.write_text(json.dumps({"output_dir": str(tmp_path / "from_config")}))
        monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "from_env"))
        assert run_command(["odefree", "--config", str(conf)]) == 0
        assert (tmp_path / "from_env" / "orbit.csv").exists()
        assert run_command(["odefree", "--config", str(conf), "--out", str(tmp_path / "from_flag")]) == 0
        assert (tmp_path / "from_flag" / "envelope.json").exists()
        assert not (tmp_path / "from_config").exists()

    def test_spectral_with_draws(self, tmp_path, capsys):
        assert run_command(["spectral", "--draws", "50", "--out", str(tmp_path)]) == 0
        payload = json.loads((tmp_path / "spectral.json").read_text())
        assert payload["split_property"]["failures"] == []
        assert payload["minus_infinity"]["case_tag"] == "crossed_pairs"
        assert "crossed_pairs" in capsys.readouterr().out

    def test_supersub_table(self, tmp_path, capsys):
        argv = ["supersub", "verify", "--selector", "111", "--x-range=-20,20", "--lattice-nx", "41", "--lattice-nt", "41", "--out", str(tmp_path)]
        assert run_command(argv) == 0
        out = capsys.readouterr().out
        assert "super u" in out and "pass" in out
        assert json.loads((tmp_path / "certificate.json").read_text())["passed"] is True

    def test_scalar_family(self, tmp_path):
        assert run_command(["supersub", "--family", "scalar", "--lattice-nx", "41", "--lattice-nt", "41", "--out", str(tmp_path)]) == 0

    def test_simulate_and_probe(self, tmp_path):
        assert run_command(["simulate", "--csv-every", "10", "--out", str(tmp_path)] + SMALL_SCHEME) == 0
        sandwich = json.loads((tmp_path / "sandwich.json").read_text())
        assert sandwich["passed"] and "runtime" not in sandwich
        assert len(list((tmp_path / "snapshots").glob("snapshot_*.csv"))) == 11
        assert run_command(["probe", "--out", str(tmp_path)] + SMALL_SCHEME) == 0
        assert json.loads((tmp_path / "probe.json").read_text())["passed"]

    def test_entire(self, tmp_path):
        argv = ["entire", "--selector", "110", "--n", "3,6,12", "--window=-2,4", "--out", str(tmp_path)] + SMALL_SCHEME
        assert run_command(argv) == 0
        gaps = json.loads((tmp_path / "gaps.json").read_text())
        assert gaps["converging"] and len(gaps["cauchy_gaps"]) == 2
        manifest = json.loads((tmp_path / "entire_snapshots" / "manifest.json").read_text())
        assert manifest["n"] == 12 and len(list((tmp_path / "entire_snapshots").glob("*.csv"))) == len(manifest["times"])


class TestReproducibility:
    def test_rerun_from_persisted_config_is_bitwise_identical(self, tmp_path):
        first = tmp_path / "a"
        assert run_command(["simulate", "--out", str(first)] + SMALL_SCHEME) == 0
        second = tmp_path / "b"
        conf = json.loads((first / "run_config.json").read_text())
        conf["output_dir"] = str(second)
        (tmp_path / "again.json").write_text(json.dumps(conf))
        assert run_command(["simulate", "--config", str(tmp_path / "again.json")]) == 0
        for name in ("sandwich.json", "margins.csv"):
            assert read(first / name) == read(second / name)

    def test_config_round_trip(self):
        cfg = RunConfig.from_dict({"c": 2.5, "selector": "101", "lattice": {"x_range": [-5, 5]}})
        again = RunConfig.from_dict(json.loads(cfg.to_json()))
        assert again.to_json() == cfg.to_json() and again.selector == (1, 0, 1)


class TestPlotScripts:
    def test_missing_artifact(self, tmp_path):
        with pytest.raises(MissingArtifact):
            emit_plot_script([tmp_path / "nope.csv"], "front")
        assert run_command(["plot", "front", str(tmp_path / "nope.csv")]) == 2

    def test_front_and_tail_scripts(self, tmp_path):
        assert run_command(["front", "solve", "--c", "2.2", "--out", str(tmp_path)]) == 0
        front = emit_plot_script([tmp_path / "front.csv"], "front")
        assert "title 'phi'" in front.read_text()
        tail = emit_plot_script([tmp_path / "front.csv", tmp_path / "tails.json"], "tail", tmp_path / "tail.gp")
        assert "lam2 = -0.386" in tail.read_text()
        with pytest.raises(MissingArtifact):
            emit_plot_script([tmp_path / "front.csv"], "tail")

    def test_sandwich_script(self, tmp_path):
        margins = write_atomic(tmp_path / "margins.csv", "t,margin\n0.0,0.1\n")
        assert "margin" in emit_plot_script([margins], "sandwich").read_text()

    def test_atomic_write_leaves_no_temporaries(self, tmp_path):
        write_atomic(tmp_path / "x.txt", "hello")
        assert [p.name for p in tmp_path.iterdir()] == ["x.txt"]
