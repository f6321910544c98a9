import json
import os

import numpy as np
import pytest

from bosetrap import cli


def run_cli(args, tmp_path, monkeypatch):
    monkeypatch.setenv("BOSETRAP_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.chdir(tmp_path)
    return cli.main(args)


class TestCommands:
    def test_ideal(self, tmp_path, monkeypatch, capsys):
        code = run_cli(["ideal", "--beta", "2.1265", "--omega", "1"],
                       tmp_path, monkeypatch)
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["g0"] == pytest.approx(0.875, abs=1e-4)
        assert payload["mu0"] == 0.0
        assert payload["free_energy"] == pytest.approx(-0.052926, abs=1e-5)
        csv_path = tmp_path / "results" / "ideal_density.csv"
        assert csv_path.exists()
        assert csv_path.read_text().startswith("# units:")

    def test_solve_and_sweep(self, tmp_path, monkeypatch, capsys):
        code = run_cli(["solve", "--beta", "1.7", "--omega", "1",
                        "--lambda", "0.05"], tmp_path, monkeypatch)
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["g"] > 0
        code = run_cli(["sweep", "--betas", "0.9,1.3", "--omega", "1",
                        "--lambda", "0.02"], tmp_path, monkeypatch)
        assert code == 0
        text = (tmp_path / "results" / "sweep.csv").read_text()
        assert "lambda,beta,g,mu,free_energy,residual,iters" in text

    def test_slope_csv_schema(self, tmp_path, monkeypatch, capsys):
        code = run_cli(["slope", "--lambdas", "0.04,0.02", "--omega", "2",
                        "--potential", "gaussian:amplitude=1,width=1"],
                       tmp_path, monkeypatch)
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["extrapolated_slope"] > 0
        text = (tmp_path / "results" / "slope.csv").read_text()
        assert "lambda,beta_c,beta_c_over_beta0,slope_estimate" in text

    def test_hartree_summary(self, tmp_path, monkeypatch, capsys):
        code = run_cli(["hartree", "--n", "216", "--beta", "2.1265",
                        "--omega", "1", "--lambda", "0"], tmp_path, monkeypatch)
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["condensate_fraction"] > 0.7
        assert (tmp_path / "results" / "hartree_density.csv").exists()

    def test_props_passes(self, tmp_path, monkeypatch, capsys):
        code = run_cli(["props", "--suite", "trace_convexity", "--seed", "7"],
                       tmp_path, monkeypatch)
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"] is True


class TestDeterminismAndCache:
    def test_identical_payloads(self, tmp_path, monkeypatch, capsys):
        run_cli(["ideal", "--beta", "1.9", "--no-cache"], tmp_path, monkeypatch)
        out1 = capsys.readouterr().out
        run_cli(["ideal", "--beta", "1.9", "--no-cache"], tmp_path, monkeypatch)
        out2 = capsys.readouterr().out
        assert out1 == out2

    def test_cache_roundtrip(self, tmp_path, monkeypatch, capsys):
        run_cli(["ideal", "--beta", "1.9"], tmp_path, monkeypatch)
        fresh = capsys.readouterr().out
        cache_files = list((tmp_path / "cache").glob("*.json"))
        assert len(cache_files) == 1
        run_cli(["ideal", "--beta", "1.9"], tmp_path, monkeypatch)
        cached = capsys.readouterr().out
        assert fresh == cached

    def test_dump_config(self, tmp_path, monkeypatch, capsys):
        code = run_cli(["ideal", "--beta", "1.9", "--dump-config"],
                       tmp_path, monkeypatch)
        assert code == 0
        cfg = json.loads(capsys.readouterr().out)
        assert cfg["beta"] == 1.9
        assert cfg["command"] == "ideal"

    def test_config_file_with_override(self, tmp_path, monkeypatch, capsys):
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps({"beta": 1.5, "omega": 1.0}))
        code = run_cli(["ideal", "--config", str(cfg_path), "--beta", "2.4"],
                       tmp_path, monkeypatch)
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["beta"] == 2.4


class TestExitCodes:
    def test_config_error(self, tmp_path, monkeypatch):
        assert run_cli(["sweep", "--omega", "1"], tmp_path, monkeypatch) == 2

    def test_bad_config_file(self, tmp_path, monkeypatch):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run_cli(["ideal", "--config", str(bad)], tmp_path, monkeypatch) == 2

    def test_validation_failure(self, tmp_path, monkeypatch):
        code = run_cli(["solve", "--beta", "1.5", "--omega", "1",
                        "--lambda", "0.9",
                        "--potential", "gaussian:amplitude=1,width=0.5"],
                       tmp_path, monkeypatch)
        assert code == 4

    def test_nonexistent_table(self, tmp_path, monkeypatch):
        code = run_cli(["solve", "--beta", "1.5",
                        "--potential", "table:/does/not/exist"],
                       tmp_path, monkeypatch)
        assert code == 2


class TestPotentialSpecs:
    def test_table_potential(self, tmp_path, monkeypatch, capsys):
        r = np.linspace(0, 8, 400)
        table = tmp_path / "v.txt"
        np.savetxt(table, np.column_stack([r, np.exp(-r * r / 2)]))
        code = run_cli(["solve", "--beta", "1.7", "--omega", "1",
                        "--lambda", "0.05", "--potential", f"table:{table}"],
                       tmp_path, monkeypatch)
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["g"] > 0
