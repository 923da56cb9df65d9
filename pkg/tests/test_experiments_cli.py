import json
import subprocess
import sys

import pytest

from roughtaylor import cli
from roughtaylor.experiments import (
    ExperimentConfig,
    load_config,
    run,
    validate,
)


def write_config(tmp_path, doc, name="config.json"):
    f = tmp_path / name
    f.write_text(json.dumps(doc))
    return str(f)


def fbm_doc(out_dir, seeds=(1, 2), n=16):
    return {
        "kind": "fbm-sample",
        "parameters": {"hurst": 0.4, "T": 1.0, "n": n, "d": 1, "seeds": list(seeds)},
        "output_dir": out_dir,
    }


class TestValidate:
    def base(self, kind, params):
        return ExperimentConfig(kind=kind, parameters=params, output_dir=".")

    def test_unknown_kind(self):
        problems = validate(self.base("bogus", {}))
        assert len(problems) == 1 and problems[0].startswith("kind:")

    def test_fbm_ok(self):
        cfg = self.base(
            "fbm-sample", {"hurst": 0.4, "n": 16, "seeds": [1]}
        )
        assert validate(cfg) == []

    def test_empty_seeds(self):
        cfg = self.base("fbm-sample", {"hurst": 0.4, "n": 16, "seeds": []})
        assert any("seeds" in p for p in validate(cfg))

    def test_hurst_range(self):
        cfg = self.base("fbm-sample", {"hurst": 1.4, "n": 16, "seeds": [1]})
        assert any("hurst" in p for p in validate(cfg))

    def test_n_range(self):
        cfg = self.base("fbm-sample", {"hurst": 0.4, "n": 5000, "seeds": [1]})
        assert any("parameters.n" in p for p in validate(cfg))

    def test_beta_range_message(self):
        cfg = self.base(
            "taylor-converge", {"beta": 0.6, "gamma_grid": [0.1]}
        )
        problems = validate(cfg)
        assert any("beta must lie in (1/3, 1/2)" in p for p in problems)

    def test_gamma_below_beta(self):
        cfg = self.base(
            "taylor-converge", {"beta": 0.4, "gamma_grid": [0.45]}
        )
        assert any("gamma" in p for p in validate(cfg))

    def test_garsia_integrability(self):
        cfg = self.base(
            "garsia",
            {"hurst": 0.4, "beta": 0.35, "p": 5.0, "seeds": [1]},
        )
        assert any("1/(2(H-beta))" in p for p in validate(cfg))

    def test_stopping_time_r_and_radius(self):
        cfg = self.base(
            "stopping-time",
            {"beta": 0.4, "gamma_grid": [0.1], "r": 0.5, "c_radius": -1.0},
        )
        problems = validate(cfg)
        assert any("parameters.r" in p for p in problems)
        assert any("c_radius" in p for p in problems)


class TestLoadConfig:
    def test_json(self, tmp_path):
        f = write_config(tmp_path, fbm_doc(str(tmp_path)))
        cfg = load_config(f)
        assert cfg.kind == "fbm-sample"
        assert cfg.output_dir == str(tmp_path)

    def test_toml(self, tmp_path):
        f = tmp_path / "config.toml"
        f.write_text(
            'kind = "fbm-sample"\noutput_dir = "out"\n'
            "[parameters]\nhurst = 0.4\nn = 16\nseeds = [1]\n"
        )
        cfg = load_config(str(f))
        assert cfg.kind == "fbm-sample"
        assert cfg.parameters["n"] == 16

    def test_output_dir_argument_wins(self, tmp_path):
        f = write_config(tmp_path, fbm_doc("from_config"))
        assert load_config(f, output_dir="explicit").output_dir == "explicit"

    def test_env_fallback(self, tmp_path, monkeypatch):
        doc = fbm_doc("ignored")
        del doc["output_dir"]
        f = write_config(tmp_path, doc)
        monkeypatch.setenv("ROUGHTAYLOR_OUT", "from_env")
        assert load_config(f).output_dir == "from_env"


class TestRun:
    def test_fbm_sample_artifacts(self, tmp_path):
        out = tmp_path / "out"
        cfg = ExperimentConfig(**{
            k: v for k, v in fbm_doc(str(out)).items() if k != "kind"
        } | {"kind": "fbm-sample"})
        report = run(cfg)
        assert report.ok
        assert (out / "report.json").exists()
        rows = (out / "fbm_00000001.csv").read_text().strip().splitlines()
        assert len(rows) == 18  # header + 17 knots
        doc = json.loads((out / "report.json").read_text())
        assert doc["schema_version"] == "roughtaylor-report-1"
        assert len(doc["records"]) == 2

    def test_deterministic_report_bytes(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        doc = fbm_doc("")
        for out in (out_a, out_b):
            doc["output_dir"] = str(out)
            run(ExperimentConfig(kind=doc["kind"], parameters=doc["parameters"],
                                 output_dir=str(out)))
        ra = (out_a / "report.json").read_bytes()
        rb = (out_b / "report.json").read_bytes()
        # reports embed the config (including output_dir); normalize it out
        assert ra.replace(str(out_a).encode(), b"X") == rb.replace(
            str(out_b).encode(), b"X"
        )

    def test_invalid_config_raises(self, tmp_path):
        cfg = ExperimentConfig(
            kind="fbm-sample", parameters={}, output_dir=str(tmp_path)
        )
        with pytest.raises(ValueError, match="invalid config"):
            run(cfg)

    def test_signature_run(self, tmp_path):
        cfg = ExperimentConfig(
            kind="signature",
            parameters={
                "driver": {"fbm": {"hurst": 0.4, "n": 64, "d": 2, "seed": 3}},
                "degree": 3,
            },
            output_dir=str(tmp_path / "sig"),
        )
        report = run(cfg)
        assert report.ok
        rows = (tmp_path / "sig" / "signature.csv").read_text().strip().splitlines()
        assert len(rows) == 1 + 2 + 4 + 8

    def test_taylor_converge_bound_holds(self, tmp_path):
        cfg = ExperimentConfig(
            kind="taylor-converge",
            parameters={
                "beta": 0.4,
                "gamma_grid": [0.05, 0.1, 0.2],
                "n_max": 10,
                "benchmark": {"type": "linear", "a": 1.0, "x0": 1.0, "dy": 0.002},
            },
            output_dir=str(tmp_path / "conv"),
        )
        report = run(cfg)
        assert report.errors == []
        assert report.violations == 0
        rows = (
            (tmp_path / "conv" / "convergence.csv").read_text().strip().splitlines()
        )
        assert rows[0] == "N,measured_error,bound,violation"
        assert len(rows) == 11

    def test_stopping_time_run(self, tmp_path):
        cfg = ExperimentConfig(
            kind="stopping-time",
            parameters={
                "beta": 0.4,
                "gamma_grid": [0.1],
                "a": 1.0,
                "x0": 1.0,
                "slope": 0.002,
                "T": 1.0,
                "r": 2.0,
                "c_radius": 0.004,
            },
            output_dir=str(tmp_path / "stop"),
        )
        report = run(cfg)
        assert report.ok
        assert report.aggregates["abs_diff"] <= 1e-6

    def test_runtime_error_captured(self, tmp_path):
        cfg = ExperimentConfig(
            kind="signature",
            parameters={"driver": {"csv": "/nonexistent/driver.csv"}},
            output_dir=str(tmp_path / "err"),
        )
        report = run(cfg)
        assert not report.ok
        assert report.errors
        assert (tmp_path / "err" / "report.json").exists()


class TestCli:
    def test_ok_exit_zero(self, tmp_path, capsys):
        f = write_config(tmp_path, fbm_doc(str(tmp_path / "out")))
        assert cli.main(["fbm-sample", "--config", f]) == 0
        assert "fbm-sample: ok" in capsys.readouterr().out

    def test_quiet(self, tmp_path, capsys):
        f = write_config(tmp_path, fbm_doc(str(tmp_path / "out")))
        assert cli.main(["fbm-sample", "--config", f, "--quiet"]) == 0
        assert capsys.readouterr().out == ""

    def test_validation_exit_two(self, tmp_path, capsys):
        doc = fbm_doc(str(tmp_path / "out"))
        doc["parameters"]["hurst"] = 2.0
        f = write_config(tmp_path, doc)
        assert cli.main(["fbm-sample", "--config", f]) == 2
        assert "hurst" in capsys.readouterr().err

    def test_kind_mismatch_exit_two(self, tmp_path, capsys):
        f = write_config(tmp_path, fbm_doc(str(tmp_path / "out")))
        assert cli.main(["signature", "--config", f]) == 2

    def test_seed_override(self, tmp_path):
        out = tmp_path / "out"
        f = write_config(tmp_path, fbm_doc(str(out), seeds=(1,)))
        assert cli.main(
            ["fbm-sample", "--config", f, "--seed-override", "7,8", "--quiet"]
        ) == 0
        assert (out / "fbm_00000007.csv").exists()
        assert (out / "fbm_00000008.csv").exists()
        assert not (out / "fbm_00000001.csv").exists()

    def test_out_flag_overrides_config(self, tmp_path):
        f = write_config(tmp_path, fbm_doc(str(tmp_path / "ignored")))
        out = tmp_path / "flag_out"
        assert cli.main(
            ["fbm-sample", "--config", f, "--out", str(out), "--quiet"]
        ) == 0
        assert (out / "report.json").exists()

    def test_console_entry_point(self, tmp_path):
        f = write_config(tmp_path, fbm_doc(str(tmp_path / "out")))
        proc = subprocess.run(
            [sys.executable, "-m", "roughtaylor", "fbm-sample", "--config", f,
             "--quiet"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
