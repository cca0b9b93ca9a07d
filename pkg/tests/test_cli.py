"""Command-line interface tests (in-process, via main(argv))."""

import json

import pytest

from vacuumpairs.cli import (
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_UNKNOWN_MATERIAL,
    main,
)

BASE_CONFIG = {
    "material": "fused_silica",
    "profile": {"shape": "gaussian", "eta": 0.001, "sigma_um": 1.0},
    "beta": 20.0,
    "L_m": 0.05,
}


def write_config(tmp_path, extra, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps({**BASE_CONFIG, **extra}))
    return str(path)


class TestMaterial:
    def test_table(self, capsys):
        assert main(["material", "fused_silica", "--samples", "5"]) == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert out[1] == "lambda_um,n,n_g,regime"
        assert len(out) == 7
        assert out[2].endswith(",normal")

    def test_invalid_rows_flagged(self, capsys):
        assert (
            main(["material", "fused_silica", "--window", "8,10", "--samples", "3"])
            == EXIT_OK
        )
        out = capsys.readouterr().out
        assert ",invalid" in out

    def test_unknown_material(self, capsys):
        assert main(["material", "unobtainium"]) == EXIT_UNKNOWN_MATERIAL
        assert "unobtainium" in capsys.readouterr().err


class TestSpectrum:
    def test_csv_embeds_config_and_reruns_identically(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            {
                "lambda1_window_um": [0.3, 0.4],
                "lambda2_window_um": [0.3, 0.4],
                "resolution": 31,
            },
        )
        out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        assert main(["spectrum", "--config", config, "--out", out1]) == EXIT_OK
        assert main(["spectrum", "--config", config, "--out", out2]) == EXIT_OK
        b1 = open(out1, "rb").read()
        assert b1 == open(out2, "rb").read()
        header = b1.decode().splitlines()[0]
        assert header.startswith("# config: ")
        assert json.loads(header[len("# config: "):])["beta"] == 20.0

    def test_json_output(self, tmp_path):
        config = write_config(
            tmp_path,
            {
                "lambda1_window_um": [0.3, 0.4],
                "lambda2_window_um": [0.3, 0.4],
                "resolution": 21,
            },
        )
        out = str(tmp_path / "grid.json")
        assert main(["spectrum", "--config", config, "--out", out]) == EXIT_OK
        doc = json.loads(open(out).read())
        assert doc["config"]["beta"] == 20.0

    def test_missing_windows_is_config_error(self, tmp_path, capsys):
        config = write_config(tmp_path, {})
        out = str(tmp_path / "grid.csv")
        assert main(["spectrum", "--config", config, "--out", out]) == EXIT_CONFIG
        assert "lambda1_window_um" in capsys.readouterr().err


class TestMaxima:
    def test_sweep_rows_printed(self, tmp_path, capsys):
        config = write_config(tmp_path, {"betas": [10.0, 20.0]})
        assert main(["maxima", "--config", config]) == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert len(out) == 2
        assert out[0].startswith("beta=10 ")
        assert "lambda1max=" in out[0]

    def test_failures_reported_on_stderr(self, tmp_path, capsys):
        config = write_config(tmp_path, {"betas": [0.5, 10.0]})
        assert main(["maxima", "--config", config]) == EXIT_OK
        captured = capsys.readouterr()
        assert "beta=0.5 no emission" in captured.err

    def test_all_subluminal_is_numerical_error(self, tmp_path, capsys):
        config = write_config(tmp_path, {"betas": [0.5]})
        assert main(["maxima", "--config", config]) == EXIT_NUMERICAL

    def test_csv_out(self, tmp_path):
        config = write_config(tmp_path, {"betas": [20.0]})
        out = str(tmp_path / "sweep.csv")
        assert main(["maxima", "--config", config, "--out", out]) == EXIT_OK
        lines = open(out).read().splitlines()
        assert lines[0].startswith("# config: ")
        assert lines[1] == "beta,lambda1max_um,lambda2max_um,n_max"
        assert len(lines) == 3


class TestTotal:
    def test_fast_settings(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            {
                "total_lambda_window_um": [0.15, 3.0],
                "base_resolution": [17, 9, 65, 33],
                "max_refinements": 0,
                "rel_tol": 1.0,
            },
        )
        out = str(tmp_path / "total.json")
        assert main(["total", "--config", config, "--out", out]) == EXIT_OK
        assert "pairs per pulse:" in capsys.readouterr().out
        doc = json.loads(open(out).read())
        assert doc["result"]["pairs_per_pulse"] > 0.0
        assert doc["config"]["L_m"] == 0.05

    def test_subluminal_is_numerical_error(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            {
                "beta": 0.5,
                "total_lambda_window_um": [0.15, 3.0],
                "base_resolution": [17, 9, 65, 33],
                "max_refinements": 0,
                "rel_tol": 1.0,
            },
        )
        assert main(["total", "--config", config]) == EXIT_NUMERICAL


class TestFastlight:
    def test_study_with_explicit_anchor(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            {
                "resonance": {"max_slope_at_um": 0.3348859342688826},
                "fastlight_window_um": [0.26, 0.47],
                "resolution": 81,
            },
        )
        out = str(tmp_path / "study.json")
        assert main(["fastlight", "--config", config, "--out", out]) == EXIT_OK
        assert "enhancement:" in capsys.readouterr().out
        doc = json.loads(open(out).read())
        assert doc["enhancement"] > 1.0
        assert doc["peak_count"] >= 1
        assert doc["resonance"]["amplitude"] == 0.06

    def test_zero_amplitude(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            {
                "resonance": {
                    "amplitude": 0.0,
                    "max_slope_at_um": 0.3348859342688826,
                },
                "fastlight_window_um": [0.26, 0.47],
                "resolution": 41,
            },
        )
        assert main(["fastlight", "--config", config]) == EXIT_OK
        assert "enhancement: 1," in capsys.readouterr().out


class TestErrorHandling:
    def test_missing_config_file(self, tmp_path, capsys):
        missing = str(tmp_path / "nope.json")
        assert main(["maxima", "--config", missing]) == EXIT_CONFIG

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["maxima", "--config", str(path)]) == EXIT_CONFIG
        assert "not valid JSON" in capsys.readouterr().err

    def test_missing_required_key(self, tmp_path, capsys):
        path = tmp_path / "partial.json"
        path.write_text(json.dumps({"material": "fused_silica"}))
        assert main(["maxima", "--config", str(path)]) == EXIT_CONFIG
        assert "missing required key" in capsys.readouterr().err

    def test_unknown_material_in_config(self, tmp_path, capsys):
        config = write_config(tmp_path, {"material": "unobtainium"})
        assert main(["maxima", "--config", config]) == EXIT_UNKNOWN_MATERIAL

    def test_threads_flag_accepted(self, tmp_path, capsys):
        config = write_config(tmp_path, {"betas": [20.0]})
        assert main(["--threads", "4", "maxima", "--config", config]) == EXIT_OK
