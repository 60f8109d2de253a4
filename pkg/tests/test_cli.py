import json
import subprocess
import sys

import numpy as np
import pytest

import shapeconf.cli as cli
from shapeconf import radius_isotonic
from shapeconf.cones import NumericalError


def write_values(path, values):
    path.write_text("\n".join(str(v) for v in values) + "\n")


def read_csv_columns(path):
    lines = [line for line in path.read_text().splitlines() if not line.startswith("#")]
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return {name: [row[i] for row in rows] for i, name in enumerate(header)}


def coverage_config(tmp_path, **overrides):
    config = {
        "kind": "coverage",
        "cone": "isotonic",
        "n": 20,
        "sigma": 1.0,
        "alpha": 0.1,
        "family": "piecewise_constant",
        "complexity": 2,
        "amplitude": 1.0,
        "replicates": 25,
        "seed": 7,
    }
    config.update(overrides)
    path = tmp_path / "config.yaml"
    path.write_text("\n".join(f"{key}: {value}" for key, value in config.items()) + "\n")
    return path


class TestProject:
    def test_isotonic_pooling(self, tmp_path):
        infile = tmp_path / "y.txt"
        write_values(infile, [3, 1, 2])
        outfile = tmp_path / "fit.csv"
        code = cli.main(["project", "--input", str(infile), "--cone", "isotonic",
                         "--out", str(outfile)])
        assert code == 0
        columns = read_csv_columns(outfile)
        assert [float(v) for v in columns["fit"]] == [2.0, 2.0, 2.0]
        assert columns["piece"] == ["0", "0", "0"]

    def test_convex_identity(self, tmp_path, capsys):
        infile = tmp_path / "y.txt"
        write_values(infile, [1, 2, 3])
        code = cli.main(["project", "--input", str(infile), "--cone", "convex"])
        assert code == 0
        captured = capsys.readouterr()
        assert "pieces=1" in captured.err
        fits = [float(line.split(",")[2]) for line in captured.out.splitlines()[2:]]
        assert fits == pytest.approx([1.0, 2.0, 3.0], abs=1e-9)

    def test_missing_file(self, tmp_path, capsys):
        code = cli.main(["project", "--input", str(tmp_path / "absent.txt"),
                         "--cone", "isotonic"])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_csv_with_y_column(self, tmp_path):
        infile = tmp_path / "data.csv"
        infile.write_text("t,y\n0,2.0\n1,1.0\n")
        outfile = tmp_path / "fit.csv"
        assert cli.main(["project", "--input", str(infile), "--cone", "isotonic",
                         "--out", str(outfile)]) == 0
        columns = read_csv_columns(outfile)
        assert [float(v) for v in columns["fit"]] == [1.5, 1.5]

    def test_header_without_y_column(self, tmp_path):
        infile = tmp_path / "data.csv"
        infile.write_text("t,value\n0,2.0\n")
        assert cli.main(["project", "--input", str(infile), "--cone", "isotonic"]) == 2

    def test_manifest_embedded(self, tmp_path):
        infile = tmp_path / "y.txt"
        write_values(infile, [1, 2])
        outfile = tmp_path / "fit.csv"
        cli.main(["project", "--input", str(infile), "--cone", "isotonic",
                  "--out", str(outfile)])
        first = outfile.read_text().splitlines()[0]
        assert first.startswith("# manifest: ")
        manifest = json.loads(first.removeprefix("# manifest: "))
        assert manifest["subcommand"] == "project"


class TestBall:
    def test_monotone_composition(self, tmp_path, capsys):
        infile = tmp_path / "y.txt"
        write_values(infile, [1, 2, 3])
        code = cli.main(["ball", "--input", str(infile), "--cone", "isotonic",
                         "--sigma", "1.0", "--alpha", "0.05"])
        assert code == 0
        record = json.loads(capsys.readouterr().out)
        assert record["pieces"] == 3
        assert record["squared_radius"] == pytest.approx(radius_isotonic(3, 3, 1.0, 0.05))
        assert record["center"] == [1.0, 2.0, 3.0]

    def test_center_file(self, tmp_path, capsys):
        infile = tmp_path / "y.txt"
        write_values(infile, [2, 1])
        outfile = tmp_path / "center.csv"
        code = cli.main(["ball", "--input", str(infile), "--cone", "isotonic",
                         "--sigma", "0.5", "--alpha", "0.1", "--out", str(outfile)])
        assert code == 0
        record = json.loads(capsys.readouterr().out)
        assert record["center_file"] == str(outfile)
        columns = read_csv_columns(outfile)
        assert [float(v) for v in columns["center"]] == [1.5, 1.5]

    def test_alpha_out_of_range(self, tmp_path, capsys):
        infile = tmp_path / "y.txt"
        write_values(infile, [1, 2])
        code = cli.main(["ball", "--input", str(infile), "--cone", "isotonic",
                         "--sigma", "1.0", "--alpha", "1.5"])
        assert code == 2

    def test_tv_on_convex_rejected(self, tmp_path):
        infile = tmp_path / "y.txt"
        write_values(infile, [0, 1, 0])
        code = cli.main(["ball", "--input", str(infile), "--cone", "convex",
                         "--sigma", "1.0", "--alpha", "0.1", "--tv"])
        assert code == 2

    def test_tv_reports_v_hat(self, tmp_path, capsys):
        infile = tmp_path / "y.txt"
        write_values(infile, [0.0, 0.5, 2.0])
        code = cli.main(["ball", "--input", str(infile), "--cone", "isotonic",
                         "--sigma", "1.0", "--alpha", "0.1", "--tv"])
        assert code == 0
        record = json.loads(capsys.readouterr().out)
        assert record["v_hat"] == pytest.approx(2.0)
        assert record["nominal_coverage"] == pytest.approx(0.8)


class TestExperiment:
    def test_noiseless_coverage(self, tmp_path, capsys):
        config = coverage_config(tmp_path, sigma=1e-12)
        out_dir = tmp_path / "out"
        code = cli.main(["experiment", "--config", str(config), "--out", str(out_dir)])
        assert code == 0
        summary = read_csv_columns(out_dir / "summary.csv")
        assert float(summary["coverage"][0]) == 1.0
        replicates = read_csv_columns(out_dir / "replicates.csv")
        assert len(replicates["replicate"]) == 25
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["config"]["kind"] == "coverage"
        assert "timestamp" in manifest

    def test_geometry_dimension(self, tmp_path):
        config = tmp_path / "geom.yaml"
        config.write_text(
            "kind: geometry\ncone: isotonic\nn: 3\nreplicates: 4000\nseed: 19\n"
        )
        out_dir = tmp_path / "geom"
        assert cli.main(["experiment", "--config", str(config), "--out", str(out_dir)]) == 0
        summary = read_csv_columns(out_dir / "summary.csv")
        mean = float(summary["dimension_mean"][0])
        se = float(summary["dimension_se"][0])
        assert abs(mean - 11 / 6) <= 3 * se
        conc = read_csv_columns(out_dir / "concentration.csv")
        assert set(conc["kind"]) == {"face", "norm"}

    def test_worker_count_invariance(self, tmp_path):
        config = coverage_config(tmp_path, replicates=30)
        out1 = tmp_path / "w1"
        out2 = tmp_path / "w2"
        assert cli.main(["experiment", "--config", str(config), "--out", str(out1),
                         "--workers", "1"]) == 0
        assert cli.main(["experiment", "--config", str(config), "--out", str(out2),
                         "--workers", "2"]) == 0
        assert (out1 / "replicates.csv").read_bytes() == (out2 / "replicates.csv").read_bytes()

    def test_unknown_key_rejected(self, tmp_path, capsys):
        config = coverage_config(tmp_path)
        config.write_text(config.read_text() + "mystery_knob: 3\n")
        code = cli.main(["experiment", "--config", str(config), "--out", str(tmp_path / "x")])
        assert code == 2
        assert "mystery_knob" in capsys.readouterr().err

    def test_missing_key_rejected(self, tmp_path, capsys):
        config = tmp_path / "bad.yaml"
        config.write_text("kind: coverage\ncone: isotonic\n")
        code = cli.main(["experiment", "--config", str(config), "--out", str(tmp_path / "x")])
        assert code == 2
        assert "missing config keys" in capsys.readouterr().err

    def test_seed_override_recorded(self, tmp_path):
        config = coverage_config(tmp_path, replicates=10)
        out_dir = tmp_path / "seeded"
        assert cli.main(["experiment", "--config", str(config), "--out", str(out_dir),
                         "--seed", "99"]) == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["config"]["seed"] == 99

    def test_adaptivity_outputs(self, tmp_path):
        config = coverage_config(tmp_path, kind="adaptivity", replicates=40)
        out_dir = tmp_path / "adapt"
        assert cli.main(["experiment", "--config", str(config), "--out", str(out_dir)]) == 0
        deviation = read_csv_columns(out_dir / "deviation.csv")
        assert deviation["check"][0] == "expectation"
        assert deviation["check"][1] == "deviation"

    def test_numerical_failure_exit_code(self, tmp_path, monkeypatch, capsys):
        def explode(config, workers=1):
            raise NumericalError("replicate 3 failed", iterations=12)

        monkeypatch.setattr(cli, "run_coverage", explode)
        config = coverage_config(tmp_path)
        code = cli.main(["experiment", "--config", str(config), "--out", str(tmp_path / "x")])
        assert code == 3
        assert "numerical failure" in capsys.readouterr().err


class TestEntryPoint:
    def test_console_script_version(self):
        result = subprocess.run(
            [sys.executable, "-m", "shapeconf.cli", "--version"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert "shapeconf" in result.stdout

    def test_usage_error_exit_code(self):
        result = subprocess.run(
            [sys.executable, "-m", "shapeconf.cli", "project", "--cone", "isotonic"],
            capture_output=True, text=True,
        )
        assert result.returncode == 2
