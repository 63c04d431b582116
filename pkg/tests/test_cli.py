"""Command-line behavior: pipelines, formats, and exit codes."""

import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from gaussmatch import estimate_moments, read_points_csv
from gaussmatch.cli import fit_from_document, fit_to_document, run, scatter_svg
from gaussmatch.oracle import FamilyCheck
from gaussmatch.families import Family


@pytest.fixture()
def sample_csv(tmp_path):
    path = tmp_path / "pts.csv"
    code = run(
        [
            "synth",
            "--mean",
            "3,4",
            "--cov",
            "1,0.3;0.3,0.6",
            "--count",
            "2000",
            "--seed",
            "7",
            "--output",
            str(path),
        ]
    )
    assert code == 0
    return path


class TestSynth:
    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert run(
                ["synth", "--mean", "0,0", "--cov", "1,0;0,1", "--count", "50",
                 "--seed", "3", "--output", str(out)]
            ) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_matrix_is_usage_error(self, tmp_path, capsys):
        code = run(
            ["synth", "--mean", "0,0", "--cov", "1,0;0", "--count", "10",
             "--seed", "1", "--output", str(tmp_path / "x.csv")]
        )
        assert code == 1
        assert "usage error" in capsys.readouterr().err

    def test_singular_cov_is_data_error(self, tmp_path, capsys):
        code = run(
            ["synth", "--mean", "0,0", "--cov", "1,0;0,0", "--count", "10",
             "--seed", "1", "--output", str(tmp_path / "x.csv")]
        )
        assert code == 2
        assert "error" in capsys.readouterr().err


class TestFitScore:
    def test_fixed_mean_pipeline(self, sample_csv, tmp_path, capsys):
        model = tmp_path / "model.json"
        assert run(
            ["fit", "--input", str(sample_csv), "--family", "fixed-mean",
             "--mean", "0,0", "--output", str(model)]
        ) == 0
        doc = json.loads(model.read_text())
        assert doc["schema_version"] == "1"
        assert doc["family"] == "fixed-mean"
        assert doc["fixed_mean"] == [0.0, 0.0]
        assert run(["score", "--input", str(sample_csv), "--model", str(model)]) == 0
        out = capsys.readouterr().out
        lines = dict(line.split(" ", 1) for line in out.strip().splitlines())
        assert abs(float(lines["M"]) - doc["match"]) <= 1e-12
        assert abs(float(lines["Hx"]) - doc["cross_entropy"]) <= 1e-12

    def test_full_family_scores_zero(self, sample_csv, tmp_path, capsys):
        model = tmp_path / "full.json"
        assert run(
            ["fit", "--input", str(sample_csv), "--family", "full", "--output", str(model)]
        ) == 0
        assert run(["score", "--input", str(sample_csv), "--model", str(model)]) == 0
        out = capsys.readouterr().out
        m_value = float(out.strip().splitlines()[0].split(" ", 1)[1])
        assert abs(m_value) <= 1e-12

    def test_model_json_round_trip_is_bit_exact(self, sample_csv, tmp_path):
        model = tmp_path / "m.json"
        assert run(
            ["fit", "--input", str(sample_csv), "--family", "isotropic", "--output", str(model)]
        ) == 0
        first = fit_from_document(json.loads(model.read_text()))
        again = fit_from_document(json.loads(json.dumps(fit_to_document(first))))
        assert np.array_equal(first.model.mean, again.model.mean)
        assert np.array_equal(first.model.cov, again.model.cov)
        assert first.match == again.match
        assert first.cross_entropy == again.cross_entropy

    def test_usage_errors(self, sample_csv, tmp_path, capsys):
        out = str(tmp_path / "x.json")
        assert run(["fit", "--input", str(sample_csv), "--family", "fixed-mean",
                    "--output", out]) == 1
        assert run(["fit", "--input", str(sample_csv), "--family", "full",
                    "--mean", "0,0", "--output", out]) == 1
        assert run(["fit", "--input", str(sample_csv), "--family", "gaussian",
                    "--output", out]) == 1
        assert run(["fit", "--input", str(sample_csv), "--family", "full"]) == 1
        capsys.readouterr()

    def test_data_errors(self, sample_csv, tmp_path, capsys):
        bad_csv = tmp_path / "bad.csv"
        bad_csv.write_text("1,2\n3,oops\n")
        out = str(tmp_path / "x.json")
        assert run(["fit", "--input", str(bad_csv), "--family", "full", "--output", out]) == 2
        assert run(["fit", "--input", str(tmp_path / "missing.csv"), "--family", "full",
                    "--output", out]) == 2
        # pinned mean of the wrong dimension
        assert run(["fit", "--input", str(sample_csv), "--family", "fixed-mean",
                    "--mean", "0,0,0", "--output", out]) == 2
        capsys.readouterr()

    def test_tampered_schema_version(self, sample_csv, tmp_path, capsys):
        model = tmp_path / "m.json"
        assert run(["fit", "--input", str(sample_csv), "--family", "full",
                    "--output", str(model)]) == 0
        doc = json.loads(model.read_text())
        doc["schema_version"] = "999"
        model.write_text(json.dumps(doc))
        assert run(["score", "--input", str(sample_csv), "--model", str(model)]) == 2
        capsys.readouterr()


class TestTransform:
    def test_whitens_dataset(self, sample_csv, tmp_path):
        model = tmp_path / "full.json"
        out = tmp_path / "white.csv"
        svg = tmp_path / "white.svg"
        assert run(["fit", "--input", str(sample_csv), "--family", "full",
                    "--output", str(model)]) == 0
        assert run(["transform", "--input", str(sample_csv), "--model", str(model),
                    "--output", str(out), "--plot", str(svg)]) == 0
        white = read_points_csv(out)
        mom = estimate_moments(white)
        assert np.abs(mom.mean).max() < 1e-9
        assert np.abs(mom.cov - np.eye(2)).max() < 1e-9
        text = svg.read_text()
        assert text.startswith("<svg ")
        assert text.count("<circle") == white.shape[0]
        assert text.count("<line") == 2

    def test_univariate_plot(self, tmp_path):
        pts = tmp_path / "p.csv"
        pts.write_text("-1\n0\n1\n2\n")
        model = tmp_path / "m.json"
        svg = tmp_path / "p.svg"
        assert run(["fit", "--input", str(pts), "--family", "full", "--output", str(model)]) == 0
        assert run(["transform", "--input", str(pts), "--model", str(model),
                    "--output", str(tmp_path / "w.csv"), "--plot", str(svg)]) == 0
        assert svg.read_text().count("<circle") == 4


class TestReport:
    def test_text_table(self, sample_csv, capsys):
        assert run(["report", "--input", str(sample_csv), "--means", "mean;0;3,4"]) == 0
        out = capsys.readouterr().out
        lines = out.strip().splitlines()
        assert lines[0].split()[:2] == ["family", "mean"]
        families = [line.split()[0] for line in lines[1:]]
        assert families == [
            "full",
            "fixed-mean", "fixed-mean", "fixed-mean",
            "isotropic",
            "fixed-mean-isotropic", "fixed-mean-isotropic", "fixed-mean-isotropic",
            "diagonal",
            "fixed-mean-diagonal", "fixed-mean-diagonal", "fixed-mean-diagonal",
        ]

    def test_csv_format_and_nesting(self, sample_csv, tmp_path):
        out_path = tmp_path / "report.csv"
        assert run(["report", "--input", str(sample_csv), "--means", "0",
                    "--format", "csv", "--output", str(out_path)]) == 0
        with open(out_path, newline="") as handle:
            rows = list(csv.DictReader(handle))
        value = {(r["family"], r["mean"]): float(r["match"]) for r in rows}
        assert value[("full", "-")] <= value[("fixed-mean", "0")] + 1e-9
        assert value[("fixed-mean", "0")] <= value[("fixed-mean-diagonal", "0")] + 1e-9
        assert value[("fixed-mean-diagonal", "0")] <= value[("fixed-mean-isotropic", "0")] + 1e-9
        assert value[("full", "-")] <= value[("diagonal", "-")] + 1e-9
        assert value[("diagonal", "-")] <= value[("isotropic", "-")] + 1e-9

    def test_default_means_is_data_mean(self, sample_csv, capsys):
        assert run(["report", "--input", str(sample_csv)]) == 0
        out = capsys.readouterr().out
        fm_line = [l for l in out.splitlines() if l.startswith("fixed-mean ")][0]
        assert fm_line.split()[1] == "mean"
        assert float(fm_line.split()[2]) == pytest.approx(0.0, abs=1e-12)

    def test_mean_token_errors(self, sample_csv, capsys):
        assert run(["report", "--input", str(sample_csv), "--means", "zero"]) == 1
        assert run(["report", "--input", str(sample_csv), "--means", "1,2,3"]) == 2
        assert run(["report", "--input", str(sample_csv), "--means", ";"]) == 1
        capsys.readouterr()


class TestImageBlocks:
    def test_blocks_csv_feeds_report(self, tmp_path, capsys):
        from gaussmatch import Raster, write_ppm

        rng = np.random.default_rng(3)
        pixels = rng.integers(0, 256, size=(24, 32, 3)).astype(np.uint16)
        img = tmp_path / "img.ppm"
        write_ppm(Raster(pixels=pixels, maxval=255), img)
        blocks_csv = tmp_path / "blocks.csv"
        # block 2: 12x16 tiles of dimension 12, enough points for a full-rank cov
        assert run(["image-blocks", "--input", str(img), "--output", str(blocks_csv),
                    "--block", "2"]) == 0
        blocks = read_points_csv(blocks_csv)
        assert blocks.shape == (192, 12)
        assert run(["report", "--input", str(blocks_csv), "--means", "mean;0.5"]) == 0
        capsys.readouterr()

    def test_custom_block_size(self, tmp_path):
        from gaussmatch import Raster, write_ppm

        pixels = np.zeros((8, 8, 3), dtype=np.uint16)
        img = tmp_path / "img.ppm"
        write_ppm(Raster(pixels=pixels, maxval=255), img)
        out = tmp_path / "b.csv"
        assert run(["image-blocks", "--input", str(img), "--output", str(out),
                    "--block", "4"]) == 0
        assert read_points_csv(out).shape == (4, 48)

    def test_bad_image_is_data_error(self, tmp_path, capsys):
        img = tmp_path / "bad.ppm"
        img.write_bytes(b"P5\n2 2\n255\n" + bytes(4))
        assert run(["image-blocks", "--input", str(img), "--output",
                    str(tmp_path / "o.csv")]) == 2
        capsys.readouterr()


class TestVerify:
    def test_small_verify_passes(self, capsys):
        assert run(["verify", "--dims", "2", "--trials", "2", "--seed", "5"]) == 0
        out = capsys.readouterr().out
        assert "verification passed" in out
        assert out.count(" ok") == 6

    def test_failed_verification_exits_3(self, monkeypatch, capsys):
        def fake_verify(**kwargs):
            return [
                FamilyCheck(
                    family=Family.FULL, trials=1, max_abs_diff=1.0,
                    worst_margin=-1.0, passed=False,
                )
            ]

        monkeypatch.setattr("gaussmatch.cli.verify_families", fake_verify)
        assert run(["verify", "--trials", "1"]) == 3
        assert "verification FAILED" in capsys.readouterr().out

    def test_bad_dims_is_usage_error(self, capsys):
        assert run(["verify", "--dims", "4..1"]) == 1
        assert run(["verify", "--dims", "abc"]) == 1
        capsys.readouterr()


class TestScatterSvg:
    def test_unit_cross_present(self):
        text = scatter_svg(np.array([[0.0, 0.0], [2.0, 1.0]]))
        assert text.count("<line") == 2
        assert text.count("<circle") == 2

    def test_rejects_empty(self):
        from gaussmatch import InvalidInputError

        with pytest.raises(InvalidInputError):
            scatter_svg(np.empty((0, 2)))


class TestEntryPoint:
    def test_console_script_help(self):
        result = subprocess.run(
            [sys.executable, "-m", "gaussmatch.cli", "--help"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        for name in ("fit", "score", "transform", "report", "image-blocks", "synth", "verify"):
            assert name in result.stdout

    def test_no_arguments_is_usage_error(self):
        result = subprocess.run(
            [sys.executable, "-m", "gaussmatch.cli"], capture_output=True, text=True
        )
        assert result.returncode == 1
