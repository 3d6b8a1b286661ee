import json
import math

import numpy as np
import pytest

from elastospec import serialize
from elastospec.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDispatch:
    def test_no_arguments_shows_usage(self, capsys):
        code, out, err = run_cli(capsys)
        assert code == 1
        assert "usage" in err.lower()

    def test_unknown_flag_rejected(self, capsys):
        with pytest.raises(SystemExit):
            main(["coeffs", "--bogus", "1"])

    def test_error_json_shape(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"schema_version": 99, "kind": "spectrum"}')
        code, out, err = run_cli(capsys, "recover", "--spectrum", str(bad))
        assert code == 1
        payload = json.loads(err)
        assert set(payload) == {"stage", "message", "hint"}
        assert payload["stage"] == "io"


class TestSymbolCheck:
    def test_report_passes(self, capsys, tmp_path):
        out_file = tmp_path / "report.json"
        code, _, _ = run_cli(
            capsys, "symbol-check", "--n", "4", "--draws", "150",
            "--out", str(out_file),
        )
        assert code == 0
        report = json.loads(out_file.read_text())
        assert report["pass"] is True
        assert report["n"] == 4
        assert report["draws"] == 150
        assert report["max_rel_err"] < 1e-8


class TestCoeffs:
    def test_values_match_module(self, capsys):
        code, out, _ = run_cli(
            capsys, "coeffs", "--n", "2", "--tau", "1", "--mu", "0"
        )
        assert code == 0
        data = json.loads(out)
        assert data["a0_density"] == pytest.approx(3.0 / (8.0 * math.pi))
        assert data["a1_density"]["dirichlet"] == pytest.approx(
            -0.25 * (1 / math.sqrt(4 * math.pi) + 1 / math.sqrt(8 * math.pi))
        )
        assert data["a1_density"]["neumann"] == -data["a1_density"]["dirichlet"]


class TestMeshCommand:
    def test_emit_and_validate(self, capsys, tmp_path):
        mesh_file = tmp_path / "disk.mesh"
        code, _, _ = run_cli(
            capsys, "mesh", "--domain", "disk:1.0", "--h", "0.3",
            "--refine", "1", "--out", str(mesh_file),
        )
        assert code == 0
        code, out, _ = run_cli(capsys, "mesh", "--validate", str(mesh_file))
        assert code == 0
        assert "valid mesh" in out


class TestPipelines:
    def test_interval_to_fit(self, capsys, tmp_path):
        spec_file = tmp_path / "interval.json"
        code, _, _ = run_cli(
            capsys, "oracle-interval", "--L", str(math.pi), "--tau", "1",
            "--mu", "-0.5", "--bc", "dirichlet", "--K", "900",
            "--out", str(spec_file),
        )
        assert code == 0
        fit_file = tmp_path / "fit.json"
        svg_file = tmp_path / "fit.svg"
        code, _, _ = run_cli(
            capsys, "trace-fit", "--spectrum", str(spec_file),
            "--out", str(fit_file), "--svg", str(svg_file),
        )
        assert code == 0
        fit = json.loads(fit_file.read_text())
        assert fit["a1_hat"] == pytest.approx(-0.5, abs=2e-3)
        assert svg_file.read_text().startswith("<svg")

    def test_recover_with_truth_override(self, capsys, tmp_path):
        spec_file = tmp_path / "disk.json"
        code, _, _ = run_cli(
            capsys, "oracle-disk", "--R", "1", "--tau", "1", "--mu", "1",
            "--lambda-max", "1500", "--out", str(spec_file),
        )
        assert code == 0
        truth_file = tmp_path / "truth.json"
        truth_file.write_text(
            serialize.dumps(
                {"schema_version": 1, "kind": "domain", "shape": "disk", "radius": 1.0}
            )
        )
        rec_file = tmp_path / "rec.json"
        code, _, _ = run_cli(
            capsys, "recover", "--spectrum", str(spec_file),
            "--truth", str(truth_file), "--out", str(rec_file),
        )
        assert code == 0
        rec = json.loads(rec_file.read_text())
        assert rec["volume"] == pytest.approx(math.pi, rel=0.01)
        assert rec["volume_rel_err"] < 0.01

    def test_recover_determinism(self, capsys, tmp_path):
        spec_file = tmp_path / "disk.json"
        run_cli(
            capsys, "oracle-disk", "--R", "1", "--tau", "1", "--mu", "1",
            "--lambda-max", "1500", "--out", str(spec_file),
        )
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        run_cli(capsys, "recover", "--spectrum", str(spec_file), "--out", str(out_a))
        run_cli(capsys, "recover", "--spectrum", str(spec_file), "--out", str(out_b))
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_eigs_command(self, capsys, tmp_path):
        out_file = tmp_path / "eigs.json"
        code, _, _ = run_cli(
            capsys, "eigs", "--domain", "rect:1,1", "--tau", "1", "--mu", "1",
            "--bc", "dirichlet", "--k", "4", "--h", "0.2", "--out", str(out_file),
        )
        assert code == 0
        spec = serialize.spectrum_from_dict(
            serialize.loads(out_file.read_text(), "spectrum")
        )
        assert spec.count == 4
        assert spec.provenance["type"] == "fem"

    def test_weyl_table(self, capsys, tmp_path):
        spec_file = tmp_path / "interval.json"
        run_cli(
            capsys, "oracle-interval", "--L", "1", "--tau", "1", "--mu", "0",
            "--bc", "dirichlet", "--K", "500", "--out", str(spec_file),
        )
        csv_file = tmp_path / "weyl.csv"
        code, _, _ = run_cli(
            capsys, "weyl", "--spectrum", str(spec_file), "--volume", "1",
            "--out", str(csv_file),
        )
        assert code == 0
        lines = csv_file.read_text().strip().splitlines()
        assert lines[0] == "eta,count_empirical,count_predicted,ratio"
        last = lines[-1].split(",")
        assert float(last[3]) == pytest.approx(1.0, abs=0.02)

    def test_audit_ball_verdict(self, capsys, tmp_path):
        spec_file = tmp_path / "disk.json"
        run_cli(
            capsys, "oracle-disk", "--R", "1", "--tau", "1", "--mu", "1",
            "--lambda-max", "1500", "--out", str(spec_file),
        )
        code, out, _ = run_cli(capsys, "audit-ball", "--spectrum", str(spec_file))
        assert code == 0
        verdict = json.loads(out)
        assert verdict["kind"] == "ball_audit"
        assert verdict["ball_ratio"] == pytest.approx(2 * math.sqrt(math.pi))

    def test_outdir_env(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("ELASTOSPEC_OUTDIR", str(tmp_path / "artifacts"))
        code, _, _ = run_cli(
            capsys, "coeffs", "--n", "2", "--tau", "1", "--mu", "0",
            "--out", "coeffs.json",
        )
        assert code == 0
        assert (tmp_path / "artifacts" / "coeffs.json").exists()
