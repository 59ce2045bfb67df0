"""End-to-end CLI behavior: formats, exit codes, reproducibility."""

import json
import subprocess
import sys

import numpy as np
import pytest

from wfeq.cli import main

CANONICAL_W = {"M": 1, "W": [[0.4, 1.0], [1.0, 0.8]]}
DIAG_V = {"M": 2, "V": [[1 / 18, 0.0, 0.0], [0.0, 1 / 12, 0.0], [0.0, 0.0, 1 / 6]]}


@pytest.fixture
def model_w(tmp_path):
    path = tmp_path / "model_w.json"
    path.write_text(json.dumps(CANONICAL_W))
    return str(path)


@pytest.fixture
def model_v_diag(tmp_path):
    path = tmp_path / "model_v.json"
    path.write_text(json.dumps(DIAG_V))
    return str(path)


def run_cli(args, **kwargs):
    """Fresh-process invocation; asserts nothing, returns CompletedProcess."""
    return subprocess.run(
        [sys.executable, "-m", "wfeq.cli", *args],
        capture_output=True,
        text=True,
        **kwargs,
    )


class TestEquilibriumCommand:
    def test_diagonal_model(self, model_v_diag, capsys):
        code = main(["equilibrium", model_v_diag])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        np.testing.assert_allclose(payload["rho"], [0.5, 1 / 3, 1 / 6], atol=1e-12)
        assert payload["pi"] == pytest.approx(1 / 36, rel=1e-12)
        assert payload["product_consistent"] and payload["row_consistent"]
        assert payload["diagonal"]

    def test_identity_v(self, tmp_path, capsys):
        path = tmp_path / "id.json"
        path.write_text(json.dumps({"M": 1, "V": [[1.0, 0.0], [0.0, 1.0]]}))
        assert main(["equilibrium", str(path)]) == 0
        payload = json.loads(capsys.readouterr().out)
        np.testing.assert_allclose(payload["rho"], [0.5, 0.5])
        assert not payload["product_consistent"]

    def test_zero_v_exit_3(self, tmp_path, capsys):
        path = tmp_path / "zero.json"
        path.write_text(json.dumps({"M": 1, "V": [[0.0, 0.0], [0.0, 0.0]]}))
        assert main(["equilibrium", str(path)]) == 3

    def test_inadmissible_exit_2(self, tmp_path):
        path = tmp_path / "inadm.json"
        path.write_text(json.dumps({"M": 1, "V": [[0.9, 0.8], [0.1, 0.3]]}))
        assert main(["equilibrium", str(path)]) == 2

    def test_w_model_converted(self, model_w, capsys):
        assert main(["equilibrium", model_w]) == 0
        payload = json.loads(capsys.readouterr().out)
        np.testing.assert_allclose(payload["rho"], [0.25, 0.75], atol=1e-12)

    def test_rho_model_direct(self, tmp_path, capsys):
        path = tmp_path / "rho.json"
        path.write_text(json.dumps({"M": 2, "rho": [0.5, 1 / 3, 1 / 6]}))
        assert main(["equilibrium", str(path)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["pi"] == pytest.approx(1 / 36, rel=1e-12)
        assert payload["diagonal"] is True

    def test_malformed_entry_exit_1_names_position(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"M": 1, "W": [[0.4, 1.5], [1.0, 0.8]]}))
        assert main(["equilibrium", str(path)]) == 1
        err = capsys.readouterr().err
        assert "(0, 1)" in err and "1.5" in err

    def test_invalid_json_reports_position(self, tmp_path, capsys):
        path = tmp_path / "syntax.json"
        path.write_text('{"M": 1, "W": [[0.4, ]]}')
        assert main(["equilibrium", str(path)]) == 1
        assert "line 1" in capsys.readouterr().err

    def test_both_w_and_v_rejected(self, tmp_path, capsys):
        path = tmp_path / "both.json"
        path.write_text(json.dumps({"M": 1, "W": [[1, 1], [1, 1]], "V": [[0, 0], [0, 0]]}))
        assert main(["equilibrium", str(path)]) == 1


class TestSimulateCommand:
    def test_binary_model_converges(self, model_w, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        summary = tmp_path / "summary.json"
        code = main([
            "simulate", model_w, "--p0", "0.5,0.5",
            "--out", str(out), "--summary", str(summary),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "k,p_0,p_1"
        last = lines[-1].split(",")
        assert float(last[1]) == pytest.approx(0.25, abs=1e-8)
        doc = json.loads(summary.read_text())
        assert doc["converged"] is True
        assert doc["rho"][0] == pytest.approx(0.25, rel=1e-9)
        # operational scale of V = diag(0.6, 0.2): 1 / (1/0.6 + 1/0.2)
        assert doc["pi"] == pytest.approx(0.15, rel=1e-9)

    def test_start_at_equilibrium_single_row(self, tmp_path, capsys):
        path = tmp_path / "rho.json"
        path.write_text(json.dumps({"M": 1, "rho": [0.25, 0.75]}))
        out = tmp_path / "traj.csv"
        code = main(["simulate", str(path), "--p0", "0.25,0.75", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2  # header plus the initial state only

    def test_non_convergence_exit_4(self, model_w, tmp_path):
        out = tmp_path / "t.csv"
        code = main([
            "simulate", model_w, "--p0", "0.9,0.1", "--steps", "2",
            "--tol", "1e-14", "--out", str(out), "--summary", str(tmp_path / "s.json"),
        ])
        assert code == 4

    def test_boundary_requires_flag(self, model_w, tmp_path):
        code = main(["simulate", model_w, "--p0", "0,1", "--out", str(tmp_path / "t.csv")])
        assert code == 1
        code = main([
            "simulate", model_w, "--p0", "0,1", "--allow-boundary",
            "--out", str(tmp_path / "t.csv"), "--summary", str(tmp_path / "s.json"),
        ])
        assert code == 0

    def test_zero_steps_usage_error(self, model_w):
        result = run_cli(["simulate", model_w, "--steps", "0"])
        assert result.returncode == 1

    def test_wrong_p0_length(self, model_w):
        assert main(["simulate", model_w, "--p0", "0.2,0.3,0.5"]) == 1

    def test_csv_floats_roundtrip(self, model_w, tmp_path):
        out = tmp_path / "t.csv"
        main(["simulate", model_w, "--out", str(out), "--summary", str(tmp_path / "s.json")])
        rows = out.read_text().splitlines()[1:]
        values = np.array([[float(tok) for tok in row.split(",")[1:]] for row in rows])
        np.testing.assert_allclose(values.sum(axis=1), 1.0, atol=1e-12)

    def test_json_format_matches_csv(self, model_w, tmp_path):
        csv_out = tmp_path / "t.csv"
        json_out = tmp_path / "t.json"
        common = ["simulate", model_w, "--p0", "0.7,0.3",
                  "--summary", str(tmp_path / "s.json")]
        assert main(common + ["--out", str(csv_out)]) == 0
        assert main(common + ["--format", "json", "--out", str(json_out)]) == 0
        doc = json.loads(json_out.read_text())
        assert doc["columns"] == ["k", "p_0", "p_1"]
        csv_rows = csv_out.read_text().splitlines()[1:]
        assert len(doc["rows"]) == len(csv_rows)
        for json_row, csv_row in zip(doc["rows"], csv_rows):
            expected = [float(tok) for tok in csv_row.split(",")]
            assert json_row == pytest.approx(expected, abs=0)

    def test_simulate_from_v_model(self, tmp_path):
        path = tmp_path / "v.json"
        path.write_text(json.dumps({"M": 1, "V": [[0.6, 0.0], [0.0, 0.2]]}))
        out = tmp_path / "t.csv"
        code = main(["simulate", str(path), "--p0", "0.5,0.5",
                     "--out", str(out), "--summary", str(tmp_path / "s.json")])
        assert code == 0
        last = out.read_text().splitlines()[-1].split(",")
        assert float(last[1]) == pytest.approx(0.25, abs=1e-8)


class TestBinaryCommand:
    def test_trajectory_columns(self, tmp_path):
        out = tmp_path / "b.csv"
        summary = tmp_path / "b.json"
        code = main([
            "binary", "--w-plus", "0.4", "--w-minus", "0.8", "--p0", "0.5",
            "--out", str(out), "--summary", str(summary),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "k,p_plus,p_minus"
        doc = json.loads(summary.read_text())
        assert doc["rho"] == [pytest.approx(0.25), pytest.approx(0.75)]

    def test_rejects_out_of_range_survival(self):
        assert main(["binary", "--w-plus", "1.0", "--w-minus", "0.5"]) == 1


class TestValidateCommand:
    def test_diagonal_model_all_pass(self, model_v_diag, capsys):
        code = main(["validate", model_v_diag])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert all(check["passed"] for check in report["checks"])
        names = {check["name"] for check in report["checks"]}
        assert {"drift_path_equivalence", "zero_sum_drift",
                "equilibrium_fixed_point", "fluctuation_balance"} <= names

    def test_generic_model_informational_flags(self, tmp_path, capsys):
        path = tmp_path / "gen.json"
        path.write_text(json.dumps(
            {"M": 2, "V": [[0.7, 0.2, 0.4], [0.1, 0.8, 0.3], [0.5, 0.2, 0.9]]}
        ))
        code = main(["validate", str(path)])
        out = capsys.readouterr().out
        assert code == 0
        report = json.loads(out)
        assert all(check["passed"] for check in report["checks"])
        assert report["equilibrium"]["row_consistent"] is False

    def test_corrupted_entry_exit_1(self, tmp_path, capsys):
        path = tmp_path / "corrupt.json"
        path.write_text(json.dumps({"M": 1, "W": [[0.4, 1.5], [1.0, 0.8]]}))
        assert main(["validate", str(path)]) == 1
        assert "(0, 1)" in capsys.readouterr().err

    def test_rho_model_checks(self, tmp_path, capsys):
        path = tmp_path / "rho.json"
        path.write_text(json.dumps({"M": 1, "rho": [0.25, 0.75]}))
        assert main(["validate", str(path)]) == 0
        report = json.loads(capsys.readouterr().out)
        names = {check["name"] for check in report["checks"]}
        assert "equilibrium_roundtrip" in names
        assert all(check["passed"] for check in report["checks"])


class TestStochasticCommand:
    def test_output_shapes(self, model_w, tmp_path):
        out = tmp_path / "paths.csv"
        summary = tmp_path / "moments.json"
        code = main([
            "simulate-stochastic", model_w, "--pop", "50", "--steps", "20",
            "--replicas", "3", "--seed", "11",
            "--out", str(out), "--summary", str(summary),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "replica,k,count_0,count_1"
        assert len(lines) == 1 + 3 * 21
        doc = json.loads(summary.read_text())
        assert doc["population_size"] == 50
        assert len(doc["moments"]) == 2
        assert {"empirical_mean_dmu", "empirical_var_dmu", "predicted_var",
                "n_samples"} <= set(doc["moments"][0])

    def test_byte_identical_reruns_with_jobs(self, model_w, tmp_path):
        """Same seed, two runs, parallel replicas: identical bytes."""
        args = [
            "simulate-stochastic", model_w, "--pop", "40", "--steps", "30",
            "--replicas", "4", "--seed", "123", "--jobs", "3",
        ]
        first = run_cli(args)
        second = run_cli(args)
        assert first.returncode == second.returncode == 0
        assert first.stdout == second.stdout
        assert first.stderr == second.stderr

    def test_env_seed_fallback(self, model_w, tmp_path):
        env_args = ["simulate-stochastic", model_w, "--pop", "20", "--steps", "5"]
        import os
        env = dict(os.environ, WFEQ_SEED="77")
        a = run_cli(env_args, env=env)
        b = run_cli(env_args + ["--seed", "77"])
        assert a.stdout == b.stdout

    def test_initial_counts_validated(self, model_w):
        assert main([
            "simulate-stochastic", model_w, "--pop", "10", "--steps", "2",
            "--initial", "4,5",
        ]) == 1

    def test_pop_zero_usage_error(self, model_w):
        result = run_cli([
            "simulate-stochastic", model_w, "--pop", "0", "--steps", "2",
        ])
        assert result.returncode == 1

    def test_rho_model_accepted(self, tmp_path):
        path = tmp_path / "rho.json"
        path.write_text(json.dumps({"M": 1, "rho": [0.25, 0.75]}))
        out = tmp_path / "p.csv"
        code = main([
            "simulate-stochastic", str(path), "--pop", "20", "--steps", "5",
            "--seed", "3", "--out", str(out), "--summary", str(tmp_path / "m.json"),
        ])
        assert code == 0
        assert out.read_text().splitlines()[0] == "replica,k,count_0,count_1"

    def test_json_format(self, model_w, tmp_path):
        out = tmp_path / "p.json"
        code = main([
            "simulate-stochastic", model_w, "--pop", "10", "--steps", "3",
            "--seed", "5", "--format", "json",
            "--out", str(out), "--summary", str(tmp_path / "m.json"),
        ])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["columns"] == ["replica", "k", "count_0", "count_1"]
        assert len(doc["rows"]) == 4
        assert all(row[2] + row[3] == 10 for row in doc["rows"])


class TestOracleCommand:
    def test_worked_examples_payload(self, capsys):
        assert main(["oracle"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["canonical_model"]["step"] == ["7/16", "9/16"]
        assert payload["diagonal_equilibrium"]["pi"] == "1/36"
        adjudications = payload["adjudications"]
        assert adjudications["drift_prefactor"]["implemented_matches"] is True
        assert adjudications["drift_prefactor"]["variant_matches"] is False
        assert adjudications["binary_ratio_index"]["variant_matches"] is False
        assert adjudications["binary_equilibrium"]["variant_in_unit_interval"] is False

    def test_hidden_from_help(self):
        result = run_cli(["--help"])
        assert "simulate-stochastic" in result.stdout
        assert "oracle" not in result.stdout


class TestUsage:
    def test_no_command_exit_1(self):
        result = run_cli([])
        assert result.returncode == 1

    def test_unknown_command_exit_1(self):
        result = run_cli(["frobnicate"])
        assert result.returncode == 1

    def test_missing_file(self, capsys):
        assert main(["equilibrium", "/nonexistent/model.json"]) == 1
