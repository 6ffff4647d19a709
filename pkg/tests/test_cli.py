"""Experiment runner: config parsing, subcommands, artifacts, exit codes."""

import json
import re

import pytest

from bpilab.cli import (
    EXIT_ASSERTION,
    EXIT_ERROR,
    EXIT_OK,
    ConfigError,
    ExperimentConfig,
    main,
    parse_config,
    serialize_config,
)

MODEL_A = ["--offspring", "bernoulli(q=0.5)", "--immigration", "pareto(kappa=2)"]
MODEL_SMALL = ["--offspring", "bernoulli(q=0.5)", "--immigration", "finite(0:0.5,1:0.5)"]


class TestConfig:
    TEXT = """
# canonical model A
[model]
offspring = bernoulli(q=0.5)
immigration = pareto(kappa=2)

[experiment]
kind = exact-scan
n = 2,4
x = 16.0,64.0
cutoff = 1024
seed = 7
"""

    def test_parse(self):
        cfg = parse_config(self.TEXT)
        assert cfg.kind == "exact-scan"
        assert cfg.n == (2, 4)
        assert cfg.x == (16.0, 64.0)
        assert cfg.cutoff == 1024
        assert cfg.seed == 7

    def test_round_trip_identity(self):
        cfg = parse_config(self.TEXT)
        again = parse_config(serialize_config(cfg))
        assert again == cfg
        assert serialize_config(again) == serialize_config(cfg)

    def test_unknown_key_diagnostics(self):
        with pytest.raises(ConfigError, match=r"line 3"):
            parse_config("[experiment]\nkind = constants\nnope = 1\n")

    def test_missing_equals_diagnostics(self):
        with pytest.raises(ConfigError, match=r"line 2, column"):
            parse_config("[experiment]\nkind constants\n")

    def test_key_outside_section(self):
        with pytest.raises(ConfigError, match="outside"):
            parse_config("kind = constants\n")

    def test_unknown_kind(self):
        with pytest.raises(ConfigError, match="unknown experiment kind"):
            parse_config("[experiment]\nkind = dance\n")


class TestConstantsCommand:
    def test_report_contains_constants(self, tmp_path):
        out = tmp_path / "run"
        code = main(["constants", *MODEL_A, "--n", "1,3", "--out", str(out)])
        assert code == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        by_name = {c["name"]: c for c in report["constants"]}
        assert by_name["large_deviation_ratio"]["value"] == 4.0
        assert by_name["stationary_tail_ratio"]["value"] == pytest.approx(4 / 3)
        assert by_name["total_3_tail_ratio"]["value"] == 6.3125
        assert all(c["provenance"] for c in report["constants"])
        assert report["params"]["kappa"] == 2.0

    def test_csv_schema(self, tmp_path):
        out = tmp_path / "run"
        main(["constants", *MODEL_A, "--out", str(out)])
        lines = (out / "results.csv").read_text().splitlines()
        assert lines[0] == "name,value,provenance"


class TestExactScanCommand:
    def test_single_wave_ratio_is_one(self, tmp_path):
        out = tmp_path / "run"
        code = main(
            ["exact-scan", *MODEL_A, "--n", "1", "--x", "16,64,256", "--cutoff", "4096", "--out", str(out)]
        )
        assert code == EXIT_OK
        lines = (out / "results.csv").read_text().splitlines()
        assert lines[0].startswith("model,n,x,prob_lo,prob_hi,fixed_ratio")
        for row in lines[1:]:
            fixed_ratio = float(row.split(",")[5])
            assert fixed_ratio == pytest.approx(1.0, abs=1e-9)


class TestMcScanCommand:
    def test_upper_scan_csv(self, tmp_path):
        out = tmp_path / "run"
        code = main(
            ["mc-scan", *MODEL_A, "--n", "2", "--x", "8", "--budget", "2000", "--seed", "3", "--out", str(out)]
        )
        assert code == EXIT_OK
        lines = (out / "results.csv").read_text().splitlines()
        assert lines[0] == "model,n,x,method,estimate,stderr,ci_lo,ci_hi,theory_denominator,ratio,const_ld"
        assert lines[1].startswith("A,2,8.0,plain,")

    def test_lower_scan_zero_rows(self, tmp_path):
        out = tmp_path / "run"
        code = main(
            ["mc-scan", "--offspring", "bernoulli(q=0.5)", "--immigration", "pareto(kappa=0.8)",
             "--tag", "A", "--direction", "lower", "--n", "2,4", "--x", "4", "--budget", "2000",
             "--out", str(out)]
        )
        assert code == EXIT_OK
        for row in (out / "results.csv").read_text().splitlines()[1:]:
            assert float(row.split(",")[4]) == 0.0

    def test_determinism_byte_for_byte(self, tmp_path):
        args = ["mc-scan", *MODEL_A, "--n", "3", "--x", "8", "--budget", "4000", "--seed", "11"]
        main([*args, "--out", str(tmp_path / "a")])
        main([*args, "--out", str(tmp_path / "b")])
        assert (tmp_path / "a/results.csv").read_bytes() == (tmp_path / "b/results.csv").read_bytes()
        ra = json.loads((tmp_path / "a/report.json").read_text())
        rb = json.loads((tmp_path / "b/report.json").read_text())
        for volatile in ("timestamp", "wall_clock_seconds"):
            ra.pop(volatile), rb.pop(volatile)
        ra["config"] = re.sub(r"out = .*", "", ra["config"])
        rb["config"] = re.sub(r"out = .*", "", rb["config"])
        assert ra == rb


class TestCompareCommand:
    def test_small_instance_z_below_four(self, tmp_path):
        out = tmp_path / "run"
        code = main(
            ["compare", *MODEL_SMALL, "--n", "3", "--x", "1,2", "--cutoff", "64",
             "--budget", "50000", "--seed", "5", "--out", str(out)]
        )
        assert code == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        assert report["max_abs_z"] < 4

    def test_assertion_failure_exit_code(self, tmp_path):
        out = tmp_path / "run"
        code = main(
            ["compare", *MODEL_SMALL, "--n", "3", "--x", "1", "--cutoff", "64",
             "--budget", "50000", "--seed", "5", "--assert-max-abs-z", "0.0", "--out", str(out)]
        )
        assert code == EXIT_ASSERTION


class TestVerifyCommand:
    def test_asymptotics_suite_passes(self, tmp_path, capsys):
        out = tmp_path / "run"
        code = main(["verify", "--suite", "asymptotics", "--out", str(out)])
        assert code == EXIT_OK
        printed = capsys.readouterr().out
        assert "[asymptotics]" in printed and "PASS" in printed
        lines = (out / "results.csv").read_text().splitlines()
        assert lines[0] == "suite,name,status,detail"

    def test_unknown_suite_is_error(self, tmp_path):
        assert main(["verify", "--suite", "nope", "--out", str(tmp_path / "x")]) == EXIT_ERROR


class TestErrorPaths:
    def test_malformed_config_exit_one(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("[experiment]\nkind =\n")
        assert main(["constants", "--config", str(cfg)]) == EXIT_ERROR
        assert "line 2" in capsys.readouterr().err

    def test_bad_law_exit_one(self, tmp_path, capsys):
        code = main(["constants", "--offspring", "martian(3)", "--immigration", "point(1)",
                     "--out", str(tmp_path / "x")])
        assert code == EXIT_ERROR

    def test_config_file_overridden_by_flags(self, tmp_path):
        cfg = tmp_path / "base.cfg"
        cfg.write_text(
            "[model]\noffspring = bernoulli(q=0.5)\nimmigration = pareto(kappa=2)\n"
            "[experiment]\nkind = constants\nseed = 1\n"
        )
        out = tmp_path / "run"
        code = main(["constants", "--config", str(cfg), "--seed", "9", "--out", str(out)])
        assert code == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        assert report["seed"] == 9
