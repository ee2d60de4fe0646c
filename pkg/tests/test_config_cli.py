"""Config parsing and the command-line surface."""

import os
from pathlib import Path

import pytest

import lindescent.cli as cli
from lindescent.config import build_problem, parse_config
from lindescent.errors import ConfigError

SOLVE_CFG = """\
seed = 7
manifold.kind = sphere
manifold.dim = 2
witness.count = 32
method.variant = golden_section_step
descent.eps = 1e-8
descent.n_max = 200
problem.kind = builtin
problem.functional = sphere_cosine
problem.target_point = 0, 0, 1
output.trace = trace.csv
output.report = report.txt
"""

FIXED_CFG = """\
seed = 3
manifold.kind = sphere
manifold.dim = 2
witness.count = 32
problem.kind = fixed_point
fixed_point.map = contraction
fixed_point.target_point = 0, 0, 1
descent.eps = 1e-10
"""

METRIC_CFG = """\
seed = 5
manifold.kind = sphere
manifold.dim = 2
witness.count = 64
metric.triples = 40
"""


@pytest.fixture()
def outdir(tmp_path, monkeypatch):
    monkeypatch.setenv("LINDESCENT_OUTPUT_DIR", str(tmp_path))
    return tmp_path


def write(tmp_path: Path, text: str, name="run.cfg") -> str:
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestParseConfig:
    def test_roundtrip_with_defaults(self, tmp_path):
        cfg = parse_config(write(tmp_path, SOLVE_CFG))
        assert cfg["seed"] == 7
        assert cfg["manifold.kind"] == "sphere"
        assert cfg["descent.t_half"] == 1.0  # default filled in
        assert cfg["problem.target_point"] == (0.0, 0.0, 1.0)

    def test_unknown_key_with_line_number(self, tmp_path):
        path = write(tmp_path, "seed = 1\nbogus.key = 2\n")
        with pytest.raises(ConfigError, match=r":2: unknown key"):
            parse_config(path)

    def test_duplicate_key_rejected(self, tmp_path):
        path = write(tmp_path, "seed = 1\nseed = 2\n")
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(path)

    def test_bad_value_type(self, tmp_path):
        path = write(tmp_path, "witness.count = many\n")
        with pytest.raises(ConfigError, match="cannot parse"):
            parse_config(path)

    def test_missing_assignment(self, tmp_path):
        path = write(tmp_path, "just some words\n")
        with pytest.raises(ConfigError, match="expected"):
            parse_config(path)

    def test_build_requires_manifold(self, tmp_path):
        cfg = parse_config(write(tmp_path, "seed = 1\n"))
        with pytest.raises(ConfigError, match="manifold.kind"):
            build_problem(cfg)

    def test_unknown_functional(self, tmp_path):
        text = SOLVE_CFG.replace("sphere_cosine", "mystery")
        with pytest.raises(ConfigError, match="unknown functional"):
            build_problem(parse_config(write(tmp_path, text)))


class TestSolveCommand:
    def test_success_exit_zero(self, tmp_path, outdir):
        path = write(tmp_path, SOLVE_CFG)
        assert cli.main(["solve", path]) == 0
        assert (outdir / "trace.csv").exists()
        assert (outdir / "report.txt").exists()

    def test_byte_identical_reruns(self, tmp_path, outdir):
        path = write(tmp_path, SOLVE_CFG)
        assert cli.main(["solve", path]) == 0
        first = (outdir / "trace.csv").read_bytes()
        assert cli.main(["solve", path]) == 0
        assert (outdir / "trace.csv").read_bytes() == first

    def test_max_iterations_exit_two(self, tmp_path, outdir):
        path = write(tmp_path, SOLVE_CFG)
        assert cli.main(["solve", path, "--max-iter", "1"]) == 2

    def test_malformed_config_exit_one(self, tmp_path, outdir, capsys):
        path = write(tmp_path, "garbage = 1\n")
        assert cli.main(["solve", path]) == 1
        assert "unknown key" in capsys.readouterr().err

    def test_missing_file_exit_one(self, outdir):
        assert cli.main(["solve", "/nonexistent/run.cfg"]) == 1

    def test_seed_override_changes_start(self, tmp_path, outdir):
        path = write(tmp_path, SOLVE_CFG)
        cli.main(["solve", path, "--output", "a.csv"])
        cli.main(["solve", path, "--seed", "8", "--output", "b.csv"])
        assert (outdir / "a.csv").read_bytes() != (outdir / "b.csv").read_bytes()

    def test_jobs_fan_out_distinct_files(self, tmp_path, outdir):
        path = write(tmp_path, SOLVE_CFG)
        assert cli.main(["solve", path, "--jobs", "3"]) == 0
        names = sorted(p.name for p in outdir.glob("trace-seed*.csv"))
        assert names == ["trace-seed7.csv", "trace-seed8.csv", "trace-seed9.csv"]

    def test_mapping_problem_writes_spectrum(self, tmp_path, outdir):
        text = """\
manifold.kind = sphere
manifold.dim = 1
problem.kind = mapping
problem.functional = dirichlet
problem.m = 64
problem.degree = 1
problem.perturb_amp = 0.3
problem.perturb_mode = 3
problem.s_list = -1, 0
descent.n_max = 150
output.trace = map_trace.csv
output.map = final_map.csv
output.spectrum = spectrum.csv
"""
        path = write(tmp_path, text)
        assert cli.main(["solve", path]) == 0
        assert (outdir / "final_map.csv").exists()
        assert (outdir / "spectrum.csv").exists()


class TestFixedPointCommand:
    def test_contraction_exit_zero(self, tmp_path, outdir, capsys):
        path = write(tmp_path, FIXED_CFG)
        assert cli.main(["fixed-point", path]) == 0
        assert "fixed point found" in capsys.readouterr().out

    def test_rotation_reports_no_fixed_point(self, tmp_path, outdir, capsys):
        text = """\
seed = 2
manifold.kind = sphere
manifold.dim = 1
witness.count = 32
problem.kind = fixed_point
fixed_point.map = rotation
fixed_point.angle = 3.141592653589793
"""
        path = write(tmp_path, text)
        assert cli.main(["fixed-point", path]) == 0
        assert "no fixed point found" in capsys.readouterr().out

    def test_bad_config_exit_one(self, tmp_path, outdir):
        path = write(tmp_path, "manifold.kind = sphere\n")
        assert cli.main(["fixed-point", path]) == 1


class TestMetricCommand:
    def test_audit_pass_exit_zero(self, tmp_path, outdir):
        path = write(tmp_path, METRIC_CFG)
        assert cli.main(["metric", path]) == 0
        report = (outdir / "metric_report.txt").read_text()
        assert "pair_table" in report and "overall: pass" in report

    def test_broken_gap_fails(self, tmp_path, outdir):
        path = write(tmp_path, METRIC_CFG + "gap.shape = broken-constant\n")
        assert cli.main(["metric", path]) == 1

    def test_empty_witness_config_exit_one(self, tmp_path, outdir):
        path = write(tmp_path, METRIC_CFG + "witness.count = 0\n")
        assert cli.main(["metric", path]) == 1


class TestCheckCommand:
    def test_list_prints_names(self, capsys):
        assert cli.main(["check", "--list"]) == 0
        out = capsys.readouterr().out
        assert "linearization_sphere" in out and "parseval" in out

    def test_default_run_passes(self, capsys):
        assert cli.main(["check"]) == 0
        assert "FAIL" not in capsys.readouterr().out

    def test_injected_fault_detected(self, capsys):
        assert cli.main(["check", "--inject-fault", "drop-k"]) == 1
        assert "FAIL" in capsys.readouterr().out
