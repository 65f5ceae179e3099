import csv
import math
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from catbell.cli import main
from catbell.config import ConfigError, RunConfig, parse_angle, parse_config, serialize_config

GOLDEN = Path(__file__).parent / "golden"


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("text, value", [
    ("0", 0.0), ("0.25", 0.25), ("pi/4", math.pi / 4), ("-3*pi/4", -3 * math.pi / 4),
    ("-3pi/4", -3 * math.pi / 4), ("π/2", math.pi / 2), ("2*pi - 1", 2 * math.pi - 1),
])
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value)


@pytest.mark.parametrize("text", ["e", "__import__('os')", "pi/0", "1 +"])
def test_parse_angle_rejects(text):
    with pytest.raises(ConfigError):
        parse_angle(text)


floats = st.floats(0, 20, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(st.builds(RunConfig, r0=floats, alphas=st.lists(floats, max_size=5).map(tuple),
                 angles=st.tuples(*[st.floats(-7, 7)] * 4), n0_list=st.lists(st.integers(0, 50), max_size=4).map(tuple),
                 k_points=st.integers(16, 512), sigma_factor=st.floats(0.5, 20), epsilon=st.floats(0, 1),
                 output_dir=st.sampled_from(["out", "/tmp/x y"]), seed=st.integers(0, 2**31),
                 samples=st.integers(0, 10**6), workers=st.integers(1, 8)))
def test_config_round_trip(config):
    assert parse_config(serialize_config(config)) == config


def test_config_file_comments_and_symbols():
    config = parse_config("# run\nr0 = 0.8  # smaller cat\nangles = 0, -pi/4, pi/2, -3pi/4\nalphas = 2, 3\n")
    assert config.r0 == 0.8
    assert config.alphas == (2.0, 3.0)
    assert config.angles[3] == pytest.approx(-3 * math.pi / 4)


@pytest.mark.parametrize("text", ["bogus = 1", "r0 1.1", "r0 = -1", "k_points = x", "angles = 0, 1"])
def test_bad_config_exit_code(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text + "\n")
    assert main(["lhv", "--config", str(path), "--out", str(tmp_path)]) == 2


def test_flags_override_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("alphas = 3\nn0_list = 5\n")
    assert main(["scan-alpha", "--config", str(path), "--alpha", "2", "--n0", "0", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "scan.csv")
    assert [(float(r["alpha"]), int(r["n0"])) for r in rows] == [(2.0, 0)]


def test_scan_single_point_matches_golden(tmp_path):
    assert main(["scan-alpha", "--alpha", "2", "--n0", "0", "--out", str(tmp_path)]) == 0
    row = read_csv(tmp_path / "scan.csv")[0]
    golden = read_csv(GOLDEN / "scan_r1.1.csv")[0]
    assert row["status"] == "ok"
    assert float(row["e"]) == pytest.approx(float(golden["e"]), abs=1e-12)
    assert list(row) == ["alpha", "n0", "e_bb", "e_bg", "e_gb", "e_gg", "e", "p_zero_max",
                         "truncation_loss", "status"]


def test_scan_empty_alpha_list(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("alphas =\n")
    assert main(["scan-alpha", "--config", str(path), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "scan.csv").read_text().strip().count("\n") == 0


def test_scan_product_state(tmp_path):
    assert main(["scan-alpha", "--r0", "0", "--alpha", "2", "--alpha", "3", "--out", str(tmp_path)]) == 0
    assert all(abs(float(r["e"])) < 1e-8 for r in read_csv(tmp_path / "scan.csv"))


def test_scan_default_thresholds(tmp_path):
    assert main(["scan-alpha", "--alpha", "3", "--out", str(tmp_path)]) == 0
    assert [int(r["n0"]) for r in read_csv(tmp_path / "scan.csv")] == [0, 1, 2, 3]


def test_scan_deterministic_across_workers(tmp_path):
    one, two = tmp_path / "one", tmp_path / "two"
    args = ["scan-alpha", "--alpha", "2", "--alpha", "3", "--n0", "0", "--n0", "1"]
    assert main(args + ["--out", str(one), "--workers", "1"]) == 0
    assert main(args + ["--out", str(two), "--workers", "2"]) == 0
    assert (one / "scan.csv").read_bytes() == (two / "scan.csv").read_bytes()


def test_scan_numerical_failure_flushes_status(tmp_path, capsys):
    code = main(["scan-alpha", "--alpha", "2", "--alpha", "6", "--n0", "0", "--sigma-factor", "0.1",
                 "--out", str(tmp_path)])
    assert code == 3
    rows = read_csv(tmp_path / "scan.csv")
    assert rows[0]["status"] == "ok"
    assert rows[1]["status"].startswith("TruncationTooLossy")
    assert "TruncationTooLossy" in capsys.readouterr().err


def test_asymptotic_command(tmp_path):
    assert main(["asymptotic", "--out", str(tmp_path)]) == 0
    summary = read_csv(tmp_path / "asymptotic_summary.csv")
    assert float(summary[0]["delta0"]) == 0.0
    assert float(summary[1]["epsilon"]) == 0.01
    for row in read_csv(tmp_path / "asymptotic_outcomes.csv"):
        assert float(row["p_plus"]) == pytest.approx(float(row["p_minus"]), abs=1e-8)
        assert float(row["p_zero"]) <= 0.01
    chsh_rows = read_csv(tmp_path / "asymptotic_chsh.csv")
    assert [r["setting"] for r in chsh_rows] == ["bb", "bg", "gb", "gg", "chsh"]
    assert (tmp_path / "asymptotic_marginal_a.csv").exists()


def test_lhv_command(tmp_path):
    assert main(["lhv", "--samples", "1000", "--seed", "3", "--out", str(tmp_path)]) == 0
    table = read_csv(tmp_path / "lhv_assignments.csv")
    values = [int(r["value"]) for r in table]
    assert len(table) == 16 and max(values) == 2 and min(values) == -2
    first = (tmp_path / "lhv_mixtures.csv").read_bytes()
    assert main(["lhv", "--samples", "1000", "--seed", "3", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "lhv_mixtures.csv").read_bytes() == first
    assert main(["lhv", "--samples", "0", "--out", str(tmp_path)]) == 0
    assert not (tmp_path / "lhv_mixtures.csv").exists()
    assert (tmp_path / "lhv_assignments.csv").exists()


def test_convergence_command(tmp_path):
    assert main(["convergence", "--alpha", "2", "--alpha", "4", "--self-test", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "convergence.csv")
    assert float(rows[0]["tv_distance"]) > float(rows[1]["tv_distance"])
    assert rows[2]["alpha"] == "self-test" and float(rows[2]["tv_distance"]) < 1e-6
    assert (tmp_path / "rescaled_alpha_2.csv").exists()


def test_convergence_product_state(tmp_path):
    assert main(["convergence", "--r0", "0", "--alpha", "2", "--out", str(tmp_path)]) == 0
    assert float(read_csv(tmp_path / "convergence.csv")[0]["tv_distance"]) < 0.05


def test_pmn_command(tmp_path):
    assert main(["pmn", "--alpha", "2", "--setting", "gg", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "pmn.csv")
    assert sum(float(r["p"]) for r in rows) == pytest.approx(1.0, abs=1e-10)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "catbell", "lhv", "--samples", "10", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "max 2" in proc.stdout
