"""
End-to-end tests for the command-line interface.
"""

import json
from fractions import Fraction

import pytest

from furstenberg_lab.cli import CLI, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE
from furstenberg_lab.config import LabConfig
from furstenberg_lab.constructions import build_prime_furstenberg
from furstenberg_lab.lw_refine import full_cube
from furstenberg_lab.serialization import dumps, grid_to_dict, instance_from_dict, load_artifact


def _run(capsys, *argv):
    code = CLI().run(list(argv))
    out = capsys.readouterr().out
    return code, out


@pytest.fixture
def instance_file(tmp_path, capsys):
    """A (13, 2, 1/2, 1) instance written through the CLI."""
    path = tmp_path / "inst.json"
    code, _ = _run(
        capsys, "construct", "prime", "--p", "13", "--n", "2", "--beta", "1/2", "--K", "1", "--out", str(path), "-q"
    )
    assert code == EXIT_OK
    return path


def test_construct_prime_to_stdout(capsys):
    """Test that the artifact on stdout matches the library builder."""
    code, out = _run(capsys, "construct", "prime", "--p", "13", "--n", "2", "-q")
    assert code == EXIT_OK
    inst = instance_from_dict(json.loads(out))
    assert inst == build_prime_furstenberg(13, 2, Fraction(1, 2), 1)


def test_construct_is_deterministic(capsys):
    """Test byte-identical output for identical runs."""
    first = _run(capsys, "construct", "psquare", "--p", "3", "--n", "2", "-q")
    second = _run(capsys, "construct", "psquare", "--p", "3", "--n", "2", "-q")
    assert first == second
    assert first[0] == EXIT_OK


def test_construct_power_and_missing_order(capsys):
    """Test the prime-power family and its required flag."""
    code, out = _run(capsys, "construct", "power", "--q", "9", "--n", "2", "-q")
    assert code == EXIT_OK
    assert json.loads(out)["kind"] == "furstenberg_instance"
    assert _run(capsys, "construct", "power", "--n", "2", "-q")[0] == EXIT_USAGE
    assert _run(capsys, "construct", "prime", "--n", "2", "-q")[0] == EXIT_USAGE


def test_construct_rejects_decimal_beta(capsys):
    """Test that beta must be an exact rational."""
    assert _run(capsys, "construct", "prime", "--p", "7", "--n", "2", "--beta", "0.5", "-q")[0] == EXIT_USAGE


def test_scale_constant_accepts_decimals(capsys):
    """Test that K may be written as a decimal while beta stays exact."""
    code, out = _run(capsys, "construct", "prime", "--p", "7", "--n", "2", "--K", "1.5", "-q")
    assert code == EXIT_OK
    assert instance_from_dict(json.loads(out)) == build_prime_furstenberg(7, 2, Fraction(1, 2), Fraction(3, 2))
    assert _run(capsys, "delta", "--q", "9", "--K", "0.5", "-q")[0] == EXIT_OK
    assert _run(capsys, "construct", "prime", "--p", "7", "--n", "2", "--K", "abc", "-q")[0] == EXIT_USAGE
    assert _run(capsys, "construct", "prime", "--p", "7", "--n", "2", "--K", "nan", "-q")[0] == EXIT_USAGE


def test_verify_round_trip(instance_file, capsys):
    """Test coverage and pair counting on a written instance."""
    code, out = _run(capsys, "verify", "--in", str(instance_file), "--threshold", "4", "--oracle", "-q")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["kind"] == "verify_report"
    assert report["oracle_agrees"] is True
    assert report["passed"] is True


def test_verify_impossible_threshold_fails(instance_file, capsys):
    """Test that no line of F_13^2 holds 14 points."""
    code, out = _run(capsys, "verify", "--in", str(instance_file), "--threshold", "14", "-q")
    assert code == EXIT_CHECK_FAILED
    assert json.loads(out)["passed"] is False


def test_verify_missing_file(tmp_path, capsys):
    """Test that a missing artifact is a usage error."""
    assert _run(capsys, "verify", "--in", str(tmp_path / "nope.json"), "-q")[0] == EXIT_USAGE


def test_refine_grid_file(tmp_path, capsys):
    """Test refinement of a stored grid and the m range check."""
    path = tmp_path / "grid.json"
    path.write_text(dumps(grid_to_dict(full_cube(3, 2))))
    code, out = _run(capsys, "refine", "--in", str(path), "--m", "1", "-q")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["kind"] == "refine_report"
    assert report["lw_holds"] is True
    assert report["certificate"]["passed"] is True
    assert _run(capsys, "refine", "--in", str(path), "--m", "9", "-q")[0] == EXIT_USAGE


def test_refine_untagged_grid_file(tmp_path, capsys):
    """Test a plain {"n", "elements"} grid record."""
    path = tmp_path / "grid.json"
    path.write_text(json.dumps({"n": 3, "elements": [[0, 0, 0], [0, 1, 0], [1, 0, 1]]}))
    code, out = _run(capsys, "refine", "--in", str(path), "--m", "2", "-q")
    assert code == EXIT_OK
    assert json.loads(out)["certificate"]["passed"] is True


def test_malformed_artifacts_are_usage_errors(tmp_path, capsys):
    """Test that artifacts failing validation exit with the usage code."""
    grid_path = tmp_path / "grid.json"
    grid_path.write_text(json.dumps({"kind": "grid_set", "n": 2, "elements": [[0, 1, 2]]}))
    assert _run(capsys, "refine", "--in", str(grid_path), "--m", "1", "-q")[0] == EXIT_USAGE

    wrong_kind = tmp_path / "wrong.json"
    wrong_kind.write_text(dumps(grid_to_dict(full_cube(2, 2))))
    assert _run(capsys, "verify", "--in", str(wrong_kind), "-q")[0] == EXIT_USAGE

    not_json = tmp_path / "broken.json"
    not_json.write_text("{")
    assert _run(capsys, "verify", "--in", str(not_json), "-q")[0] == EXIT_USAGE


def test_refine_random_needs_seed(tmp_path, capsys):
    """Test seeded random grids."""
    assert _run(capsys, "refine", "--random", "3:4:20", "--m", "2", "-q")[0] == EXIT_USAGE
    assert _run(capsys, "refine", "--random", "3:4", "--seed", "1", "--m", "2", "-q")[0] == EXIT_USAGE

    out_file = tmp_path / "refine.json"
    argv = ("refine", "--random", "3:4:20", "--seed", "7", "--m", "2", "-q")
    assert _run(capsys, *argv, "--out", str(out_file))[0] == EXIT_OK
    code, out = _run(capsys, *argv)
    assert code == EXIT_OK
    assert json.loads(out) == load_artifact(str(out_file))


def test_delta_verb(capsys):
    """Test Delta-system reports over F_9 and F_31."""
    code, out = _run(capsys, "delta", "--q", "9", "-q")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["kind"] == "delta_report"
    assert report["passed"] is True

    code, out = _run(capsys, "delta", "--q", "31", "--ratio-t", "2", "-q")
    assert code == EXIT_OK
    assert json.loads(out)["ratio_sumsets"]["passed"] is True

    assert _run(capsys, "delta", "--q", "12", "-q")[0] == EXIT_USAGE


def test_lab_needs_three_dimensions(capsys):
    """Test the dimension check of the pipeline."""
    assert _run(capsys, "lab", "--p", "7", "--n", "2", "-q")[0] == EXIT_USAGE


def test_lab_writes_histogram(tmp_path, capsys):
    """Test the pipeline artifact and the richness CSV."""
    csv_path = tmp_path / "hist.csv"
    code, out = _run(capsys, "lab", "--p", "7", "--n", "3", "--csv", str(csv_path), "-q")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["kind"] == "pipeline_report"
    assert report["stage"] == "complete"
    assert len(report["certificates"]) == 3
    assert csv_path.read_text().splitlines()[0] == "richness,line_count"


def test_lab_rejects_instances_for_other_beta(tmp_path, capsys):
    """Test that the pipeline refuses a loaded instance built for beta = 0."""
    path = tmp_path / "inst.json"
    argv = ("construct", "prime", "--p", "7", "--n", "3", "--beta", "0", "--out", str(path), "-q")
    assert _run(capsys, *argv)[0] == EXIT_OK
    assert _run(capsys, "lab", "--p", "7", "--n", "3", "--in", str(path), "-q")[0] == EXIT_USAGE


def test_usage_errors(capsys):
    """Test missing verb, unknown flags and --version."""
    assert _run(capsys)[0] == EXIT_USAGE
    assert _run(capsys, "construct", "prime", "--p", "7", "--n", "2", "--bogus")[0] == EXIT_USAGE
    assert _run(capsys, "--version")[0] == EXIT_OK


def test_generate_config(tmp_path, capsys):
    """Test that the generated file loads back to the defaults."""
    path = tmp_path / "lab.yaml"
    assert _run(capsys, "--generate-config", str(path))[0] == EXIT_OK
    assert LabConfig.from_file(str(path)) == LabConfig()
    assert _run(capsys, "--generate-config", str(tmp_path / "lab.txt"))[0] == EXIT_USAGE


def test_bad_config_file(tmp_path, capsys):
    """Test that unknown configuration keys are usage errors."""
    path = tmp_path / "bad.yaml"
    path.write_text("max_rounds: []\n")
    assert _run(capsys, "delta", "--q", "7", "-c", str(path), "-q")[0] == EXIT_USAGE


def test_json_log_file(tmp_path, capsys):
    """Test structured check records in the log file."""
    log_path = tmp_path / "logs" / "lab.log"
    code, _ = _run(
        capsys, "construct", "psquare", "--p", "3", "--n", "2", "--log-file", str(log_path), "--json-logs", "-q"
    )
    assert code == EXIT_OK
    records = [json.loads(line) for line in log_path.read_text().splitlines()]
    assert any(r.get("check") == "instance_witnesses" and r["passed"] for r in records)
