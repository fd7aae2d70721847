import json

import pytest

from qrealize.cli import main

from conftest import CAVITY_PATH, mutate

GOLDEN_H = "(0+1i)*a1'^2*a2^2 + (0-1i)*a2'^2*a1^2"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def broken_path(tmp_path, cavity_text):
    path = tmp_path / "broken.qsde"
    path.write_text(
        mutate(cavity_text, "B = [[-sqrt(2*k1), 0],", "B = [[sqrt(2*k1), 0],")
    )
    return str(path)


# -- check --------------------------------------------------------------------

def test_check_passes_on_fixture(capsys):
    code, out, _ = run_cli(capsys, "check", str(CAVITY_PATH))
    assert code == 0
    assert "overall: PASS" in out
    assert "[FAIL]" not in out
    assert f"Hbar = {GOLDEN_H} (self-adjoint: yes)" in out
    assert "nbar = 4" in out


def test_check_fails_on_broken_model(capsys, broken_path):
    code, out, _ = run_cli(capsys, "check", broken_path)
    assert code == 1
    assert "[FAIL] PR-B-match" in out
    assert "overall: FAIL" in out


def test_check_subset_selection(capsys, tmp_path, cavity_text):
    # a broken D leaves the class conditions intact, so selecting only the
    # class family passes while the full run would not
    path = tmp_path / "bad_d.qsde"
    path.write_text(mutate(cavity_text, "D = identity", "D = [[2,0],[0,2]]"))
    code, out, _ = run_cli(capsys, "check", str(path), "--checks", "class")
    assert code == 0
    assert "CLASS-generator-identity" in out
    assert "PR-D-identity" not in out
    code, _, _ = run_cli(capsys, "check", str(path))
    assert code == 1


def test_check_unknown_selection_is_config_error(capsys):
    code, _, err = run_cli(capsys, "check", str(CAVITY_PATH), "--checks", "bogus")
    assert code == 2
    assert "unknown check" in err


def test_check_missing_file(capsys):
    code, _, err = run_cli(capsys, "check", "/no/such/model.qsde")
    assert code == 2
    assert "error:" in err


def test_check_parse_error_reports_position(capsys, tmp_path, cavity_text):
    path = tmp_path / "bad.qsde"
    path.write_text(cavity_text.replace("C[1] = sqrt(2*k1)*a1", "C[1] = sqrt(2*k1)*a9"))
    code, _, err = run_cli(capsys, "check", str(path))
    assert code == 2
    assert "unknown mode a9" in err


def test_check_json_schema_and_verdict(capsys):
    code, out, _ = run_cli(capsys, "check", str(CAVITY_PATH), "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["overall"] is True
    assert payload["derived"]["hamiltonian"] == GOLDEN_H
    for entry in payload["checks"]:
        assert set(entry) == {
            "condition_id", "description", "pass", "residual_norm", "witness",
        }


def test_check_json_output_is_stable(capsys):
    _, first, _ = run_cli(capsys, "check", str(CAVITY_PATH), "--json")
    _, second, _ = run_cli(capsys, "check", str(CAVITY_PATH), "--json")
    assert first == second


def test_check_text_and_json_verdicts_agree(capsys, broken_path):
    text_code, _, _ = run_cli(capsys, "check", broken_path)
    json_code, out, _ = run_cli(capsys, "check", broken_path, "--json")
    assert text_code == json_code == 1
    assert json.loads(out)["overall"] is False


def test_check_float_mode(capsys):
    code, out, _ = run_cli(capsys, "check", str(CAVITY_PATH), "--float")
    assert code == 0
    assert "overall: PASS" in out


def test_check_env_tolerance(capsys, monkeypatch):
    monkeypatch.setenv("QREAL_TOL", "1e-6")
    code, _, _ = run_cli(capsys, "check", str(CAVITY_PATH), "--float")
    assert code == 0
    monkeypatch.setenv("QREAL_TOL", "-1")
    code, _, err = run_cli(capsys, "check", str(CAVITY_PATH))
    assert code == 2
    assert "tolerance" in err


def test_check_literal_theta_bar_audit(capsys):
    code, out, _ = run_cli(capsys, "check", str(CAVITY_PATH), "--json",
                           "--literal-theta-bar")
    assert code == 0
    payload = json.loads(out)
    audit = payload["derived"]["hamiltonian_printed_theta_bar"]
    assert audit != payload["derived"]["hamiltonian"]


def test_check_with_oracle(capsys):
    code, out, _ = run_cli(capsys, "check", str(CAVITY_PATH), "--oracle",
                           "--fock-n", "6", "--guard", "4")
    assert code == 0
    assert "oracle" in out
    assert "[FAIL]" not in out


# -- extract ------------------------------------------------------------------

def test_extract_prints_hamiltonian_and_coupling(capsys):
    code, out, _ = run_cli(capsys, "extract", str(CAVITY_PATH))
    assert code == 0
    assert f"Hbar = {GOLDEN_H}" in out
    assert "Lbar[1] = (2+0i)*a1" in out
    assert "Lbar[3] = (2+0i)*a1'" in out


def test_extract_refuses_unrealizable_without_force(capsys, broken_path):
    code, out, err = run_cli(capsys, "extract", broken_path)
    assert code == 1
    assert out == ""
    assert "--force" in err


def test_extract_force_warns_but_prints(capsys, broken_path):
    code, out, err = run_cli(capsys, "extract", broken_path, "--force")
    assert code == 1
    assert "Hbar =" in out
    assert "formal" in err


# -- oracle -------------------------------------------------------------------

def test_oracle_subcommand_passes(capsys):
    code, out, _ = run_cli(capsys, "oracle", str(CAVITY_PATH), "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["oracle"]
    assert all(e["pass"] for e in payload["oracle"])
    assert all(e["max_deviation"] <= 1e-9 for e in payload["oracle"])


def test_oracle_rejects_bad_guard(capsys):
    code, _, err = run_cli(capsys, "oracle", str(CAVITY_PATH), "--guard", "-1")
    assert code == 2
    assert "guard" in err


def test_no_subcommand_is_usage_error(capsys):
    code, _, _ = run_cli(capsys, "check")
    assert code == 2
