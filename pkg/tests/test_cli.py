from __future__ import annotations

import json

import pytest

import qpade.cli as cli
from qpade.acceptance import CriterionResult
from qpade.series import paramset_to_text, random_paramset


def _json_payload(captured: str) -> dict:
    marker = "\nJSON:\n"
    assert marker in captured
    tail = captured.split(marker, 1)[1]
    # the JSON object ends at the closing brace in column 0
    end = tail.index("\n}") + 2
    return json.loads(tail[:end])


def test_verify_exits_zero(capsys):
    code = cli.main(["verify", "--surface", "a4", "--m", "2", "--n", "1", "--seed", "3"])
    out = capsys.readouterr().out
    assert code == 0
    payload = _json_payload(out)
    assert payload["ok"] is True
    assert payload["window_ok"] is True
    assert payload["single_det_ok"] is True
    assert payload["linear_solve_ok"] is True
    assert "tau:" in out and "elapsed:" in out


def test_solutions_and_orbit_and_compat_exit_zero(capsys):
    assert cli.main(["solutions", "--surface", "e6", "--m", "1", "--n", "2"]) == 0
    payload = _json_payload(capsys.readouterr().out)
    assert payload["match"] is True

    assert cli.main(["orbit", "--surface", "a21", "--steps", "3"]) == 0
    payload = _json_payload(capsys.readouterr().out)
    assert payload["bijective"] is True and payload["balance_ok"] is True
    assert len(payload["orbit"]) == 4

    assert cli.main(["compat", "--surface", "d5", "--count", "2"]) == 0
    payload = _json_payload(capsys.readouterr().out)
    assert payload["ok"] is True and len(payload["trials"]) == 2


def test_argparse_failures_exit_two(capsys):
    assert cli.main(["verify", "--surface", "zz"]) == 2
    assert cli.main([]) == 2
    assert cli.main(["orbit", "--steps", "0"]) == 2
    capsys.readouterr()


def test_help_exits_zero(capsys):
    assert cli.main(["--help"]) == 0
    assert "selfcheck" in capsys.readouterr().out


def test_params_file_round_trip(tmp_path, capsys):
    ps = random_paramset("d5", 2, 1, seed=5)
    path = tmp_path / "params.txt"
    path.write_text(paramset_to_text(ps), encoding="utf-8")
    assert cli.main(["verify", "--params", str(path)]) == 0
    out = capsys.readouterr().out
    assert _json_payload(out)["params"] == paramset_to_text(ps)


def test_bad_params_file_exits_two(tmp_path, capsys):
    path = tmp_path / "params.txt"
    path.write_text("not a parameter file\n", encoding="utf-8")
    assert cli.main(["verify", "--params", str(path)]) == 2
    assert "error:" in capsys.readouterr().err

    assert cli.main(["verify", "--params", str(tmp_path / "missing.txt")]) == 2
    assert "error:" in capsys.readouterr().err


def test_degenerate_params_exit_two(tmp_path, capsys):
    # a1/b1 equals q, which the genericity guard rejects
    path = tmp_path / "params.txt"
    path.write_text(
        "surface=d5\nq=1/2\nm=1\nn=1\na1=1/4\na2=3/7\nb1=1/2\nb2=5/11\n",
        encoding="utf-8",
    )
    assert cli.main(["verify", "--params", str(path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_out_file_is_deterministic_and_timing_free(tmp_path, capsys):
    args = ["verify", "--surface", "a21", "--m", "1", "--n", "2", "--seed", "9"]
    out1 = tmp_path / "r1.txt"
    out2 = tmp_path / "r2.txt"
    assert cli.main(args + ["--out", str(out1)]) == 0
    stdout = capsys.readouterr().out
    assert cli.main(args + ["--out", str(out2)]) == 0
    capsys.readouterr()
    block1 = out1.read_bytes()
    assert block1 == out2.read_bytes()
    text = block1.decode("utf-8")
    assert "elapsed:" not in text and "timing" not in text
    assert stdout.startswith(text)
    assert "elapsed:" in stdout


def _stub_results(all_pass: bool):
    results = [
        CriterionResult(i, f"name-{i}", True, f"detail {i}", 0.25)
        for i in range(1, 10)
    ]
    if not all_pass:
        results[4] = CriterionResult(5, "name-5", False, "broken", 0.25)
    return results


def test_selfcheck_green_and_red(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(cli, "run_all", lambda a21_paper_literal: _stub_results(True))
    out = tmp_path / "self.txt"
    assert cli.main(["selfcheck", "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "criterion 1 [name-1]: PASS - detail 1" in stdout
    assert "acceptance suite: PASS" in stdout
    assert "timing criterion 1: 0.250s" in stdout
    text = out.read_text(encoding="utf-8")
    assert "timing" not in text and "elapsed" not in text
    assert "acceptance suite: PASS" in text

    monkeypatch.setattr(cli, "run_all", lambda a21_paper_literal: _stub_results(False))
    assert cli.main(["selfcheck"]) == 1
    stdout = capsys.readouterr().out
    assert "criterion 5 [name-5]: FAIL - broken" in stdout
    assert "acceptance suite: FAIL" in stdout


def test_selfcheck_forwards_literal_flag(capsys, monkeypatch):
    seen = {}

    def fake(a21_paper_literal):
        seen["flag"] = a21_paper_literal
        return _stub_results(True)

    monkeypatch.setattr(cli, "run_all", fake)
    assert cli.main(["selfcheck", "--a21-paper-literal"]) == 0
    capsys.readouterr()
    assert seen["flag"] is True
