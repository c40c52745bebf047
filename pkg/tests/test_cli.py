"""Front-door commands: formats, determinism, exit codes."""

import json

import pytest

from orthoconv.cli import main


def run_cli(args):
    return main(args)


def test_analyze_json_input(tmp_path):
    src = tmp_path / "coef.json"
    src.write_text('["1/3", "1/3", "1/3"]')
    out = tmp_path / "report.json"
    assert run_cli(["analyze", str(src), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["tail_set"] == ["0", "1/3", "2/3", "1"]
    assert rep["v_of_clipped_h"] == pytest.approx(1.0)
    assert rep["criteria"]["information"]["alpha1"] == pytest.approx(1.5849625007)


def test_analyze_csv_and_normalization_notice(tmp_path):
    src = tmp_path / "coef.csv"
    src.write_text("0.5\n0.5\n0.5\n")
    out = tmp_path / "report.json"
    assert run_cli(["analyze", str(src), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["notice"] is not None
    assert rep["tail_set"] == ["0", "1/3", "2/3", "1"]


def test_analyze_single_coefficient(tmp_path):
    src = tmp_path / "one.json"
    src.write_text('["1"]')
    out = tmp_path / "rep.json"
    assert run_cli(["analyze", str(src), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["criteria"]["information"]["alpha1"] == 0
    assert rep["criteria"]["beta"]["sum"] == 0
    assert rep["criteria"]["tandori"]["sum"] == 0


def test_analyze_empty_file_is_data_error(tmp_path):
    src = tmp_path / "empty.json"
    src.write_text("")
    assert run_cli(["analyze", str(src)]) == 2


def test_analyze_deterministic_bytes(tmp_path):
    src = tmp_path / "coef.json"
    src.write_text('["1/2", "1/3", "1/7", "1/9"]')
    o1, o2 = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli(["analyze", str(src), "--seed", "7", "--out", str(o1)]) == 0
    assert run_cli(["analyze", str(src), "--seed", "7", "--out", str(o2)]) == 0
    assert o1.read_bytes() == o2.read_bytes()


def test_construct_family_deterministic(tmp_path):
    o1, o2 = tmp_path / "f1.json", tmp_path / "f2.json"
    assert run_cli(["construct", "--k", "2", "--full", "--out", str(o1)]) == 0
    assert run_cli(["construct", "--k", "2", "--full", "--out", str(o2)]) == 0
    assert o1.read_bytes() == o2.read_bytes()
    rep = json.loads(o1.read_text())
    assert rep["family_size"] == 9
    for i, row in enumerate(rep["gram"]):
        for j, v in enumerate(row):
            assert v == pytest.approx((3 / 9) if i == j else 0.0)


def test_construct_budget_error():
    assert run_cli(["construct", "--k", "9"]) == 2


def test_construct_usage_error():
    assert run_cli(["construct"]) == 1


def test_construct_grid_process(tmp_path):
    out = tmp_path / "proc.json"
    assert run_cli(["construct", "--grid", "1", "--y", "8",
                    "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["achieved_y"] == pytest.approx(8.0)
    assert rep["gram_deviation"] == "0"
    assert rep["final_value_ok"] and rep["membership_ok"]
    assert rep["exceedance_table"] == [
        {"y": "8", "measure_ge": "5/9", "measure_gt": "5/9"}]


def test_construct_points_process(tmp_path):
    out = tmp_path / "proc.json"
    code = run_cli(["construct", "--b", "0,1/3,2/3,1", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["achieved_y"] == pytest.approx(4.0)


def test_construct_invalid_points_is_data_error(tmp_path):
    assert run_cli(["construct", "--b", "0,1/2,1"]) == 2


def test_verify_selected_suites(tmp_path):
    out = tmp_path / "ver.json"
    code = run_cli(["verify", "--suite", "block_selection",
                    "--suite", "digit_tail_bound", "--seed", "0",
                    "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["passed"] is True
    assert {r["name"] for r in rep["results"]} == {"block_selection",
                                                   "digit_tail_bound"}


def test_verify_unknown_suite_is_usage_error():
    assert run_cli(["verify", "--suite", "no-such-suite"]) == 1


def test_verify_seeded_deterministic(tmp_path):
    o1, o2 = tmp_path / "v1.json", tmp_path / "v2.json"
    for o in (o1, o2):
        assert run_cli(["verify", "--suite", "sandwich", "--seed", "3",
                        "--out", str(o)]) == 0
    assert o1.read_bytes() == o2.read_bytes()


def test_cantor_command(tmp_path):
    out = tmp_path / "cantor.json"
    code = run_cli(["cantor", "--t", "0", "--window", "1/3",
                    "--depth", "4", "--depth", "6", "--depth", "8",
                    "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    tr = rep["windows"][0]["trace"]
    assert all(tr[i] <= tr[i + 1] + 1e-12 for i in range(len(tr) - 1))


def test_measure_command(tmp_path):
    src = tmp_path / "probs.json"
    src.write_text('["1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9"]')
    out = tmp_path / "m.json"
    assert run_cli(["measure", str(src), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["criterion_sum"] == pytest.approx(2.0)


def test_measure_invalid_distribution(tmp_path):
    src = tmp_path / "probs.json"
    src.write_text('["1/2","1/4"]')
    assert run_cli(["measure", str(src)]) == 2


def test_exact_mode_env(tmp_path, monkeypatch):
    src = tmp_path / "coef.json"
    src.write_text('["1/3", "1/3", "1/3"]')
    out = tmp_path / "rep.json"
    monkeypatch.setenv("ORTHO_EXACT", "1")
    assert run_cli(["analyze", str(src), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["tail_set_exact"] == ["0", "1/3", "2/3", "1"]
