import json

import pytest

from cli_golden import CASES, GOLDEN, check_case, run_cli
from treeforcing.cli import main


@pytest.mark.parametrize("case", CASES, ids=[c[0] for c in CASES])
def test_golden(case, tmp_path):
    assert check_case(case, tmp_path) == []


def test_dump_tree(capsys):
    assert main(["dump-tree", "restrict(full,1)", "--depth", "1"]) == 0
    assert json.loads(capsys.readouterr().out) == {"levels": [["Λ"], ["1"]]}
    assert main(["dump-tree", "restrict(full,1)", "--depth", "3", "--format", "dot"]) == 0
    assert capsys.readouterr().out == (GOLDEN / "dump_tree_restrict.dot").read_text()


def test_dump_tree_errors(capsys):
    assert main(["dump-tree", "cone(01"]) == 2
    err = capsys.readouterr().err
    assert "ParseError" in err and "position 7" in err
    assert main(["dump-tree", "restrict(cone(0),1)"]) == 1
    assert "NotInTree" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert main(["verify", "--checks", "nosuch"]) == 2
    assert main(["verify", "--depth", "0", "--checks", "xr"]) == 2
    with pytest.raises(SystemExit) as e:
        main(["nosuch-command"])
    assert e.value.code == 2


def test_config_errors(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text('schedule = ["disjointness(xi<*,m<3)"]\n')
    assert main(["run-stages", str(cfg), "--out", str(tmp_path / "t.json")]) == 2
    assert "heights" in capsys.readouterr().err
    assert main(["run-stages", str(tmp_path / "missing.toml")]) == 2


def test_budget_error_exits_1(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text('budget = 3\nschedule = ["heights(xi<*,m<3,h<2)"]\n')
    assert main(["run-stages", str(cfg), "--out", str(tmp_path / "t.json")]) == 1
    assert "StageBudget" in capsys.readouterr().err


def test_negative_control(tmp_path):
    proc = run_cli(["verify", "--checks", "xr", "--xr-samples", "10", "--negative-control",
                    "--report", "report.json"], tmp_path)
    assert proc.returncode == 1
    out = proc.stdout.decode()
    assert "negative-control: fail" in out and "witness=" in out
    report = json.loads((tmp_path / "report.json").read_text())
    assert [c["status"] for c in report["checks"]] == ["pass", "fail"]


def test_rerun_is_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["run-stages", "--out", str(tmp_path / d / "t.json")]) == 0
    assert (tmp_path / "a" / "t.json").read_bytes() == (tmp_path / "b" / "t.json").read_bytes()


def test_avoid_demo(tmp_path, capsys):
    from pathlib import Path

    cfg = Path(__file__).resolve().parents[1] / "configs" / "avoid_zero.toml"
    assert main(["avoid-demo", str(cfg), "--out", str(tmp_path / "a.json")]) == 0
    doc = json.loads((tmp_path / "a.json").read_text())
    assert doc["demos"][0]["check"]["below_u"] is True
    assert "zero: below_u=True avoid=yes" in capsys.readouterr().err
