"""CLI contract: subcommands, exit codes, manifests, reproducibility."""
import json

import pytest

from stablewalk.cli import main


@pytest.fixture(scope="module")
def law_cfg(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "law.cfg"
    path.write_text(
        "# symmetric test law\nfamily = two_sided_pareto\nalpha = 1.5\nB = 0.5\n"
        "q_plus = 0.5\nq_minus = 0.5\n"
    )
    return path


@pytest.fixture(scope="module")
def built_law(law_cfg, tmp_path_factory):
    out = tmp_path_factory.mktemp("law_out")
    assert main(["law", "--config", str(law_cfg), "--out", str(out)]) == 0
    return out / "law.json"


def test_law_build_outputs(built_law):
    out = built_law.parent
    assert built_law.exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["subcommand"] == "law"
    assert str(built_law) in manifest["outputs"]
    assert (out / "tails.csv").read_text().startswith("schema_version")


def test_law_rerun_identical_hash(law_cfg, built_law, tmp_path):
    out2 = tmp_path / "rerun"
    assert main(["law", "--config", str(law_cfg), "--out", str(out2)]) == 0
    assert (out2 / "law.json").read_text() == built_law.read_text()


def test_invalid_alpha_exit_code(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("family = two_sided_pareto\nalpha = 2.1\n")
    assert main(["law", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_malformed_config_exit_code(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("family two_sided_pareto\n")
    assert main(["law", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_killed_table_zero_column(built_law, tmp_path):
    assert (
        main(
            [
                "table",
                "--kind",
                "killed",
                "--law",
                str(built_law),
                "--n",
                "64",
                "--x",
                "3",
                "--set",
                "0",
                "--window",
                "512",
                "--out",
                str(tmp_path),
            ]
        )
        == 0
    )
    rows = (tmp_path / "killed_n64.csv").read_text().splitlines()[1:]
    for row in rows:
        _, n, x, y, val = row.split(",")
        if y == "0":
            assert float(val) == 0.0


def test_potential_table_origin_row(built_law, tmp_path):
    assert (
        main(
            ["table", "--kind", "potential", "--law", str(built_law), "--x-max", "6", "--out", str(tmp_path)]
        )
        == 0
    )
    rows = (tmp_path / "potential.csv").read_text().splitlines()[1:]
    vals = {int(r.split(",")[1]): float(r.split(",")[2]) for r in rows}
    assert vals[0] == 0.0
    assert vals[3] > 0


def test_verify_quick_pass_and_report(built_law, tmp_path):
    out = tmp_path / "v"
    assert main(["verify", "thm1", "--law", str(built_law), "--out", str(out), "--quick"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary[0]["theorem_id"] == "thm1"
    assert summary[0]["passed"] is True
    rep_out = tmp_path / "agg"
    assert main(["report", "--dir", str(out), "--out", str(rep_out)]) == 0
    assert (rep_out / "report.csv").exists()


def test_verify_unknown_theorem(built_law, tmp_path):
    assert main(["verify", "thm99", "--law", str(built_law), "--out", str(tmp_path)]) == 2


def test_verify_thm6_on_two_sided_fails_fast(built_law, tmp_path, capsys):
    """An explicitly requested theorem with a failed precondition exits 2."""
    out = tmp_path / "v6"
    code = main(["verify", "thm6", "--law", str(built_law), "--out", str(out), "--quick"])
    assert code == 2
    assert "InfiniteCPlus" in capsys.readouterr().err


def test_verify_all_quick_writes_summary(built_law, tmp_path):
    out = tmp_path / "vall"
    code = main(["verify", "all", "--quick", "--law", str(built_law), "--out", str(out)])
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    ids = {s["theorem_id"] for s in summary}
    assert {"thm1", "llt"} <= ids
    assert all(s.get("passed") in (True, None) for s in summary)
    manifest = json.loads((out / "manifest.json").read_text())
    assert str(out / "summary.json") in manifest["outputs"]
