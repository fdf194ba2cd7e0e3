import csv
import json

import pytest

from bayesclean.cli import main
from bayesclean.relation import load_csv


@pytest.fixture
def workdir(tmp_path):
    assert main(["generate", "--n", "400", "--seed", "2", "--output", str(tmp_path / "clean.csv")]) == 0
    return tmp_path


def test_pipeline(workdir, capsys):
    w = workdir
    assert main([
        "inject", "--input", str(w / "clean.csv"), "--output", str(w / "dirty.csv"),
        "--tau", "0.03", "--mix", "1,1,1", "--seed", "5", "--ground-truth", str(w / "gt.json"),
    ]) == 0
    assert main([
        "clean", "--input", str(w / "dirty.csv"), "--output", str(w / "rep.csv"),
        "--model", str(w / "bn.json"), "--repairs", str(w / "repairs.json"), "-v",
    ]) == 0
    assert (w / "bn.json").exists()
    doc = json.loads((w / "repairs.json").read_text())
    assert doc["changed_tuples"] == len(doc["repairs"])
    # second run reuses the saved network and gives the same output
    assert main(["-v", "clean", "--input", str(w / "dirty.csv"), "--output", str(w / "rep2.csv"),
                 "--model", str(w / "bn.json")]) == 0
    assert load_csv(w / "rep.csv").rows == load_csv(w / "rep2.csv").rows

    capsys.readouterr()
    args = ["eval", "--clean", str(w / "clean.csv"), "--dirty", str(w / "dirty.csv"),
            "--repaired", str(w / "rep.csv"), "--ground-truth", str(w / "gt.json")]
    assert main(args + ["--report", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["dirty_cells"] > 0 and report["values_corrected"] > 0
    assert main(args + ["--report", "csv", "--output", str(w / "m.csv")]) == 0
    row = next(csv.DictReader((w / "m.csv").open()))
    assert int(row["values_corrected"]) == report["values_corrected"]


def test_learn_and_threshold(workdir):
    w = workdir
    assert main(["learn", "--input", str(w / "clean.csv"), "--output", str(w / "bn.json"), "--restarts", "1"]) == 0
    assert json.loads((w / "bn.json").read_text())["attributes"]
    assert main(["clean", "--input", str(w / "clean.csv"), "--output", str(w / "o.csv"),
                 "--model", str(w / "bn.json"), "--edit-threshold", "inf"]) == 0


def test_mine_cfd_summary(workdir, capsys):
    w = workdir
    summary = w / "summary.csv"
    for label in ("0%", "0%-again"):
        assert main(["mine-cfd", "--input", str(w / "clean.csv"), "--min-support", "20", "--max-lhs", "1",
                     "--output", str(w / "rules.json"), "--noise-label", label, "--summary-csv", str(summary)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "noise,rules,seconds"
    rows = list(csv.DictReader(summary.open()))
    assert [r["noise"] for r in rows] == ["0%", "0%-again"]
    assert int(rows[0]["rules"]) == json.loads((w / "rules.json").read_text())["count"] > 0


@pytest.mark.parametrize("axis,extra", [
    ("beta", {"betas": [2, 4]}),
    ("tau", {"taus": [0.01, 0.02]}),
    ("n", {"sizes": [100, 200]}),
])
def test_sweep(workdir, axis, extra):
    w = workdir
    cfg = {"input": str(w / "clean.csv"), "seed": 1, "tau": 0.02, **extra}
    (w / "cfg.json").write_text(json.dumps(cfg))
    assert main(["sweep", "--axis", axis, "--config", str(w / "cfg.json"), "--output", str(w / "s.csv")]) == 0
    rows = list(csv.DictReader((w / "s.csv").open()))
    assert len(rows) == 2 and all(r["error"] == "" for r in rows)
    assert {r["axis"] for r in rows} == {axis}


def test_errors_return_nonzero(tmp_path):
    assert main(["learn", "--input", str(tmp_path / "missing.csv"), "--output", str(tmp_path / "x")]) == 2
    with pytest.raises(SystemExit):
        main(["inject", "--input", "a", "--output", "b", "--tau", "0.1", "--mix", "1,1", "--ground-truth", "g"])
