import csv
import json

import pytest

from asmp.cli import EXIT_CONFIG, EXIT_USAGE, main
from asmp.report import RunReport, ReportRow, compare, reduction
from asmp.sim import run
from asmp.sim.scenario import preset


def test_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--config", "dynamic", "--out", str(out), "--seed", "7",
                 "--duration", "600", "--verify"]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["ledgers.csv", "manifest.json", "metrics.csv", "plane.csv", "trace.csv"]
    man = json.loads((out / "manifest.json").read_text())
    assert man["seed"] == 7 and man["overrides"] == {"seed": 7, "duration": 600.0}
    assert man["config_hash"] == preset("dynamic").with_overrides(seed=7, duration=600.0).config_hash()


def test_run_single_algorithm(tmp_path):
    assert main(["run", "--config", "dynamic", "--out", str(tmp_path), "--duration", "300",
                 "--algorithms", "fixed"]) == 0
    rows = dict(csv.reader(open(tmp_path / "metrics.csv")))
    assert rows["algorithm"] == "fixed" and int(rows["sample_count"]) == 61
    assert main(["run", "--config", "dynamic", "--out", str(tmp_path),
                 "--algorithms", "fixed,asa-m"]) == EXIT_USAGE


def test_missing_config(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.yaml"), "--out", str(tmp_path)]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["run", "--out", str(tmp_path)])
    assert exc.value.code == EXIT_USAGE


def test_invalid_config_is_itemized(tmp_path, capsys):
    f = tmp_path / "bad.yaml"
    f.write_text("duration: -5\nalgorithm: nope\n")
    assert main(["run", "--config", str(f), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "duration" in err and "algorithm" in err


def test_compare_arity_and_names(tmp_path, capsys):
    assert main(["compare", "--config", "dynamic", "--out", str(tmp_path),
                 "--algorithms", "asa-m"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["compare", "--config", "dynamic", "--out", str(tmp_path), "--algorithms", "asa-m,zzz"])
    assert exc.value.code == EXIT_USAGE
    assert "zzz" in capsys.readouterr().err
    with pytest.raises(ValueError):
        compare(preset("dynamic"), ["asa-m"])


def test_compare_identical_rows(tmp_path):
    assert main(["compare", "--config", "dynamic", "--out", str(tmp_path), "--duration", "900",
                 "--algorithms", "asa-m,asa-m"]) == 0
    rows = list(csv.reader(open(tmp_path / "report.csv")))
    assert rows[1] == rows[2]
    assert (tmp_path / "report.txt").read_text().startswith("algorithm")


def test_reduction_arithmetic_against_ledgers():
    sc = preset("dynamic").with_overrides(duration=1200.0)
    rep = compare(sc, ["fixed", "asa-m"], jobs=2)
    fixed_mj = sum(l.e_c for l in run(sc, "fixed").ledgers.values())
    asa_mj = sum(l.e_c for l in run(sc, "asa-m").ledgers.values())
    de, ds = rep.reductions(rep.row("asa-m"))
    assert de == pytest.approx(1 - asa_mj / fixed_mj, rel=1e-12)
    assert ds == 1 - rep.row("asa-m").sample_count / rep.row("fixed").sample_count
    assert rep.reductions(rep.fixed) == (0.0, 0.0)


def test_report_without_fixed():
    r = RunReport([ReportRow("asa-m", 1.0, 10, 0, 0.1, 5.0, (1.0,))])
    assert r.reductions(r.rows[0]) == (None, None)
    assert reduction(1.0, 0.0) is None
    assert "-" in r.table()
