import csv
import math
import subprocess
import sys

import pytest
from scipy import special

from hetdetect import mc
from hetdetect.cli import main, parse_grid


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_parse_grid():
    assert parse_grid("0:1:3").tolist() == [0.0, 0.5, 1.0]
    assert parse_grid("0.5, 1.5").tolist() == [0.5, 1.5]


def test_curves_csv_and_ordering(tmp_path):
    out = tmp_path / "curves.csv"
    assert main(["curves", "--family", "gaussian", "--samplesize", "poisson-max1",
                 "--a0", "0.5", "--theta-grid", "-1:1.5:26", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["curve_id", "theta", "value", "regime", "nu_star", "a_star"]
    by = {}
    for r in rows:
        by.setdefault(r["theta"], {})[r["curve_id"]] = float(r["value"])
    assert len(by) == 26
    for v in by.values():
        assert v["BJ"] >= v["BH"] - 1e-12 >= v["BB"] - 2e-12
    assert (tmp_path / "curves.csv.manifest").exists()


def test_curves_manifest_reproduces(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["curves", "--family", "poisson", "--a0", "0.5", "--samplesize", "rounded-normal",
          "--theta-grid", "0.1:1:7", "--out", str(a)])
    main(["curves", "--config", f"{a}.manifest", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_unknown_family_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["curves", "--family", "cauchy", "--a0", "0.5", "--out", "x.csv"])
    assert e.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_family_in_config_exit_2(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("family=cauchy\na0=0.5\n")
    assert main(["curves", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2


def test_missing_a0_exit_2(tmp_path):
    assert main(["curves", "--out", str(tmp_path / "x.csv")]) == 2


def test_power_stats_filter_and_generated_seed(tmp_path):
    out = tmp_path / "power.csv"
    rc = main(["power", "--a0", "0.5", "--n", "1000", "--runs-null", "19", "--runs-alt", "10",
               "--beta-grid", "0.6", "--theta-grid", "0.5,1.0", "--thresholds-m", "30,100,1000",
               "--stats", "hc,chisq", "--out", str(out)])
    assert rc == 0
    rows = read_csv(out)
    assert {r["statistic_id"] for r in rows} == {"hc", "chisq"}
    assert len(rows) == 4
    man = mc.read_manifest(f"{out}.manifest")
    assert int(man["seed"]) >= 0
    assert {r["seed"] for r in rows} == {man["seed"]}
    again = tmp_path / "again.csv"
    assert main(["power", "--config", f"{out}.manifest", "--out", str(again)]) == 0
    assert out.read_bytes() == again.read_bytes()


def test_calibrate(tmp_path):
    out = tmp_path / "crit.csv"
    assert main(["calibrate", "--a0", "0.5", "--n", "500", "--runs-null", "19", "--seed", "4",
                 "--thresholds-m", "10,100", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert [r["statistic_id"] for r in rows] == ["hc", "hcthres", "bonferroni", "rankadjust",
                                                 "chisq"]
    assert all(r["rank"] == "1" for r in rows)


def test_stat_zero_responses(tmp_path, capsys):
    f = tmp_path / "d.csv"
    f.write_text("y,k\n0,1\n0,4\n0,9\n")
    assert main(["stat", str(f)]) == 0
    lines = dict(l.split(",", 1) for l in capsys.readouterr().out.strip().splitlines()[1:])
    assert lines["chisq"] == "0,large"
    assert lines["bonferroni"].endswith(",small")


def test_stat_hc_example(tmp_path, capsys):
    # Gaussian responses whose two-sided p-values are 0.1 and 0.6
    y1, y2 = float(-special.ndtri(0.05)), float(-special.ndtri(0.3))
    f = tmp_path / "d.csv"
    f.write_text(f"y,k\n{y1!r},1\n{y2!r},1\n")
    assert main(["stat", str(f)]) == 0
    out = capsys.readouterr().out
    hc = float(next(l for l in out.splitlines() if l.startswith("hc,")).split(",")[1])
    assert hc == pytest.approx(0.8 / math.sqrt(0.18), rel=1e-9)


def test_stat_empty_and_malformed(tmp_path, capsys):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    assert main(["stat", str(empty)]) == 2
    bad = tmp_path / "b.csv"
    bad.write_text("y,k\n1,2\n3,abc\n")
    assert main(["stat", str(bad)]) == 2
    assert ":3:" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hetdetect", "--help"], capture_output=True,
                         text=True)
    assert res.returncode == 0
    assert "curves" in res.stdout
