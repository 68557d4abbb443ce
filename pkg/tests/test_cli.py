import json

import pytest

from msdgm.cli import main
from msdgm.graph import from_json
from msdgm.pattern import load_pattern


@pytest.fixture
def spec_file(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"d": 4, "n": 200, "seed": 3,
                                "couplings": [{"a": 0, "b": 1, "rho": 0.9, "sigma": 0.01}]}))
    return path


@pytest.fixture
def pattern_file(tmp_path, spec_file):
    out = tmp_path / "pattern.csv"
    assert main(["simulate", str(spec_file), "--out", str(out)]) == 0
    return out


def test_simulate_writes_loadable_file(tmp_path, spec_file, capsys):
    out = tmp_path / "p.csv"
    assert main(["simulate", str(spec_file), "--out", str(out)]) == 0
    assert "coupled pairs: T0-T1" in capsys.readouterr().out
    p = load_pattern(str(out))
    assert p.type_names == ("T0", "T1", "T2", "T3")
    again = tmp_path / "q.csv"
    main(["simulate", str(spec_file), "--out", str(again)])
    assert out.read_bytes() == again.read_bytes()


def test_simulate_independent_spec(tmp_path, capsys):
    spec = tmp_path / "s.json"
    spec.write_text('{"d": 3, "n": 10, "seed": 1}')
    out = tmp_path / "p.csv"
    assert main(["simulate", str(spec), "--out", str(out)]) == 0
    assert "coupled pairs: none" in capsys.readouterr().out
    assert load_pattern(str(out)).d == 3


def test_analyze_outputs(tmp_path, pattern_file):
    out = tmp_path / "run"
    assert main(["analyze", str(pattern_file), "--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["edge_statistics.csv", "msdgm_alpha_0.3.dot", "msdgm_alpha_0.3.json", "msdgm_alpha_0.6.dot",
                     "msdgm_alpha_0.6.json", "msdgm_alpha_0.9.dot", "msdgm_alpha_0.9.json", "report.txt"]
    g = from_json((out / "msdgm_alpha_0.3.json").read_text())
    assert (0, 1) in g.edges
    report = (out / "report.txt").read_text()
    assert "usable frequencies" in report and "timing" in report


def test_analyze_is_byte_identical_across_runs_and_workers(tmp_path, pattern_file):
    runs = []
    for k, workers in enumerate(["1", "1", "4"]):
        out = tmp_path / f"run{k}"
        assert main(["analyze", str(pattern_file), "--out", str(out), "--workers", workers]) == 0
        runs.append({p.name: p.read_bytes() for p in out.iterdir() if p.suffix in (".dot", ".json", ".csv")})
    assert runs[0] == runs[1] == runs[2]


def test_analyze_rejects_single_type(tmp_path, capsys):
    f = tmp_path / "one.csv"
    f.write_text("x,y,type,mark\n0,0,a,1\n1,2,a,3\n2,1,a,2\n")
    out = tmp_path / "run"
    assert main(["analyze", str(f), "--out", str(out)]) != 0
    assert "at least 2 types" in capsys.readouterr().err
    assert not any(out.glob("*"))


def test_analyze_bad_row(tmp_path, capsys):
    f = tmp_path / "bad.csv"
    f.write_text("x,y,type,mark\n0,0,a,1\n1,2,b,NA\n")
    assert main(["analyze", str(f), "--out", str(tmp_path / "run")]) == 2
    assert "row 3" in capsys.readouterr().err


def test_analyze_custom_columns_and_window(tmp_path):
    f = tmp_path / "tab.tsv"
    rows = ["lon\tlat\tspecies\tdbh"]
    for k in range(60):
        rows.append(f"{(k * 37) % 100}\t{(k * 53) % 97}\t{'ab'[k % 2]}\t{k % 7}")
    f.write_text("\n".join(rows) + "\n")
    out = tmp_path / "run"
    code = main(["analyze", str(f), "--out", str(out), "--tab", "--x-col", "lon", "--y-col", "lat",
                 "--type-col", "species", "--mark-col", "dbh", "--window", "0", "100", "0", "100",
                 "--thresholds", "0.5", "--p-max", "8", "--q-max", "8"])
    assert code == 0
    assert (out / "msdgm_alpha_0.5.dot").exists()


def test_spectra_dump(tmp_path, pattern_file):
    raw = tmp_path / "raw.csv"
    assert main(["spectra", "dump", str(pattern_file), "--out", str(raw), "--p-max", "2", "--q-max", "2"]) == 0
    lines = raw.read_text().splitlines()
    assert lines[0] == "p,q,i,j,real,imag"
    assert len(lines) - 1 == 3 * 4 * 16
    part = tmp_path / "partial.csv"
    assert main(["spectra", "dump", str(pattern_file), "--partial", "--out", str(part)]) == 0
    lines = part.read_text().splitlines()
    assert lines[0] == "p,q,i,j,abs_d"
    assert len(lines) - 1 == 543 * 6
    assert all(0 <= float(r.split(",")[4]) <= 1 + 1e-6 for r in lines[1:])


def test_recovery_study(tmp_path, spec_file, capsys):
    log = tmp_path / "log.csv"
    assert main(["recovery-study", str(spec_file), "--replicates", "4", "--log", str(log)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "alpha,replicates,tp_rate,fp_rate,mean_fp_edges"
    assert out[1].startswith("0.3,4,1.0,")
    rows = log.read_text().splitlines()[1:]
    assert len(rows) == 4 * 3
    assert sum(r.split(",")[2] == "0.6" for r in rows) == 4


def test_recovery_study_perfect_coupling(tmp_path, capsys):
    spec = tmp_path / "s.json"
    spec.write_text('{"d": 3, "n": 200, "seed": 100, "couplings": [{"a": 1, "b": 2, "rho": 1.0, "sigma": 0.0}]}')
    assert main(["recovery-study", str(spec), "--replicates", "5"]) == 0
    line = [r for r in capsys.readouterr().out.splitlines() if r.startswith("0.3,")][0]
    assert line.split(",")[2] == "1.0"


def test_recovery_study_null_design(tmp_path, capsys):
    spec = tmp_path / "s.json"
    spec.write_text('{"d": 3, "n": 100, "seed": 1, "couplings": [{"a": 0, "b": 1, "rho": 0.0, "sigma": 0.1}]}')
    assert main(["recovery-study", str(spec), "--replicates", "2"]) == 0
    line = capsys.readouterr().out.splitlines()[1]
    assert line.split(",")[2] == "nan"
