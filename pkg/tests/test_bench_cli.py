import csv
import io

import pytest

from jsp_tabu.bench_cli import (
    CSV_HEADER,
    MissingBound,
    RunRecord,
    compute_mre,
    main,
    read_instance_list,
    relative_error,
    summarize,
)
from jsp_tabu.instance_io import KnownBounds, builtin_example, to_orlib, to_taillard


def rec(name, best, seed=0):
    return RunRecord(name, "n8", seed, best, 1.0, 10, None)


def test_relative_error_example():
    assert relative_error(1153, 1152) == pytest.approx(0.0868, abs=1e-4)


def test_compute_mre():
    b = KnownBounds({"la29": (1152, 1152), "a": (100, 100), "b": (100, 100)})
    assert compute_mre([rec("la29", 1153)], b) == pytest.approx(0.0868, abs=1e-4)
    assert compute_mre([rec("a", 100), rec("b", 100)], b) == 0.0
    assert compute_mre([rec("a", 101), rec("b", 102)], b) == pytest.approx(1.5)
    runs = [rec("a", 100), rec("a", 104)]
    assert compute_mre(runs, b, "best") == 0.0
    assert compute_mre(runs, b, "mean") == pytest.approx(2.0)
    with pytest.raises(ValueError):
        compute_mre([], b)
    with pytest.raises(MissingBound):
        compute_mre([rec("zz", 5)], b)


def test_summary_columns():
    b = KnownBounds({"a": (100, 100)})
    s = summarize([rec("a", 104, 0), rec("a", 100, 1), rec("a", 102, 2)], b)
    assert (s.best, s.m_av, s.t_av, s.b_re, s.av_re) == (100, 102.0, 1.0, 0.0, pytest.approx(2.0))


def test_read_instance_list(tmp_path):
    p = tmp_path / "l.txt"
    p.write_text("# comment\nla01 LA01-05\nla02\n\n")
    assert read_instance_list(str(p)) == [("la01", "LA01-05"), ("la02", "all")]


def _csv(capsys, argv):
    assert main(argv) == 0
    return capsys.readouterr().out


def test_run_csv_schema_and_determinism(capsys):
    argv = ["run", "--instance", "la01", "--runs", "3", "--seed", "5", "--max-iters", "200", "--timing", "off"]
    a = _csv(capsys, argv)
    b = _csv(capsys, argv)
    assert a == b
    rows = list(csv.reader(io.StringIO(a)))
    assert rows[0] == CSV_HEADER
    assert [r[2] for r in rows[1:]] == ["5", "6", "7"]
    assert all(r[4] == "NA" for r in rows[1:])


def test_run_zero_iterations_reports_initial(capsys):
    out = _csv(capsys, ["run", "--instance", "ft10", "--runs", "1", "--max-iters", "0"])
    row = list(csv.reader(io.StringIO(out)))[1]
    assert row[5] == "0"
    assert float(row[6]) == pytest.approx(100 * (int(row[3]) - 930) / 930, abs=1e-4)


def test_run_file_formats_and_markdown(tmp_path, capsys):
    inst = builtin_example()
    p = tmp_path / "ex.txt"
    p.write_text(to_orlib(inst))
    q = tmp_path / "ex_t.txt"
    q.write_text(to_taillard(inst))
    bounds = tmp_path / "b.txt"
    bounds.write_text("ex 10 10\nex_t 10 10\n")
    out = _csv(capsys, ["run", "--instance", str(p), "--runs", "2", "--bounds", str(bounds), "--emit", "md"])
    assert "| ex | n8 | 10 | 10 |" in out
    out = _csv(capsys, ["run", "--instance", str(q), "--format", "taillard", "--runs", "1",
                        "--bounds", str(bounds), "--timing", "off"])
    row = out.splitlines()[1].split(",")
    assert row[:5] == ["ex_t", "n8", "0", "10", "NA"] and row[6] == "0.0000"


def test_run_writes_out_and_gantt(tmp_path, capsys):
    out = tmp_path / "r.csv"
    g = tmp_path / "g.csv"
    assert main(["run", "--instance", "ft06", "--runs", "2", "--max-iters", "300", "--out", str(out),
                 "--gantt", str(g)]) == 0
    assert out.read_text().startswith(",".join(CSV_HEADER))
    assert g.read_text().startswith("machine,operation,start,end,critical")


def test_compare_table(tmp_path, capsys):
    lst = tmp_path / "list.txt"
    lst.write_text("ft06 FT\nla01 LA\n")
    recs = tmp_path / "recs.csv"
    out = _csv(capsys, ["compare", "--instances", str(lst), "--neighborhoods", "n5,n6,n7,n8", "--runs", "2",
                        "--max-iters", "100", "--emit", "md", "--timing", "off", "--records", str(recs)])
    assert out.count("| ft06 |") == 4 and out.count("| la01 |") == 4
    assert "n8 b-MRE" in out and "| FT |" in out and "| LA |" in out
    assert len(recs.read_text().splitlines()) == 1 + 2 * 4 * 2
    again = _csv(capsys, ["compare", "--instance", "ft06", "--neighborhoods", "n5,n8", "--runs", "1",
                          "--max-iters", "50", "--timing", "off"])
    assert again.splitlines()[0] == "instance,neighborhood,lb,best,m_av,t_av_s,b_re,av_re"
    assert len(again.splitlines()) == 3


def test_oracle_command(tmp_path, capsys):
    p = tmp_path / "ex.txt"
    p.write_text(to_orlib(builtin_example()))
    assert main(["oracle", "--instance", str(p)]) == 0
    assert "optimum 10" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--instance", "does-not-exist"],
        ["run", "--instance", "la01", "--neighborhood", "n9"],
        ["run", "--instance", "la01", "--bogus"],
        ["run", "--instance", "la01", "--runs", "0"],
        ["oracle", "--instance", "ft10"],
        ["compare", "--neighborhoods", "n5"],
    ],
)
def test_input_errors_exit_2(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse rejects unknown flags itself
        code = exc.code
    assert code == 2


def test_malformed_instance_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("2 2\n0 1 1\n")
    assert main(["run", "--instance", str(p)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_missing_bound_gives_na(tmp_path, capsys):
    bounds = tmp_path / "b.txt"
    bounds.write_text("other 1 1\n")
    out = _csv(capsys, ["run", "--instance", "ft06", "--runs", "1", "--max-iters", "20", "--bounds", str(bounds)])
    assert out.splitlines()[1].endswith(",NA")
