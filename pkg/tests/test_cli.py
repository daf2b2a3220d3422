import math
import subprocess
import sys

import pytest

from gamma_median import cli
from gamma_median.bounds import A_HIGH_K, A_LOW_K
from gamma_median.cli import OutputTable, figure_table, main, read_csv, table1, table2
from gamma_median.search import SearchError
from gamma_median.special import LN2


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_by(table, column):
    i = table.header.index(column)
    return {r[i]: dict(zip(table.header, r)) for r in table.rows}


def test_median_k1(capsys):
    code, out, _ = run(capsys, "median", "--k", "1")
    assert code == 0
    (row,) = read_csv(out).rows
    t = read_csv(out)
    rec = dict(zip(t.header, row))
    assert rec["natural_median"] == pytest.approx(LN2, abs=1e-13)
    assert "0.693147180559" in out


def test_median_tiny_k_uses_log_column(capsys):
    code, out, _ = run(capsys, "median", "--k", "1e-3")
    rec = dict(zip(*(lambda t: (t.header, t.rows[0]))(read_csv(out))))
    assert rec["natural_median"] is None
    assert rec["log_natural_median"] == pytest.approx(-693.7, abs=0.1)
    assert 0.3608 < rec["scaled_median"] < 0.5625


def test_median_k10(capsys):
    _, out, _ = run(capsys, "median", "--k", "10")
    t = read_csv(out)
    assert dict(zip(t.header, t.rows[0]))["natural_median"] == pytest.approx(9.66871, abs=1e-5)


def test_median_range(capsys):
    code, out, _ = run(capsys, "median", "--k-min", "0.1", "--k-max", "10", "--per-decade", "5")
    assert code == 0
    t = read_csv(out)
    assert len(t.rows) == 11
    assert all(r[-1] <= 1e-13 for r in t.rows)


@pytest.mark.parametrize("argv", [
    ["median"],
    ["median", "--k", "-1"],
    ["median", "--k", "nan"],
    ["median", "--k", "1", "--k-min", "0.1", "--k-max", "2"],
    ["median", "--k-min", "2", "--k-max", "1"],
    ["figure", "--fig", "9", "--out", "x.csv"],
    ["verify", "--claims", "no-such-claim"],
    ["search", "--target", "bogus"],
])
def test_argument_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_out_of_domain_k_exits_2(capsys):
    code, _, err = run(capsys, "median", "--k", "1e7")
    assert code == 2
    assert "error" in err


def test_numeric_failure_exits_3(capsys, monkeypatch):
    def boom(*a, **kw):
        raise SearchError("no convergence")

    monkeypatch.setattr(cli, "run_search", boom)
    code, _, err = run(capsys, "search", "--target", "L0")
    assert code == 3
    assert "no convergence" in err


def test_unwritable_output_exits_4(capsys, tmp_path):
    target = tmp_path / "missing-dir" / "fig.csv"
    code, _, err = run(capsys, "figure", "--fig", "6", "--out", str(target), "--per-decade", "2")
    assert code == 4
    assert not target.exists()


def test_table1_rows():
    rows = rows_by(table1(), "name")
    assert rows["nuU"]["A"] == pytest.approx(0.5614594836, abs=1e-10)
    assert rows["nuU"]["B"] == 1.0
    assert rows["nuU"]["side"] == "U"
    assert rows["nu1"]["side"] == "--"
    assert {"berg_upper", "gamma_power", "nuL0", "nuL1", "nuLinf"} <= set(rows)


def test_table2_rows():
    t = table2()
    vals = {(r[0], r[1]): r[3] for r in t.rows}
    assert vals[("arctan", "low_k")] == pytest.approx(0.238512, abs=1e-6)
    assert vals[("arctan", "tangent_lower")] == pytest.approx(0.205282, abs=1e-5)
    assert vals[("arctan", "minimax_relative")] == pytest.approx(0.21639, abs=2e-4)
    assert vals[("arctan", "minimax_absolute")] == pytest.approx(0.21008, abs=2e-4)
    assert len(t.rows) == 9


def test_table_command(capsys):
    code, out, _ = run(capsys, "table", "--which", "table2")
    assert code == 0
    assert out.startswith("#")
    assert "tangent_lower" in out


def test_search_command(capsys):
    code, out, _ = run(capsys, "search", "--target", "arctan-lower")
    assert code == 0
    rec = dict(zip(*(lambda t: (t.header, t.rows[0]))(read_csv(out))))
    assert rec["parameter"] == pytest.approx(0.205282, abs=1e-5)
    assert rec["abscissa"] == pytest.approx(0.4184, abs=1e-2)


def test_search_minimax_abs_reports_both_scales(capsys):
    _, out, _ = run(capsys, "search", "--target", "minimax-abs", "--per-decade", "50")
    t = read_csv(out)
    targets = [r[0] for r in t.rows]
    assert targets == ["minimax-abs", "minimax-abs-natural"]


def test_verify_command(capsys):
    code, out, _ = run(capsys, "verify", "--claims", "nuU-percentile-band,arctan-exact1-band,nu1-not-a-bound")
    assert code == 0
    t = read_csv(out)
    assert [r[-1] for r in t.rows] == ["PASS"] * 3


def test_verify_failure_exits_1(capsys, monkeypatch):
    from gamma_median.claims import ClaimResult

    monkeypatch.setattr(cli, "run_claims", lambda ids, cfg: [ClaimResult("x", "d", "1", "0", False)])
    code, out, _ = run(capsys, "verify")
    assert code == 1
    assert "FAIL" in out


def test_fig5_bands():
    t = figure_table(5, per_decade=20)
    col = {h: i for i, h in enumerate(t.header)}
    for name in ("nuLinf", "nuU", "rational1_upper", "rational1_lower"):
        assert all(48 < r[col[name]] < 55 for r in t.rows)
    # the low-k and k = 1 tangent bounds are only good in their own regime
    assert min(r[col["nuL0"]] for r in t.rows) < 48
    assert max(r[col["nuL0"]] for r in t.rows if r[0] < 0.2) > 49.9
    assert len(t.header) == 11


def test_fig6_endpoints():
    t = figure_table(6, per_decade=20)
    i = t.header.index("A_of_k")
    assert t.rows[0][i] == pytest.approx(A_LOW_K, abs=1e-3)
    assert t.rows[-1][i] == pytest.approx(A_HIGH_K, abs=1e-4)
    assert any("0.56145948" in m for m in t.metadata)


def test_fig7_arctan_margins_smaller():
    t = figure_table(7, per_decade=20)
    col = {h: i for i, h in enumerate(t.header)}
    for side in ("upper", "lower"):
        arc = max(abs(r[col[f"arctan_{side}_median_margin"]]) for r in t.rows)
        rat = max(abs(r[col[f"rational_{side}_median_margin"]]) for r in t.rows)
        assert arc < rat


@pytest.mark.parametrize("fig", range(1, 9))
def test_every_figure_writes(capsys, tmp_path, fig):
    out = tmp_path / f"fig{fig}.csv"
    assert main(["figure", "--fig", str(fig), "--out", str(out), "--per-decade", "5"]) == 0
    t = read_csv(out.read_text())
    assert t.rows and all(len(r) == len(t.header) for r in t.rows)


@pytest.mark.parametrize("fig", [1, 5, 8])
def test_csv_round_trip_byte_identical(fig):
    text = figure_table(fig, per_decade=5).to_csv()
    again = read_csv(text)
    assert again.to_csv() == text


def test_output_is_deterministic():
    assert figure_table(4, per_decade=5).to_csv() == figure_table(4, per_decade=5).to_csv()


def test_output_table_arity_and_format():
    t = OutputTable(["a", "b"])
    with pytest.raises(ValueError):
        t.add(1.0)
    t.add(0.1, None)
    assert t.to_csv().splitlines()[1] == "0.10000000000000001,"
    assert read_csv(t.to_csv()).rows[0] == (0.1, None)


def test_float_cells_round_trip_exactly():
    t = OutputTable(["x"])
    for x in (math.pi, 1e-300, -2.5e-17, 1 / 3):
        t.add(x)
    assert [r[0] for r in read_csv(t.to_csv()).rows] == [math.pi, 1e-300, -2.5e-17, 1 / 3]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gamma_median", "median", "--k", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0].startswith("k,scaled_median")
