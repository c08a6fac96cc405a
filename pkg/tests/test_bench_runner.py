import csv
import io

import openpyxl
import pytest

from casp_forge.bench_report import TIMEOUT_MARK, pivot, write_pdf_report, write_workbook
from casp_forge.bench_runner import CSV_HEADER, BenchRecord, format_params, parse_params, run_bench, write_csv
from casp_forge.cdnl_solver import SolverConfig


@pytest.fixture
def records():
    return [
        BenchRecord("pigeonhole", "n=5", "S", "", "unsat", 0.5, 10, 9, 100, 0),
        BenchRecord("pigeonhole", "n=5", "B", 4, "unsat", 0.01, 0, 1, 20, 0),
        BenchRecord("pigeonhole", "n=6", "S", "", "unknown", 60.0, 10, 9, 100, 0),
        BenchRecord("qcp", "n=5;ratio=30", "S", "", "sat", 0.2, 5, 2, 50, 1),
    ]


def test_params_text():
    assert format_params({"ratio": 30, "n": 5}) == "n=5;ratio=30"
    assert parse_params("n=5;ratio=30") == {"n": 5, "ratio": 30}


def test_pigeonhole_rows():
    rows = run_bench("pigeonhole", [{"n": 5}], ["S", "B", "R"])
    assert [row.encoding for row in rows] == ["S", "B", "R"]
    assert all(row.status == "unsat" for row in rows)
    assert [row.k for row in rows] == ["", 4, 4]
    assert all(row.note == "" for row in rows)


def test_qcp_single_row():
    rows = run_bench("qcp", [{"n": 5, "ratio": 30}], ["S"], SolverConfig(seed=1))
    assert len(rows) == 1
    assert rows[0].params == "n=5;ratio=30"
    assert rows[0].seed == 1
    assert rows[0].status in ("sat", "unsat")
    assert rows[0].note == ""


def test_generator_errors_become_rows():
    rows = run_bench("pigeonhole", [{"n": 1}], ["S"])
    assert rows[0].status == "unknown"
    assert "invalid generator argument" in rows[0].note


def test_conflict_budget_gives_unknown():
    rows = run_bench("pigeonhole", [{"n": 8}], ["S"], SolverConfig(max_conflicts=3))
    assert rows[0].status == "unknown"
    assert rows[0].conflicts == 3


def test_workers_keep_parameter_order():
    params = [{"n": 4}, {"n": 3}, {"n": 5}]
    serial = run_bench("pigeonhole", params, ["S", "R"])
    parallel = run_bench("pigeonhole", params, ["S", "R"], workers=2)
    assert [(row.params, row.encoding, row.status) for row in parallel] == [(row.params, row.encoding, row.status) for row in serial]


def test_csv(records):
    stream = io.StringIO()
    write_csv(records, stream)
    lines = stream.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_HEADER) + ",note"
    assert lines[0].startswith("family,params,encoding,k,status,time_s,decisions,conflicts,propagations,seed")
    parsed = list(csv.DictReader(io.StringIO(stream.getvalue())))
    assert len(parsed) == 4
    assert parsed[3]["params"] == "n=5;ratio=30"
    assert parsed[1]["k"] == "4"


def test_record_validation():
    with pytest.raises(ValueError):
        BenchRecord("qcp", "n=1", "S", "", "solved", 0.1, 0, 0, 0, 0)
    with pytest.raises(ValueError):
        BenchRecord("qcp", "n=1", "S", "", "sat", -1.0, 0, 0, 0, 0)


def test_pivot(records):
    table = pivot([r for r in records if r.family == "pigeonhole"])
    assert table[0] == ["params", "S", "B"]
    assert table[1] == ["n=5", "0.50", "0.01"]
    assert table[2] == ["n=6", TIMEOUT_MARK, ""]


def test_workbook(records, tmp_path):
    path = tmp_path / "bench.xlsx"
    write_workbook(records, str(path))
    wb = openpyxl.load_workbook(path)
    assert wb.sheetnames == ["pigeonhole", "qcp"]
    ws = wb["pigeonhole"]
    assert [cell.value for cell in ws[1]] == [*CSV_HEADER, "note"]
    assert ws.max_row == 4


def test_pdf_report(records, tmp_path):
    path = tmp_path / "bench.pdf"
    write_pdf_report(records, str(path), "pigeonhole benchmark")
    assert path.read_bytes().startswith(b"%PDF")


def test_empty_reports(tmp_path):
    write_workbook([], str(tmp_path / "empty.xlsx"))
    write_pdf_report([], str(tmp_path / "empty.pdf"))
    assert openpyxl.load_workbook(tmp_path / "empty.xlsx").sheetnames == ["empty"]
    assert (tmp_path / "empty.pdf").exists()


@pytest.mark.slow
def test_pigeonhole_ten():
    rows = run_bench("pigeonhole", [{"n": 10}], ["S", "B", "R"])
    assert [row.status for row in rows] == ["unsat"] * 3


@pytest.mark.slow
def test_graceful_four_row():
    rows = run_bench("graceful", [{"n": 4}], ["S"], SolverConfig(time_budget_s=60))
    assert rows[0].status == "sat"
    assert rows[0].note == ""
