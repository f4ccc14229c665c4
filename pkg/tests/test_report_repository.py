import pytest

from src.errors import ReportIOError
from src.experiments.reports import REPORT_SCHEMA, ConvergenceReport, ConvergenceRow, monotone_nonincreasing
from src.repositories.report_repository import ReportRepository


def _body(**extra):
    return {"schema": REPORT_SCHEMA, "experiment": "unit", "result": {"b": 1, "a": [0.1, 2.5]}, **extra}


def test_save_and_load_round_trip(tmp_path):
    repo = ReportRepository(tmp_path)
    written = repo.save("nested/run", _body(), "n,err\n1,0.5\n")
    assert [p.name for p in written] == ["run.json", "run.csv"]
    assert repo.load("nested/run") == _body()
    assert (tmp_path / "nested" / "run.csv").read_text() == "n,err\n1,0.5\n"


def test_saved_json_is_canonical(tmp_path):
    repo = ReportRepository(tmp_path)
    repo.save("a", _body(), fmt="json")
    text = (tmp_path / "a.json").read_text()
    # chaves ordenadas, indentação fixa
    assert text.index('"experiment"') < text.index('"result"') < text.index('"schema"')
    repo.save("b", dict(reversed(list(_body().items()))), fmt="json")
    assert (tmp_path / "b.json").read_text() == text


def test_format_selection(tmp_path):
    repo = ReportRepository(tmp_path)
    assert [p.name for p in repo.save("only_csv", _body(), "x\n", fmt="csv")] == ["only_csv.csv"]
    assert [p.name for p in repo.save("no_csv_text", _body(), None, fmt="both")] == ["no_csv_text.json"]


def test_load_rejects_missing_file_and_wrong_schema(tmp_path):
    repo = ReportRepository(tmp_path)
    with pytest.raises(ReportIOError):
        repo.load("missing")
    repo.save("old", {**_body(), "schema": "horolab-report-v0"}, fmt="json")
    with pytest.raises(ReportIOError):
        repo.load("old.json")


def test_save_into_unwritable_location_raises(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ReportIOError):
        ReportRepository(tmp_path).save("file/report", _body())


# --------------------------------------------------
# Relatórios de convergência
# --------------------------------------------------
def test_convergence_report_sorts_rows_and_writes_csv():
    rows = [
        ConvergenceRow(experiment="x", n=4, test_id="one", h_n=0.5, h_limit=1.0, abs_err=0.5),
        ConvergenceRow(experiment="x", n=2, test_id="zero", h_n=0.0, h_limit=0.0, abs_err=0.0),
        ConvergenceRow(experiment="x", n=2, test_id="one", h_n=0.0, h_limit=1.0, abs_err=1.0),
    ]
    report = ConvergenceReport(experiment="x", rows=rows)
    assert [(r.n, r.test_id) for r in report.rows] == [(2, "one"), (2, "zero"), (4, "one")]
    assert report.max_error() == 1.0
    assert report.max_error("one", n_min=4) == 0.5
    assert report.errors_for("one") == [1.0, 0.5]
    assert report.model_dump(by_alias=True)["schema"] == REPORT_SCHEMA
    assert report.to_csv().splitlines()[1] == "x,2,one,0.0,1.0,1.0"


def test_monotone_nonincreasing_with_scaled_slack():
    assert monotone_nonincreasing([1.0, 0.5, 0.5])
    assert not monotone_nonincreasing([1.0, 0.5, 0.6])
    assert monotone_nonincreasing([1e-3, 1e-3 + 1e-10], scales=[1.0, 1e3])
