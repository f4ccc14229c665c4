# --------------------------------------------------
# src/experiments/reports.py
# --------------------------------------------------
# Estrutura dos relatórios de convergência
# - Linhas (experiment, n, test_id, h_n, h_limit, abs_err), ordenadas por (n, test_id)
# - Resumo de monotonicidade do erro por função de teste
# - Espelho CSV com o mesmo esquema versionado
# --------------------------------------------------

import csv
import io
from typing import Any, Dict, Iterable, List, Optional, Sequence

from pydantic import BaseModel, Field, model_validator

REPORT_SCHEMA = "horolab-report-v1"
CSV_COLUMNS = ("experiment", "n", "test_id", "h_n", "h_limit", "abs_err")


class ConvergenceRow(BaseModel):
    experiment: str
    n: int
    test_id: str
    h_n: float
    h_limit: float
    abs_err: float = Field(ge=0)


class WitnessRow(BaseModel):
    """h_n(f) + E[fζ] = first_order − tail."""

    n: int
    test_id: str
    # h_n(f) + E[fζ_n], >= 0 por convexidade da norma
    first_order: float
    # E[f(ζ_n − ζ)]
    tail: float


class ConvergenceReport(BaseModel):
    schema_: str = Field(default=REPORT_SCHEMA, alias="schema")
    experiment: str
    rows: List[ConvergenceRow]
    # test_id → erro não-crescente ao longo de n (folga 1e-12)
    monotone: Dict[str, bool] = Field(default_factory=dict)

    model_config = {"populate_by_name": True}

    @model_validator(mode="after")
    def _sorted(self):
        self.rows.sort(key=lambda r: (r.n, r.test_id))
        return self

    def max_error(self, test_id: str | None = None, n_min: int = 0) -> float:
        errs = [r.abs_err for r in self.rows if r.n >= n_min and (test_id is None or r.test_id == test_id)]
        return max(errs, default=0.0)

    def errors_for(self, test_id: str) -> List[float]:
        return [r.abs_err for r in self.rows if r.test_id == test_id]

    def csv_rows(self) -> List[List[Any]]:
        return [[r.experiment, r.n, r.test_id, repr(r.h_n), repr(r.h_limit), repr(r.abs_err)] for r in self.rows]

    def to_csv(self) -> str:
        return csv_text(CSV_COLUMNS, self.csv_rows())


def csv_text(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Cabeçalho + linhas via csv.writer."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def monotone_nonincreasing(
    errors: List[float], slack: float = 1e-12, scales: Optional[Sequence[float]] = None
) -> bool:
    """errors[k+1] <= errors[k] + slack·scales[k+1]; scales acompanha a magnitude de ‖g_n‖."""
    scales = scales or [1.0] * len(errors)
    return all(b <= a + slack * s for a, b, s in zip(errors, errors[1:], scales[1:]))
