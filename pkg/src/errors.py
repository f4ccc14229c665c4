# --------------------------------------------------
# src/errors.py
# --------------------------------------------------
# Hierarquia de erros do horolab
#
# Cada classe carrega
# - exit_code: código de saída usado pela CLI
# - invariant: nome do invariante violado, impresso no registro de falha
# --------------------------------------------------

from typing import Any, Dict


class HorolabError(Exception):
    exit_code: int = 5
    invariant: str = "unspecified"

    def __init__(self, detail: str, *, invariant: str | None = None):
        super().__init__(detail)
        self.detail = detail
        if invariant is not None:
            self.invariant = invariant

    def to_record(self) -> Dict[str, Any]:
        """Registro legível por máquina (stderr da CLI)."""
        return {
            "error": type(self).__name__,
            "invariant": self.invariant,
            "detail": self.detail,
            "exit_code": self.exit_code,
        }


class InvalidExponentError(HorolabError):
    invariant = "exponent p >= 1"


class StepFunctionError(HorolabError):
    invariant = "step function breakpoints/values"


class ResolutionError(HorolabError):
    exit_code = 3
    invariant = "resolution budget"


class BudgetError(HorolabError):
    exit_code = 3
    invariant = "candidate budget"


class EvaluationError(HorolabError):
    invariant = "finite integrand"


class ContractError(HorolabError):
    invariant = "contract"


class ConstraintViolationError(HorolabError):
    invariant = "c^p >= E[int |r|^p dxi]"


class NotOnRError(HorolabError):
    invariant = "random measure on R"


class UnsupportedWeightsError(HorolabError):
    invariant = "rational mixture weights"


class DomainError(HorolabError):
    invariant = "point in K"


class UnsupportedBranchError(HorolabError):
    invariant = "1 < p < inf"


class UnknownExperimentError(HorolabError):
    exit_code = 2
    invariant = "known experiment"


class ReportIOError(HorolabError):
    exit_code = 4
    invariant = "report written"
