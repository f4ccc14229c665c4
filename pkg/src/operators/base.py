# --------------------------------------------------
# src/operators/base.py
# --------------------------------------------------
# Contrato dos operadores lineares não-expansivos T em L_p
#
# Toda implementação (escala, Koopman, esperança condicional, combinação convexa)
# herda daqui e só precisa implementar `apply`
# O contrato é verificado numericamente sobre um conjunto fixo de sondas
# --------------------------------------------------

import logging
from abc import ABC, abstractmethod
from itertools import combinations
from typing import Dict, Tuple

from src.config import settings
from src.errors import ContractError
from src.space.interval_space import IntervalSet, StepFunction, dyadic_step, lp_norm, rademacher

log = logging.getLogger("horolab.operators")


class NonexpansiveOperator(ABC):
    """‖Tf‖_p <= ‖f‖_p e T linear."""

    @abstractmethod
    def apply(self, f: StepFunction) -> StepFunction:
        raise NotImplementedError

    @abstractmethod
    def describe(self) -> str:
        """Descrição curta, no mesmo formato aceito por parse_operator."""
        raise NotImplementedError

    def __call__(self, f: StepFunction) -> StepFunction:
        return self.apply(f)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.describe()})"


def standard_probes() -> Dict[str, StepFunction]:
    return {
        "one": StepFunction.constant(1.0),
        "r1": rademacher(1),
        "r2": rademacher(2),
        "two_half": IntervalSet.of((0.0, 0.5)).indicator(2.0),
        "sawtooth4": dyadic_step([(k + 0.5) / 16 for k in range(16)]),
        "thirds": StepFunction([0.0, 1 / 3, 2 / 3, 1.0], [-1.5, 0.25, 3.0]),
    }


def check_operator_contract(
    op: NonexpansiveOperator, p: float, probes: Dict[str, StepFunction] | None = None
) -> Tuple[float, float]:
    """
    Devolve (violação de norma, violação de linearidade) sobre as sondas
    Levanta ContractError se alguma passar de PROBE_TOL / CONTRACT_TOL
    """
    probes = probes or standard_probes()
    norm_gap = max(lp_norm(op(f), p) - lp_norm(f, p) for f in probes.values())
    lin_gap = 0.0
    for f, g in combinations(probes.values(), 2):
        lhs = op(0.7 * f - 1.3 * g)
        rhs = 0.7 * op(f) - 1.3 * op(g)
        lin_gap = max(lin_gap, lp_norm(lhs - rhs, 1.0))
    log.debug("contract op=%s p=%s norm_gap=%.3g lin_gap=%.3g", op.describe(), p, norm_gap, lin_gap)
    if norm_gap > settings.PROBE_TOL:
        raise ContractError(
            f"{op.describe()} expands a probe: ‖Tf‖ − ‖f‖ = {norm_gap!r}",
            invariant="nonexpansive on probes",
        )
    if lin_gap > settings.CONTRACT_TOL:
        raise ContractError(f"{op.describe()} is not linear on probes: gap {lin_gap!r}", invariant="linear on probes")
    return norm_gap, lin_gap
