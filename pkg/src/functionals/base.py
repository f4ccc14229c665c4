# --------------------------------------------------
# src/functionals/base.py
# --------------------------------------------------
# Contrato comum a todos os funcionais métricos sobre L_p([0,1])
#
# Quatro formas concretas herdam daqui
# - InternalFunctional  h_g(f) = ‖f−g‖_p − ‖g‖_p
# - L1Form              E[∫ η(f) dξ]            (p = 1)
# - LpFinite            ramo finito em L_p, p > 1
# - LpLinear            f ↦ −E[fζ],  ‖ζ‖_q <= 1
#
# Igualdade entre funcionais é sempre extensional (conjunto de teste), nunca estrutural
# --------------------------------------------------

from abc import ABC, abstractmethod
from typing import Any, ClassVar, Dict

from src.space.interval_space import StepFunction


class MetricFunctional(ABC):
    """
    Interface base de um funcional métrico avaliável
    Todo funcional é 1-Lipschitz e vale 0 em f = 0
    """

    variant: ClassVar[str]

    @property
    @abstractmethod
    def p(self) -> float:
        """Expoente do espaço L_p onde o funcional vive."""
        raise NotImplementedError

    @abstractmethod
    def evaluate(self, f: StepFunction) -> float:
        raise NotImplementedError

    @abstractmethod
    def parameters(self) -> Dict[str, Any]:
        """Parâmetros escalares para impressão (CLI, relatórios)."""
        raise NotImplementedError

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError

    def __call__(self, f: StepFunction) -> float:
        return self.evaluate(f)

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v!r}" for k, v in self.parameters().items())
        return f"{type(self).__name__}({params})"
