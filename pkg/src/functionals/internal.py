from typing import Any, Dict

from src.functionals.base import MetricFunctional
from src.space.interval_space import StepFunction, check_exponent, lp_norm


def eval_internal(g: StepFunction, p: float, f: StepFunction) -> float:
    """h_g(f) = ‖f − g‖_p − ‖g‖_p."""
    p = check_exponent(p)
    return lp_norm(f - g, p) - lp_norm(g, p)


class InternalFunctional(MetricFunctional):
    """Funcional interno h_g, vindo de um ponto g do próprio espaço."""

    variant = "internal"

    def __init__(self, g: StepFunction, p: float = 1.0):
        self.g = g
        self._p = check_exponent(p)

    @property
    def p(self) -> float:
        return self._p

    def evaluate(self, f: StepFunction) -> float:
        return eval_internal(self.g, self._p, f)

    def parameters(self) -> Dict[str, Any]:
        return {"p": self._p, "cells": self.g.cell_count, "norm_g": lp_norm(self.g, self._p)}

    def to_dict(self) -> Dict[str, Any]:
        return {"variant": self.variant, "g": self.g.to_dict(), "p": self._p}
