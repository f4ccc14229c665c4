# --------------------------------------------------
# src/functionals/l1_form.py
# --------------------------------------------------
# Forma de representação dos funcionais métricos em L_1
#
#   h(f) = E[ ∫ η(f(ω)) dξ_ω(η) ]
#
# com ξ campo de medidas de probabilidade sobre R̄^h
# --------------------------------------------------

from typing import Any, Dict

from src.errors import ContractError
from src.functionals.base import MetricFunctional
from src.space.interval_space import IntervalSet, StepFunction, expectation
from src.space.rbar_measures import (
    MINUS_INFINITY,
    PLUS_INFINITY,
    AtomicMeasure,
    CellContext,
    Eta,
    RandomMeasureField,
    constant_field,
    dirac_field,
    eta_eval,
    mass_at_infinity,
    pairing,
    splice,
)


def _require_probability(xi: RandomMeasureField) -> None:
    for i, mu in enumerate(xi.measures):
        if not mu.is_probability:
            raise ContractError(
                f"cell {i} has total mass {mu.total_mass!r}",
                invariant="random measure is probability on every cell",
            )


def eval_l1(xi: RandomMeasureField, f: StepFunction) -> float:
    """E[∫ η(f(ω)) dξ_ω(η)], somado exatamente célula a célula."""
    _require_probability(xi)

    def psi(ctx: CellContext, eta: Eta) -> float:
        return eta_eval(eta, ctx.values[0])

    return pairing(xi, psi, coupled=(f,))


class L1Form(MetricFunctional):
    variant = "l1"

    def __init__(self, xi: RandomMeasureField):
        _require_probability(xi)
        self.xi = xi

    @property
    def p(self) -> float:
        return 1.0

    def evaluate(self, f: StepFunction) -> float:
        return eval_l1(self.xi, f)

    def parameters(self) -> Dict[str, Any]:
        return {
            "p": 1.0,
            "cells": len(self.xi.measures),
            "mass_at_infinity": mass_at_infinity(self.xi),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {"variant": self.variant, "xi": self.xi.to_dict()}


# --------------------------------------------------
# Campo de dois conjuntos: fuga para +∞ em A, para −∞ em B, interno no resto
# --------------------------------------------------
def two_set_field(a: IntervalSet, b: IntervalSet, g: StepFunction) -> RandomMeasureField:
    """ξ = 1_A δ_{η_{+∞}} + 1_B δ_{η_{−∞}} + 1_{resto} δ_{η_g}  (A, B disjuntos)."""
    overlap = a.indicator() * b.indicator()
    if overlap.values.max() != 0.0:
        raise ContractError("sets A and B must be disjoint", invariant="disjoint sets")
    rest = splice(b.indicator(), constant_field(AtomicMeasure.dirac(MINUS_INFINITY)), dirac_field(g))
    return splice(a.indicator(), constant_field(AtomicMeasure.dirac(PLUS_INFINITY)), rest)


def two_set_closed_form(a: IntervalSet, b: IntervalSet, g: StepFunction, f: StepFunction) -> float:
    """E[−1_A f] + E[1_B f] + E[1_resto (|f−g| − |g|)]."""
    one_a, one_b = a.indicator(), b.indicator()
    rest = 1.0 - one_a - one_b
    return (
        -expectation(one_a * f)
        + expectation(one_b * f)
        + expectation(rest * (abs(f - g) - abs(g)))
    )
