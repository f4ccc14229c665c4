# --------------------------------------------------
# src/functionals/lp_forms.py
# --------------------------------------------------
# Os dois ramos de funcionais métricos em L_p, 1 < p < ∞
#
# Ramo finito
#   h(f) = (E[∫|f−r|^p dξ] − E[∫|r|^p dξ] + c^p)^(1/p) − c
#   com ξ em R e c^p >= E[∫|r|^p dξ]
# Ramo linear
#   h(f) = −E[fζ],  ‖ζ‖_{p/(p−1)} <= 1
#
# Potências do ramo finito são tomadas na escala S = max(1, c, max|r|):
# (c/S)^p e E[∫|r/S|^p dξ] ficam em [0, 1] e não estouram
# --------------------------------------------------

import math
from dataclasses import dataclass
from typing import Any, Dict

from src.config import settings
from src.errors import ConstraintViolationError, ContractError, EvaluationError, NotOnRError
from src.functionals.base import MetricFunctional
from src.space.interval_space import (
    StepFunction,
    check_exponent,
    conjugate_exponent,
    expectation,
    lp_norm,
)
from src.space.rbar_measures import CellContext, Eta, RandomMeasureField, mass_at_infinity, pairing

_ZERO = StepFunction.constant(0.0)


def scaled_power(x: float, scale: float, p: float) -> float:
    """|x/scale|^p; devolve inf em vez de OverflowError."""
    try:
        return abs(x / scale) ** p
    except OverflowError:
        return math.inf


def shifted_moment(xi: RandomMeasureField, f: StepFunction, scale: float, p: float) -> float:
    """E[∫ |(f − r)/S|^p dξ]."""

    def psi(ctx: CellContext, eta: Eta) -> float:
        return scaled_power(ctx.values[0] - eta.r, scale, p)

    return pairing(xi, psi, coupled=(f,))


@dataclass(frozen=True)
class FiniteBranch:
    """Parâmetros validados do ramo finito, em unidades de `scale`."""

    c: float
    p: float
    scale: float
    moment: float
    cp: float
    slack: float

    @property
    def log_moment(self) -> float:
        """log E[∫|r|^p dξ] sem escala (−inf se o momento é zero)."""
        if self.moment == 0.0:
            return -math.inf
        return math.log(self.moment) + self.p * math.log(self.scale)


def _check_finite_branch(xi: RandomMeasureField, c: float, p: float) -> FiniteBranch:
    """Valida (ξ, c, p): ξ em R, c finito >= 0 e p·log c >= log E[∫|r|^p dξ]."""
    check_exponent(p, strict=True)
    mass = mass_at_infinity(xi)
    if mass > 0.0:
        raise NotOnRError(f"random measure charges infinity with mass {mass!r}")
    if not math.isfinite(c) or c < 0.0:
        raise ConstraintViolationError(f"c must be finite and >= 0, got {c!r}")
    radius = max((abs(e.r) for mu in xi.measures for e, w in mu.items() if w > 0.0), default=0.0)
    scale = max(1.0, c, radius)
    moment = shifted_moment(xi, _ZERO, scale, p)
    cp = scaled_power(c, scale, p)
    # tolerância CONTRACT_TOL·max(1, momento), expressa na escala S
    tol = settings.CONTRACT_TOL * max(scale**-p, moment)
    if cp < moment - tol:
        branch = FiniteBranch(c, p, scale, moment, cp, 0.0)
        log_c = p * math.log(c) if c > 0.0 else -math.inf
        raise ConstraintViolationError(
            f"p·log c={log_c!r} < log E[int |r|^p dxi]={branch.log_moment!r}"
        )
    slack = max(cp - moment, 0.0)
    # folga no nível do arredondamento de c^p vale zero
    if slack <= settings.CONTRACT_TOL * max(moment, cp):
        slack = 0.0
    return FiniteBranch(c, p, scale, moment, cp, slack)


def _finite_branch_value(branch: FiniteBranch, xi: RandomMeasureField, f: StepFunction) -> float:
    shifted = shifted_moment(xi, f, branch.scale, branch.p)
    if not math.isfinite(shifted):
        raise EvaluationError(f"E[int |f-r|^p dxi] overflows at scale {branch.scale!r}")
    delta = shifted - branch.moment
    if branch.cp > 0.0:
        ratio = delta / branch.cp
        # c·((1 + δ/c^p)^(1/p) − 1): exato em f = 0, estável longe de −1
        if math.isfinite(ratio) and ratio >= -0.5:
            return branch.c * math.expm1(math.log1p(ratio) / branch.p)
    return branch.scale * (shifted + branch.slack) ** (1.0 / branch.p) - branch.c


def eval_lp_finite(xi: RandomMeasureField, c: float, p: float, f: StepFunction) -> float:
    return _finite_branch_value(_check_finite_branch(xi, float(c), float(p)), xi, f)


def eval_lp_linear(zeta: StepFunction, p: float, f: StepFunction) -> float:
    _check_unit_ball(zeta, p)
    return -expectation(f * zeta)


def _check_unit_ball(zeta: StepFunction, p: float) -> float:
    q = conjugate_exponent(p)
    norm = lp_norm(zeta, q)
    if norm > 1.0 + settings.CONTRACT_TOL:
        raise ContractError(f"‖zeta‖_q={norm!r} > 1", invariant="zeta in unit ball of L_q")
    return norm


class LpFinite(MetricFunctional):
    variant = "lp_finite"

    def __init__(self, xi: RandomMeasureField, c: float, p: float):
        self.xi = xi
        self.c = float(c)
        self._p = float(p)
        # escala, momento e folga são fixados uma vez
        self.branch = _check_finite_branch(xi, self.c, self._p)

    @property
    def p(self) -> float:
        return self._p

    def evaluate(self, f: StepFunction) -> float:
        return _finite_branch_value(self.branch, self.xi, f)

    def parameters(self) -> Dict[str, Any]:
        return {
            "p": self._p,
            "c": self.c,
            "scale": self.branch.scale,
            "scaled_moment": self.branch.moment,
            "scaled_slack": self.branch.slack,
            "cells": len(self.xi.measures),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {"variant": self.variant, "xi": self.xi.to_dict(), "c": self.c, "p": self._p}


class LpLinear(MetricFunctional):
    variant = "lp_linear"

    def __init__(self, zeta: StepFunction, p: float):
        self.zeta = zeta
        self._p = check_exponent(p, strict=True)
        self.dual_norm = _check_unit_ball(zeta, self._p)

    @property
    def p(self) -> float:
        return self._p

    def evaluate(self, f: StepFunction) -> float:
        return -expectation(f * self.zeta)

    def parameters(self) -> Dict[str, Any]:
        return {"p": self._p, "dual_norm": self.dual_norm, "cells": self.zeta.cell_count}

    def to_dict(self) -> Dict[str, Any]:
        return {"variant": self.variant, "zeta": self.zeta.to_dict(), "p": self._p}
