# --------------------------------------------------
# src/experiments/spectral.py
# --------------------------------------------------
# Iteração afim não-expansiva F_g(f) = Tf + g em L_p
#
#   F_g^n(0) = Σ_{k<n} T^k g,   a_n = ‖F_g^n(0)‖_p   (subaditiva)
#   τ = lim a_n/n = inf a_n/n
#
# Para p > 1 e τ > 0: média ergódica v_n = F^n(0)/n → τ g*, e o funcional
# linear h(f) = −E[fζ] com ζ = sgn(g*)|g*|^{p−1} satisfaz −h(F^n(0))/n → τ
# --------------------------------------------------

import logging
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from src.config import settings
from src.errors import ContractError, UnsupportedBranchError
from src.experiments.limits_lab import doubling_schedule
from src.experiments.reports import csv_text
from src.operators.base import NonexpansiveOperator, check_operator_contract, standard_probes
from src.schemas import StepFunctionModel
from src.space.interval_space import StepFunction, check_exponent, expectation, lp_norm

log = logging.getLogger("horolab.spectral")


# --------------------------------------------------
# Órbita
# --------------------------------------------------
def orbit(T: NonexpansiveOperator, g: StepFunction, n_max: int) -> Iterator[Tuple[int, StepFunction, StepFunction]]:
    """Gera (n, T^{n−1} g, F^n(0)) para n = 1..n_max."""
    term = g
    partial = g
    for n in range(1, n_max + 1):
        if n > 1:
            term = T(term)
            partial = partial + term
        yield n, term, partial


def iterate_affine(T: NonexpansiveOperator, g: StepFunction, n: int, p: Optional[float] = None) -> StepFunction:
    """
    F_g^n(0) = Σ_{k=0}^{n−1} T^k g
    Com p informado, confere ‖T^k g‖_p não-crescente ao longo da órbita
    """
    if n < 0:
        raise ContractError(f"iteration count must be >= 0, got {n}", invariant="n >= 0")
    if n == 0:
        return StepFunction.constant(0.0)
    previous = None
    partial = g
    for _, term, partial in orbit(T, g, n):
        if p is not None:
            norm = lp_norm(term, p)
            if previous is not None and norm > previous + settings.PROBE_TOL:
                raise ContractError(
                    f"{T.describe()} expanded T^k g: {norm!r} > {previous!r}", invariant="nonexpansive orbit"
                )
            previous = norm
    return partial


# --------------------------------------------------
# Taxa de fuga
# --------------------------------------------------
class BoundRow(BaseModel):
    n: int
    norm: float = Field(ge=0)
    rate: float = Field(ge=0)


class RichardsonRow(BaseModel):
    n: int
    # a_{2n}/(2n) − a_n/n
    difference: float


class EscapeRate(BaseModel):
    estimate: float
    upper_bound: float
    # inclinações secantes de a_n nas duas últimas duplicações
    slope_last: float
    slope_previous: float
    is_zero: bool
    table: List[BoundRow]
    richardson: List[RichardsonRow]
    subadditivity_gap: float


def subadditivity_violation(norms: Sequence[float]) -> float:
    """max_{m+n<=N} a_{m+n} − a_m − a_n, com norms[k] = a_{k+1}."""
    a = np.concatenate(([0.0], np.asarray(norms, dtype=float)))
    size = a.size - 1
    if size < 2:
        return 0.0
    m = np.arange(1, size)[:, None]
    n = np.arange(1, size)[None, :]
    valid = m + n <= size
    total = np.where(valid, m + n, 0)
    gaps = np.where(valid, a[total] - a[m] - a[n], -np.inf)
    return float(gaps.max())


def secant_slopes(norms: Sequence[float]) -> Tuple[float, float]:
    """
    (a_N − a_{N/2})/(N − N/2) e o mesmo entre N/4 e N/2

    Para a_n = τn + O(1) as inclinações tendem a τ; para a_n = o(n) tendem a 0
    """
    n_max = len(norms)
    half, quarter = n_max // 2, n_max // 4
    last = (norms[n_max - 1] - norms[half - 1]) / (n_max - half)
    previous = (norms[half - 1] - norms[quarter - 1]) / (half - quarter)
    return float(last), float(previous)


def _classify_zero(upper_bound: float, last: float, previous: float) -> bool:
    if upper_bound < settings.ZERO_TAU_TOL or last < settings.ZERO_TAU_TOL:
        return True
    # inclinação ainda subindo: transiente sobre τ > 0
    if previous <= 0.0 or last >= previous:
        return False
    return last / previous <= settings.ZERO_TAU_RATIO


def escape_rate_from_norms(norms: Sequence[float]) -> EscapeRate:
    n_max = len(norms)
    rates = {n: float(a) / n for n, a in enumerate(norms, start=1)}
    table = [BoundRow(n=n, norm=float(norms[n - 1]), rate=rates[n]) for n in sorted(rates)]
    richardson = [
        RichardsonRow(n=n, difference=rates[2 * n] - rates[n]) for n in doubling_schedule(n_max // 2, start=0)
    ]
    gap = subadditivity_violation(norms)
    if gap > settings.PROBE_TOL:
        raise ContractError(f"escape sequence is not subadditive: gap {gap!r}", invariant="subadditivity")
    if n_max < 4:
        raise ContractError(f"need at least 4 norms, got {n_max}", invariant="n_max >= 4")
    upper_bound = min(rates.values())
    last, previous = secant_slopes(norms)
    return EscapeRate(
        estimate=rates[n_max],
        upper_bound=upper_bound,
        slope_last=last,
        slope_previous=previous,
        is_zero=_classify_zero(upper_bound, last, previous),
        table=table,
        richardson=richardson,
        subadditivity_gap=gap,
    )


def escape_rate(T: NonexpansiveOperator, g: StepFunction, p: float, n_max: int) -> EscapeRate:
    """
    Estimativa a_N/N e cota certificada min a_n/n, com a tabela completa de a_n/n
    """
    if n_max < 4:
        raise ContractError(f"n_max must be >= 4, got {n_max}", invariant="n_max >= 4")
    p = check_exponent(p)
    norms = [lp_norm(partial, p) for _, _, partial in orbit(T, g, n_max)]
    rate = escape_rate_from_norms(norms)
    log.info(
        "escape rate op=%s p=%s n_max=%d estimate=%.6g bound=%.6g zero=%s",
        T.describe(), p, n_max, rate.estimate, rate.upper_bound, rate.is_zero,
    )
    return rate


def affine_lipschitz_gap(
    T: NonexpansiveOperator, g: StepFunction, p: float, probes: Optional[Dict[str, StepFunction]] = None
) -> float:
    """max sobre pares de sondas de ‖F_g(f) − F_g(f')‖_p − ‖f − f'‖_p."""
    probes = probes or standard_probes()
    worst = -np.inf
    for f, f2 in combinations(probes.values(), 2):
        gap = lp_norm((T(f) + g) - (T(f2) + g), p) - lp_norm(f - f2, p)
        worst = max(worst, gap)
    return float(worst)


# --------------------------------------------------
# Limite ergódico
# --------------------------------------------------
class ResidualRow(BaseModel):
    n: int
    # ‖v_n‖_p
    v_norm: float
    # ‖v_n − τg*‖_p
    r1: Optional[float] = None
    # |E[F^n(0)ζ]/n − τ|
    r2: Optional[float] = None
    # ‖v_n + τg*‖_p
    plus_norm: Optional[float] = None


class SpectralReport(BaseModel):
    operator: str
    p: float
    n_max: int
    g: StepFunctionModel
    escape: EscapeRate
    lipschitz_gap: float
    contract_norm_gap: float
    contract_linearity_gap: float
    degenerate_direction: bool = False
    g_star: Optional[StepFunctionModel] = None
    zeta: Optional[StepFunctionModel] = None
    zeta_dual_norm: Optional[float] = None
    pairing_g_star_zeta: Optional[float] = None
    residuals: List[ResidualRow] = Field(default_factory=list)
    r1_monotone: Optional[bool] = None

    @property
    def tau(self) -> float:
        return self.escape.upper_bound

    def to_csv(self) -> str:
        return csv_text(("n", "norm", "rate"), ([r.n, repr(r.norm), repr(r.rate)] for r in self.escape.table))


def dual_direction(v: StepFunction, p: float) -> Tuple[StepFunction, StepFunction]:
    """g* = v/‖v‖_p e ζ = sgn(g*)|g*|^{p−1}: ‖ζ‖_q = 1 e E[g*ζ] = 1."""
    g_star = v / lp_norm(v, p)
    zeta = g_star.map(lambda x: np.sign(x) * np.abs(x) ** (p - 1.0))
    return g_star, zeta


def ergodic_limit_check(
    T: NonexpansiveOperator,
    g: StepFunction,
    p: float,
    n_max: int,
    schedule: Optional[Sequence[int]] = None,
) -> SpectralReport:
    """
    Roda a órbita até n_max uma única vez e confere
    - a taxa de fuga (tabela de cotas, subaditividade)
    - v_n → τ g* e E[F^n(0)ζ]/n → τ quando τ > 0
    - ‖v_n‖_p → 0 quando τ = 0 (direção degenerada, sem g*/ζ)
    """
    p = check_exponent(p)
    if p == 1.0:
        raise UnsupportedBranchError("ergodic limit check needs 1 < p < inf; p = 1 is not uniformly convex")
    if n_max < 4:
        raise ContractError(f"n_max must be >= 4, got {n_max}", invariant="n_max >= 4")
    norm_gap, lin_gap = check_operator_contract(T, p)
    lip_gap = affine_lipschitz_gap(T, g, p)
    if lip_gap > settings.PROBE_TOL:
        raise ContractError(f"F_g expands probe pair by {lip_gap!r}", invariant="F_g nonexpansive")

    checkpoints = sorted(set(schedule or doubling_schedule(n_max, start=0)) | {n_max})
    norms: List[float] = []
    saved: Dict[int, StepFunction] = {}
    for n, _, partial in orbit(T, g, n_max):
        norms.append(lp_norm(partial, p))
        if n in checkpoints:
            saved[n] = partial
            log.debug("orbit n=%d cells=%d norm=%.6g", n, partial.cell_count, norms[-1])
    escape = escape_rate_from_norms(norms)
    # τ = inf a_n/n sobre os n calculados (cota certificada)
    tau = escape.upper_bound

    report = SpectralReport(
        operator=T.describe(),
        p=p,
        n_max=n_max,
        g=StepFunctionModel.from_domain(g),
        escape=escape,
        lipschitz_gap=lip_gap,
        contract_norm_gap=norm_gap,
        contract_linearity_gap=lin_gap,
    )

    if escape.is_zero:
        log.warning(
            "degenerate direction op=%s tau=%.3g: escape rate is zero, g*/zeta not defined",
            T.describe(), tau,
        )
        report.degenerate_direction = True
        report.residuals = [ResidualRow(n=n, v_norm=norms[n - 1] / n) for n in checkpoints]
        return report

    g_star, zeta = dual_direction(saved[n_max] / float(n_max), p)
    q = p / (p - 1.0)
    report.g_star = StepFunctionModel.from_domain(g_star)
    report.zeta = StepFunctionModel.from_domain(zeta)
    report.zeta_dual_norm = lp_norm(zeta, q)
    report.pairing_g_star_zeta = expectation(g_star * zeta)
    direction = g_star * tau
    rows = []
    for n in checkpoints:
        v_n = saved[n] / float(n)
        rows.append(ResidualRow(
            n=n,
            v_norm=norms[n - 1] / n,
            r1=lp_norm(v_n - direction, p),
            r2=abs(expectation(saved[n] * zeta) / n - tau),
            plus_norm=lp_norm(v_n + direction, p),
        ))
    report.residuals = rows
    r1 = [r.r1 for r in rows]
    report.r1_monotone = all(b <= a + 1e-12 for a, b in zip(r1, r1[1:]))
    log.info(
        "ergodic limit op=%s p=%s tau=%.6g r1_last=%.3g r2_last=%.3g",
        T.describe(), p, tau, rows[-1].r1, rows[-1].r2,
    )
    return report
