# --------------------------------------------------
# src/experiments/limits_lab.py
# --------------------------------------------------
# Sequências g_n de L_p cujos funcionais internos h_{g_n} convergem
# para um funcional métrico conhecido, com contabilidade exata do erro
#
# - Spike / BoundedSpike: picos ±n² (ou ±n) em volta de ½ → h_0 = E|f|
# - EscapeOnSet: n·1_A + g·1_{Ω∖A} → fuga para η_{+∞} em A
# - Rademacher: r_n → campo constante ½δ_{η_{−1}} + ½δ_{η_{+1}}
# - ConverseNet: rede por partições que realiza uma mistura atômica
# - LpWitness: n·g̃_n com g̃_n elemento normante de ζ_n → −E[fζ]
# --------------------------------------------------

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.config import settings
from src.errors import ContractError, UnsupportedWeightsError
from src.experiments.reports import ConvergenceReport, ConvergenceRow, WitnessRow, monotone_nonincreasing
from src.functionals.base import MetricFunctional
from src.functionals.internal import InternalFunctional
from src.functionals.l1_form import L1Form
from src.functionals.lp_forms import LpLinear
from src.space.interval_space import (
    IntervalSet,
    Partition,
    StepFunction,
    conjugate_exponent,
    dyadic_step,
    expectation,
    lp_norm,
    rademacher,
    sup_norm,
)
from src.space.rbar_measures import (
    PLUS_INFINITY,
    AtomicMeasure,
    Eta,
    EtaKind,
    RandomMeasureField,
    constant_field,
    dirac_field,
    mass_at_infinity,
    splice,
)

log = logging.getLogger("horolab.limits_lab")


class SequenceId(str, Enum):
    SPIKE = "spike"
    BOUNDED_SPIKE = "bounded-spike"
    ESCAPE_ON_SET = "escape"
    RADEMACHER = "rademacher"
    CONVERSE_NET = "converse"
    LP_WITNESS = "lp-witness"
    ALSPACH_ORBIT = "alspach-orbit"


@dataclass(frozen=True)
class ExampleSequence:
    """Sequência n ↦ g_n com o expoente p do espaço e parâmetros para relatório."""

    id: SequenceId
    generator: Callable[[int], StepFunction]
    p: float = 1.0
    parameters: Mapping[str, Any] = field(default_factory=dict)

    def __call__(self, n: int) -> StepFunction:
        return self.generator(n)

    def functional(self, n: int) -> InternalFunctional:
        return InternalFunctional(self.generator(n), self.p)


def default_test_suite() -> Dict[str, StepFunction]:
    """Funções de teste padrão; todas diádicas de nível <= 4."""
    return {
        "zero": StepFunction.constant(0.0),
        "one": StepFunction.constant(1.0),
        "r1": rademacher(1),
        "r2": rademacher(2),
        "two_half": IntervalSet.of((0.0, 0.5)).indicator(2.0),
        "sawtooth4": dyadic_step([(k + 0.5) / 16 for k in range(16)]),
    }


def doubling_schedule(n_max: int, start: int = 1) -> List[int]:
    """2^start, 2^(start+1), ..., <= n_max."""
    out, n = [], 2**start
    while n <= n_max:
        out.append(n)
        n *= 2
    return out


# --------------------------------------------------
# Picos em volta de ½
# --------------------------------------------------
def spike_sets(n: int) -> Tuple[IntervalSet, IntervalSet]:
    """A_n = [½ − 1/(n+1), ½],  B_n = (½, ½ + 1/(n+1)]."""
    w = 1.0 / (n + 1)
    return IntervalSet.of((0.5 - w, 0.5)), IntervalSet.of((0.5, 0.5 + w))


def _two_spikes(n: int, height: float) -> StepFunction:
    if n < 1:
        raise ContractError(f"sequence index must be >= 1, got {n}", invariant="n >= 1")
    w = 1.0 / (n + 1)
    return StepFunction.canonical([0.0, 0.5 - w, 0.5, 0.5 + w, 1.0], [0.0, -height, height, 0.0])


def spike_sequence(n: int) -> StepFunction:
    """g_n = −n²·1_{A_n} + n²·1_{B_n};  ‖g_n‖_1 = 2n²/(n+1)."""
    return _two_spikes(n, float(n) ** 2)


def bounded_spike_sequence(n: int) -> StepFunction:
    """g_n = −n·1_{A_n} + n·1_{B_n};  ‖g_n‖_1 = 2n/(n+1) < 2."""
    return _two_spikes(n, float(n))


def spike_error_bound(f: StepFunction, n: int) -> float:
    """|h_{g_n}(f) − E|f|| <= 4‖f‖_∞/(n+1) para as duas sequências de picos."""
    return 4.0 * sup_norm(f) / (n + 1)


def origin_limit() -> L1Form:
    """h_0(f) = E|f|, como forma L_1 do campo δ_{η_0}."""
    return L1Form(constant_field(AtomicMeasure.dirac(Eta.finite(0.0))))


# --------------------------------------------------
# Fuga num conjunto A
# --------------------------------------------------
def escape_sequence(a: IntervalSet, g: StepFunction, n: int) -> StepFunction:
    """g_n = n·1_A + g·1_{Ω∖A}."""
    if a.measure <= 0.0:
        raise ContractError("escape set must have positive measure", invariant="len(A) > 0")
    return a.indicator(float(n)) + g * a.complement().indicator()


def escape_limit_field(a: IntervalSet, g: StepFunction) -> RandomMeasureField:
    """ξ = 1_A δ_{η_{+∞}} + 1_{Ω∖A} δ_{η_g}."""
    return splice(a.indicator(), constant_field(AtomicMeasure.dirac(PLUS_INFINITY)), dirac_field(g))


# --------------------------------------------------
# Rademacher
# --------------------------------------------------
def rademacher_limit_field() -> RandomMeasureField:
    return constant_field(AtomicMeasure.mixture((0.5, Eta.finite(-1.0)), (0.5, Eta.finite(1.0))))


def rademacher_limit_check(n_max: int, tests: Optional[Mapping[str, StepFunction]] = None) -> ConvergenceReport:
    """h_{r_n}(f) contra o limite para n = 1..n_max; exato para n > nível diádico de f."""
    seq = ExampleSequence(SequenceId.RADEMACHER, rademacher)
    return run_convergence(seq, L1Form(rademacher_limit_field()), tests or default_test_suite(), range(1, n_max + 1))


# --------------------------------------------------
# Rede por partições (mistura atômica constante)
# --------------------------------------------------
def rational_weights(mixture: AtomicMeasure) -> List[Fraction]:
    weights = []
    for w in mixture.weights:
        frac = Fraction(w).limit_denominator(settings.RATIONAL_DENOMINATOR)
        if float(frac) != w:
            raise UnsupportedWeightsError(
                f"weight {w!r} is not a rational with denominator <= {settings.RATIONAL_DENOMINATOR}; "
                "use rationalize_mixture first"
            )
        weights.append(frac)
    if sum(weights) != 1:
        raise UnsupportedWeightsError(f"rational weights sum to {sum(weights)}, expected 1")
    return weights


def rationalize_mixture(mixture: AtomicMeasure, denominator: Optional[int] = None) -> Tuple[AtomicMeasure, float]:
    """
    Arredonda os pesos para k/denominator (padrão RATIONAL_DENOMINATOR) somando 1
    Devolve a nova mistura e a perturbação total Σ|w − k/D|
    """
    den = denominator or settings.RATIONAL_DENOMINATOR
    counts = [round(w * den) for w in mixture.weights]
    # o maior peso absorve o resíduo do arredondamento
    counts[int(np.argmax(counts))] += den - sum(counts)
    rounded = [Fraction(k, den) for k in counts]
    bound = math.fsum(abs(w - float(r)) for w, r in zip(mixture.weights, rounded))
    if bound > 0:
        log.warning("rationalized mixture weights denominator=%d perturbation=%.3g", den, bound)
    return AtomicMeasure([(e, float(r)) for e, r in zip(mixture.atoms, rounded)]), bound


def converse_net(mixture: AtomicMeasure, gamma: Partition) -> StepFunction:
    """
    g_γ: em cada célula de γ, o átomo k ocupa uma fração θ_k (da esquerda para a direita)
    com valor r_k, ou ±|γ| para η_{±∞}
    """
    weights = rational_weights(mixture)
    size = float(gamma.size)
    values = []
    for eta in mixture.atoms:
        if eta.kind is EtaKind.PLUS_INFINITY:
            values.append(size)
        elif eta.kind is EtaKind.MINUS_INFINITY:
            values.append(-size)
        else:
            values.append(eta.r)
    cumulative = np.array([float(sum(weights[:k])) for k in range(len(weights))])
    left = gamma.breakpoints[:-1]
    cuts = (left[:, None] + gamma.lengths[:, None] * cumulative[None, :]).ravel()
    bps = np.concatenate((cuts, [1.0]))
    return StepFunction.canonical(bps, np.tile(values, gamma.size))


def converse_sequence(mixture: AtomicMeasure) -> ExampleSequence:
    """n ↦ g_γ com γ a partição uniforme de n células (cadeia diádica no cronograma dobrado)."""
    return ExampleSequence(
        SequenceId.CONVERSE_NET,
        lambda n: converse_net(mixture, Partition.uniform(n)),
        parameters={"mixture": mixture.to_dict()},
    )


# --------------------------------------------------
# Testemunha do ramo linear em L_p
# --------------------------------------------------
def _witness_set(n: int) -> IntervalSet:
    return IntervalSet.of((0.0, 1.0 - 1.0 / (n + 1)))


def lp_witness_dual(zeta: StepFunction, p: float, n: int) -> StepFunction:
    """
    ζ_n = 1_{A_n} ζ + 1_{Ω∖A_n} ((1 − ‖ζ‖_q^q)/P(Ω∖A_n) + |ζ|^q)^{1/q},  A_n = [0, 1 − 1/(n+1)]
    ‖ζ_n‖_q = 1
    """
    q = conjugate_exponent(p)
    norm = lp_norm(zeta, q)
    if norm > 1.0 + settings.CONTRACT_TOL:
        raise ContractError(f"‖zeta‖_q={norm!r} > 1", invariant="zeta in unit ball of L_q")
    a_n = _witness_set(n)
    deficit = max(1.0 - norm**q, 0.0) / (1.0 / (n + 1))
    tail = abs(zeta).map(lambda v: (deficit + v**q) ** (1.0 / q))
    return zeta * a_n.indicator() + tail * a_n.complement().indicator()


def norming_element(zeta_n: StepFunction, p: float) -> StepFunction:
    """g̃ = sgn(ζ_n)|ζ_n|^{1/(p−1)}: ‖g̃‖_p = 1 e E[g̃ζ_n] = 1 quando ‖ζ_n‖_q = 1."""
    expo = 1.0 / (p - 1.0)
    return zeta_n.map(lambda v: np.sign(v) * np.abs(v) ** expo)


def lp_witness_sequence(zeta: StepFunction, p: float, n: int) -> StepFunction:
    """g_n = n·g̃_n."""
    return norming_element(lp_witness_dual(zeta, p, n), p) * float(n)


def witness_sequence(zeta: StepFunction, p: float) -> ExampleSequence:
    return ExampleSequence(
        SequenceId.LP_WITNESS,
        lambda n: lp_witness_sequence(zeta, p, n),
        p=p,
        parameters={"zeta": zeta.to_dict()},
    )


def witness_limit(zeta: StepFunction, p: float) -> LpLinear:
    return LpLinear(zeta, p)


def witness_is_stationary(zeta: StepFunction, p: float) -> bool:
    """
    ζ_n = ζ para todo n >= 1 se ‖ζ‖_q = 1 e ζ >= 0 em [½, 1] (a maior cauda)

    Nesse caso g̃_n não depende de n e o erro |h_n(f) + E[fζ]| é o quociente de
    diferenças de s ↦ ‖g̃ − sf‖_p em s = 1/n: não-crescente em n
    """
    q = conjugate_exponent(p)
    on_sphere = abs(lp_norm(zeta, q) - 1.0) <= settings.CONTRACT_TOL
    return on_sphere and bool(np.all(zeta.values[zeta.breakpoints[1:] > 0.5] >= 0.0))


def witness_alignment(functions: Sequence[StepFunction]) -> int:
    """Menor n com [1 − 1/(n+1), 1] contido na última célula de todas as funções."""
    last = max((float(f.breakpoints[-2]) for f in functions if f.cell_count > 1), default=0.0)
    if last <= 0.0:
        return 1
    return max(1, math.ceil((1.0 - 1e-12) / (1.0 - last)) - 1)


def witness_decomposition(
    zeta: StepFunction, p: float, tests: Mapping[str, StepFunction], schedule: Sequence[int]
) -> List[WitnessRow]:
    """
    Separa o erro em termo de primeira ordem e termo de cauda

    Com f e ζ constantes em [1 − 1/(n+1), 1], |tail| é não-crescente em n
    """
    rows = []
    for n in schedule:
        zeta_n = lp_witness_dual(zeta, p, n)
        h_n = InternalFunctional(norming_element(zeta_n, p) * float(n), p)
        for test_id, f in tests.items():
            rows.append(WitnessRow(
                n=n,
                test_id=test_id,
                first_order=h_n(f) + expectation(f * zeta_n),
                tail=expectation(f * (zeta_n - zeta)),
            ))
    return rows


# --------------------------------------------------
# Execução
# --------------------------------------------------
def run_convergence(
    seq: ExampleSequence,
    limit: MetricFunctional,
    tests: Mapping[str, StepFunction],
    schedule: Sequence[int],
    experiment: Optional[str] = None,
) -> ConvergenceReport:
    """Avalia h_{g_n}(f) e h(f) para cada (n, f) e monta o relatório ordenado."""
    name = experiment or seq.id.value
    limit_values = {test_id: limit(f) for test_id, f in tests.items()}
    rows: List[ConvergenceRow] = []
    scales: Dict[int, float] = {}
    for n in schedule:
        h_n = seq.functional(n)
        scales[n] = max(1.0, lp_norm(h_n.g, h_n.p))
        for test_id, f in tests.items():
            value = h_n(f)
            err = abs(value - limit_values[test_id])
            rows.append(ConvergenceRow(
                experiment=name, n=n, test_id=test_id, h_n=value, h_limit=limit_values[test_id], abs_err=err
            ))
        log.debug("convergence experiment=%s n=%d done", name, n)
    report = ConvergenceReport(experiment=name, rows=rows)
    ordered = [scales[n] for n in sorted(scales)]
    report.monotone = {t: monotone_nonincreasing(report.errors_for(t), scales=ordered) for t in tests}
    log.info("convergence experiment=%s rows=%d max_err=%.3g", name, len(rows), report.max_error())
    return report


@dataclass(frozen=True)
class TightnessRecord:
    sequence: str
    sup_l1_norm: float
    mass_at_infinity: float


def tightness_dichotomy(
    a: IntervalSet, g: StepFunction, schedule: Sequence[int]
) -> Tuple[TightnessRecord, TightnessRecord]:
    """
    Sequência limitada em L_1 → campo limite sem massa em ±∞
    Sequência ilimitada (fuga em A) → massa len(A) no infinito
    """
    bounded = TightnessRecord(
        SequenceId.BOUNDED_SPIKE.value,
        max(lp_norm(bounded_spike_sequence(n), 1) for n in schedule),
        mass_at_infinity(origin_limit().xi),
    )
    escaping = TightnessRecord(
        SequenceId.ESCAPE_ON_SET.value,
        max(lp_norm(escape_sequence(a, g, n), 1) for n in schedule),
        mass_at_infinity(escape_limit_field(a, g)),
    )
    return bounded, escaping
