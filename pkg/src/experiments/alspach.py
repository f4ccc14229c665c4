# --------------------------------------------------
# src/experiments/alspach.py
# --------------------------------------------------
# Isometria de Alspach em K = {f ∈ L_1 : 0 <= f <= 2, E f = 1}
#
#   F(f)(ω) = min{2, 2f(2ω)}         em [0, ½]
#   F(f)(ω) = max{0, 2f(2ω − 1) − 2} em (½, 1]
#
# - órbita de 1_Ω: F^n(1) = 1 + r_n
# - limite dos funcionais internos: h(f) = E[½|f| + ½(|f − 2| − 2)], nulo em K
# - certificado numérico de que F não tem ponto fixo nos candidatos 2·1_A
# --------------------------------------------------

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, List, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from src.config import settings
from src.errors import BudgetError, DomainError, ResolutionError, StepFunctionError
from src.experiments.limits_lab import ExampleSequence, SequenceId, default_test_suite, run_convergence
from src.experiments.reports import ConvergenceReport, csv_text
from src.functionals.internal import eval_internal
from src.functionals.l1_form import L1Form
from src.space.interval_space import (
    Branch,
    StepFunction,
    dyadic_step,
    expectation,
    lp_norm,
    merge_refine,
    pullback,
)
from src.space.rbar_measures import AtomicMeasure, Eta, constant_field

log = logging.getLogger("horolab.alspach")

K_SLACK = 1e-12

_BRANCHES = (
    Branch(0.0, 0.5, 2.0, 0.0, transform=lambda v: np.minimum(2.0, 2.0 * v)),
    Branch(0.5, 1.0, 2.0, -1.0, transform=lambda v: np.maximum(0.0, 2.0 * v - 2.0)),
)


@dataclass(frozen=True)
class KPoint:
    """Ponto de K: 0 <= f <= 2 em toda célula e E f = 1."""

    f: StepFunction

    def __post_init__(self):
        vals = self.f.values
        if vals.min() < -K_SLACK or vals.max() > 2.0 + K_SLACK:
            raise DomainError(f"values outside [0, 2]: min={vals.min()!r} max={vals.max()!r}")
        mean = expectation(self.f)
        if abs(mean - 1.0) > K_SLACK:
            raise DomainError(f"E f = {mean!r}, expected 1")


def _as_k(f: KPoint | StepFunction) -> KPoint:
    return f if isinstance(f, KPoint) else KPoint(f)


def alspach_map(f: KPoint | StepFunction) -> KPoint:
    """F(f); breakpoints b viram b/2 e ½ + b/2."""
    return KPoint(pullback(_as_k(f).f, _BRANCHES))


def orbit_from_one(n: int) -> StepFunction:
    """F^n(1_Ω) (deve coincidir com 1 + r_n)."""
    if n < 0:
        raise StepFunctionError(f"orbit length must be >= 0, got {n}")
    if n > settings.MAX_DYADIC_DEPTH:
        raise ResolutionError(f"orbit depth {n} > MAX_DYADIC_DEPTH={settings.MAX_DYADIC_DEPTH}")
    point = KPoint(StepFunction.constant(1.0))
    for _ in range(n):
        point = alspach_map(point)
    return point.f


def verify_isometry(f: KPoint | StepFunction, g: KPoint | StepFunction) -> float:
    """|‖F f − F g‖_1 − ‖f − g‖_1|."""
    kf, kg = _as_k(f), _as_k(g)
    before = lp_norm(kf.f - kg.f, 1.0)
    after = lp_norm(alspach_map(kf).f - alspach_map(kg).f, 1.0)
    return abs(after - before)


def alspach_limit_functional(f: StepFunction) -> float:
    """h(f) = E[½|f| + ½(|f − 2| − 2)]."""
    return expectation(0.5 * abs(f) + 0.5 * (abs(f - 2.0) - 2.0))


def alspach_limit_field() -> L1Form:
    """O mesmo h como forma L_1 do campo constante ½δ_{η_0} + ½δ_{η_2}."""
    mu = AtomicMeasure.mixture((0.5, Eta.finite(0.0)), (0.5, Eta.finite(2.0)))
    return L1Form(constant_field(mu))


def random_k_point(rng: np.random.Generator, level: int = 4) -> KPoint:
    """
    f = 1 + u nas 2^level células diádicas, com u antitético:
    células sorteadas aos pares recebem v e −v, v ~ U[−1, 1]
    """
    if level < 1:
        raise StepFunctionError(f"random K point needs level >= 1, got {level}")
    cells = 2**level
    order = rng.permutation(cells)
    v = rng.uniform(-1.0, 1.0, size=cells // 2)
    u = np.empty(cells)
    u[order[0::2]] = v
    u[order[1::2]] = -v
    return KPoint(dyadic_step(1.0 + u))


def alspach_convergence(
    tests: Optional[Mapping[str, StepFunction]] = None, n_max: int = 12
) -> ConvergenceReport:
    """h_{F^n(1)}(f) contra h(f); exato para n > nível diádico de f."""
    seq = ExampleSequence(SequenceId.ALSPACH_ORBIT, orbit_from_one)
    return run_convergence(seq, alspach_limit_field(), tests or default_test_suite(), range(1, n_max + 1))


# --------------------------------------------------
# Certificado de ausência de ponto fixo
# --------------------------------------------------
class Disagreement(BaseModel):
    left: float
    right: float
    f_value: float
    image_value: float


class CandidateRecord(BaseModel):
    cells: List[int]
    distance_to_one: float
    non_fixed: bool
    disagreement: Optional[Disagreement]
    h_value: float
    internal_value: float
    obstruction: float


class DisplacementRecord(BaseModel):
    start: str
    displacements: List[float]
    constant: bool
    delta: float


class CertificateReport(BaseModel):
    depth: int
    exhaustive: bool
    candidate_count: int
    expected_count: int
    candidates: List[CandidateRecord]
    displacement: List[DisplacementRecord]
    all_non_fixed: bool
    min_obstruction: float
    min_displacement: float
    certified: bool

    def to_csv(self) -> str:
        columns = ("cells", "distance_to_one", "non_fixed", "h_value", "internal_value", "obstruction")
        rows = (
            [" ".join(map(str, c.cells)), repr(c.distance_to_one), c.non_fixed, repr(c.h_value),
             repr(c.internal_value), repr(c.obstruction)]
            for c in self.candidates
        )
        return csv_text(columns, rows)


def _first_disagreement(f: StepFunction, image: StepFunction) -> Optional[Disagreement]:
    a, b = merge_refine(f, image)
    diff = np.abs(a.values - b.values) > K_SLACK
    if not diff.any():
        return None
    k = int(np.argmax(diff))
    return Disagreement(
        left=float(a.breakpoints[k]),
        right=float(a.breakpoints[k + 1]),
        f_value=float(a.values[k]),
        image_value=float(b.values[k]),
    )


def _candidate(cells: Tuple[int, ...], depth: int) -> CandidateRecord:
    values = np.zeros(2**depth)
    values[list(cells)] = 2.0
    f = dyadic_step(values)
    image = alspach_map(f).f
    disagreement = _first_disagreement(f, image)
    h_value = alspach_limit_functional(f)
    internal_value = eval_internal(f, 1.0, f)
    return CandidateRecord(
        cells=list(cells),
        distance_to_one=lp_norm(f - 1.0, 1.0),
        non_fixed=disagreement is not None,
        disagreement=disagreement,
        h_value=h_value,
        internal_value=internal_value,
        obstruction=h_value - internal_value,
    )


def _sampled_candidates(depth: int, sample: int, rng: np.random.Generator) -> Iterable[Tuple[int, ...]]:
    cells = 2**depth
    seen = set()
    for _ in range(sample):
        pick = tuple(sorted(int(k) for k in rng.choice(cells, size=cells // 2, replace=False)))
        if pick not in seen:
            seen.add(pick)
            yield pick


def orbit_displacements(f: KPoint, steps: int) -> List[float]:
    """‖F^{k+1} f − F^k f‖_1 para k = 0..steps−1."""
    out = []
    current = f
    for _ in range(steps):
        nxt = alspach_map(current)
        out.append(lp_norm(nxt.f - current.f, 1.0))
        current = nxt
    return out


def fixed_point_certificate(
    depth: int,
    sample: Optional[int] = None,
    seed: int = 0,
    starts: int = 8,
    steps: int = 4,
) -> CertificateReport:
    """
    Para cada A união de células diádicas de nível `depth` com len(A) = ½:
    (a) ‖2·1_A − 1‖_1 = 1 e F(2·1_A) ≠ 2·1_A (com uma célula de discordância)
    (b) h(2·1_A) − h_{2·1_A}(2·1_A) = 0 − (−1) = 1
    (c) deslocamento ‖F^{k+1} f − F^k f‖_1 constante e > 0 em pontos de partida sorteados

    Acima de CERTIFICATE_MAX_DEPTH só roda com `sample` (candidatos sorteados, não exaustivo)
    """
    if depth < 1:
        raise StepFunctionError(f"certificate depth must be >= 1, got {depth}")
    expected = math.comb(2**depth, 2 ** (depth - 1))
    rng = np.random.default_rng(seed)
    exhaustive = depth <= settings.CERTIFICATE_MAX_DEPTH and sample is None
    if exhaustive:
        picks: Iterable[Tuple[int, ...]] = combinations(range(2**depth), 2 ** (depth - 1))
    elif sample is None:
        raise BudgetError(
            f"depth {depth} needs {expected} candidates; exhaustive search is limited to depth "
            f"{settings.CERTIFICATE_MAX_DEPTH} (pass a sample size)"
        )
    else:
        if depth > settings.MAX_DYADIC_DEPTH:
            raise ResolutionError(f"depth {depth} > MAX_DYADIC_DEPTH={settings.MAX_DYADIC_DEPTH}")
        log.warning("certificate depth=%d sampled=%d of %d candidates (non-exhaustive)", depth, sample, expected)
        picks = _sampled_candidates(depth, sample, rng)

    candidates = [_candidate(cells, depth) for cells in picks]

    starts_map = {"one": KPoint(StepFunction.constant(1.0))}
    for i in range(max(starts - 1, 0)):
        starts_map[f"random_{i}"] = random_k_point(rng, level=min(depth + 1, 6))
    displacement = []
    for name, point in starts_map.items():
        d = orbit_displacements(point, steps)
        displacement.append(DisplacementRecord(
            start=name,
            displacements=d,
            constant=max(d) - min(d) <= K_SLACK,
            delta=min(d),
        ))

    all_non_fixed = all(c.non_fixed for c in candidates)
    min_obstruction = min((c.obstruction for c in candidates), default=0.0)
    min_displacement = min(r.delta for r in displacement)
    certified = (
        all_non_fixed
        and all(abs(c.distance_to_one - 1.0) <= K_SLACK for c in candidates)
        and all(abs(c.obstruction - 1.0) <= K_SLACK for c in candidates)
        and all(r.constant for r in displacement)
        and min_displacement > 0.0
    )
    log.info(
        "certificate depth=%d candidates=%d exhaustive=%s certified=%s",
        depth, len(candidates), exhaustive, certified,
    )
    return CertificateReport(
        depth=depth,
        exhaustive=exhaustive,
        candidate_count=len(candidates),
        expected_count=expected,
        candidates=candidates,
        displacement=displacement,
        all_non_fixed=all_non_fixed,
        min_obstruction=min_obstruction,
        min_displacement=min_displacement,
        certified=certified,
    )
