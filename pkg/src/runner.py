# --------------------------------------------------
# src/runner.py
# --------------------------------------------------
# Execução determinística dos experimentos
#
# - RunConfig: configuração validada de uma execução (montada pela CLI)
# - run(config): roda o experimento, aplica os checks de aceitação,
#   grava os relatórios e devolve o código de saída + lista de falhas
# - list_experiments(): catálogo estável
#
# Mesma config + mesma seed → relatórios idênticos byte a byte
# --------------------------------------------------

import logging
import math
from typing import Any, Callable, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from src.config import settings
from src.errors import ContractError, UnknownExperimentError, UnsupportedWeightsError
from src.experiments import alspach, limits_lab, spectral
from src.experiments.reports import (
    CSV_COLUMNS,
    REPORT_SCHEMA,
    ConvergenceReport,
    csv_text,
    monotone_nonincreasing,
)
from src.functionals.codec import step_function_from_json
from src.functionals.l1_form import L1Form
from src.operators.kinds import parse_operator
from src.repositories.report_repository import save_report
from src.schemas import AtomicMeasureModel
from src.space.interval_space import (
    IntervalSet,
    StepFunction,
    conjugate_exponent,
    dyadic_step,
    expectation,
    lp_norm,
    rademacher,
    sup_norm,
)
from src.space.rbar_measures import PLUS_INFINITY, AtomicMeasure, Eta, constant_field, mass_at_infinity
from src.utils.fingerprint import body_hash, canonical_json

log = logging.getLogger("horolab.runner")

EXAMPLE_IDS = ("spike", "bounded-spike", "escape", "rademacher", "alspach-orbit")
# nível diádico máximo das funções de teste padrão
SUITE_LEVEL = 4
RADEMACHER_MAX_N = 16
ORBIT_MAX_N = 12


class CatalogEntry(BaseModel):
    name: str
    topic: str
    description: str


CATALOG: Tuple[CatalogEntry, ...] = (
    CatalogEntry(
        name="examples",
        topic="convergence examples",
        description="spike, bounded spike, escape on a set, Rademacher and Alspach-orbit limits",
    ),
    CatalogEntry(
        name="converse",
        topic="converse constructions",
        description="partition nets realizing a constant atomic mixture as a limit of internal functionals",
    ),
    CatalogEntry(
        name="lp-witness",
        topic="converse constructions",
        description="internal functionals n*g_n converging to the linear functional -E[f zeta] in L_p",
    ),
    CatalogEntry(
        name="ergodic",
        topic="ergodic limits",
        description="escape rate and ergodic limit of affine nonexpansive iterations F_g = T + g",
    ),
    CatalogEntry(
        name="alspach",
        topic="fixed-point-free isometry",
        description="Alspach isometry on K: orbit, limit functional and fixed-point certificate",
    ),
)


def list_experiments() -> List[CatalogEntry]:
    return list(CATALOG)


def default_anchor() -> StepFunction:
    """½ + ¼ r_1: valores 0.75 e 0.25 nas metades de [0,1]."""
    return dyadic_step([0.75, 0.25])


class RunConfig(BaseModel):
    """Configuração resolvida de uma execução (embutida em todo relatório)."""

    experiment: str
    which: str = "all"
    p: Optional[float] = Field(default=None, ge=1)
    n_max: int = Field(default=1024, ge=2)
    depth: int = Field(default=3, ge=1)
    tol: float = Field(default=1e-12, gt=0)
    seed: int = 0
    format: Literal["csv", "json", "both"] = "both"
    out: Optional[str] = None
    operator: str = "condexp:0"
    g: Optional[str] = None
    mixture: Optional[str] = None
    random_pairs: int = Field(default=200, ge=1)
    sample: Optional[int] = Field(default=None, ge=1)

    @field_validator("experiment", "which")
    @classmethod
    def _strip(cls, value: str) -> str:
        return value.strip()

    @model_validator(mode="after")
    def _schedule_nonempty(self):
        if not self.schedule:
            raise ValueError(f"n_max={self.n_max} gives an empty doubling schedule")
        return self

    @property
    def schedule(self) -> List[int]:
        """2, 4, 8, ..., <= n_max (crescente, não vazio)."""
        return limits_lab.doubling_schedule(self.n_max, start=1)

    def resolved_p(self, default: float) -> float:
        return default if self.p is None else self.p

    def anchor(self) -> StepFunction:
        return default_anchor() if self.g is None else step_function_from_json(self.g)


class Check(BaseModel):
    name: str
    passed: bool
    value: float
    bound: float


class RunResult(BaseModel):
    exit_code: int
    body: Dict[str, Any]
    csv: Optional[str] = None
    failures: List[Check] = Field(default_factory=list)
    written: List[str] = Field(default_factory=list)


class _Checks:
    """Acumula checks de aceitação; value <= bound passa."""

    def __init__(self):
        self.items: List[Check] = []

    def at_most(self, name: str, value: float, bound: float) -> None:
        passed = bool(value <= bound) and math.isfinite(value)
        self.items.append(Check(name=name, passed=passed, value=float(value), bound=float(bound)))
        if not passed:
            log.warning("check failed name=%s value=%.6g bound=%.6g", name, value, bound)

    def holds(self, name: str, condition: bool) -> None:
        self.at_most(name, 0.0 if condition else 1.0, 0.0)

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.items if not c.passed]


def _dump(model: BaseModel) -> Dict[str, Any]:
    return model.model_dump(mode="json", by_alias=True)


def _convergence_csv(reports: List[ConvergenceReport]) -> str:
    return csv_text(CSV_COLUMNS, (row for report in reports for row in report.csv_rows()))


def _exact_tail(checks: _Checks, name: str, report: ConvergenceReport, n_min: int, tol: float) -> None:
    checks.at_most(f"{name}: exact for n >= {n_min}", report.max_error(n_min=n_min), tol)


def _monotone(checks: _Checks, name: str, report: ConvergenceReport) -> None:
    for test_id, ok in sorted(report.monotone.items()):
        checks.holds(f"{name}: error nonincreasing ({test_id})", ok)


# --------------------------------------------------
# Experimentos
# --------------------------------------------------
def _spike_like(config: RunConfig, checks: _Checks, which: str) -> ConvergenceReport:
    bounded = which == "bounded-spike"
    seq = limits_lab.ExampleSequence(
        limits_lab.SequenceId.BOUNDED_SPIKE if bounded else limits_lab.SequenceId.SPIKE,
        limits_lab.bounded_spike_sequence if bounded else limits_lab.spike_sequence,
    )
    tests = limits_lab.default_test_suite()
    report = limits_lab.run_convergence(seq, limits_lab.origin_limit(), tests, config.schedule)
    worst = max(r.abs_err - limits_lab.spike_error_bound(tests[r.test_id], r.n) for r in report.rows)
    checks.at_most(f"{which}: error <= 4|f|_inf/(n+1)", worst, config.tol)
    _monotone(checks, which, report)
    norms = {n: lp_norm(seq(n), 1.0) for n in range(1, 101)}
    if bounded:
        checks.at_most(f"{which}: |g_n|_1 < 2 for n <= 100", max(norms.values()), 2.0 - 1.0 / 101)
    else:
        worst_norm = max(abs(v - 2.0 * n * n / (n + 1)) / max(1.0, 2.0 * n * n / (n + 1)) for n, v in norms.items())
        checks.at_most(f"{which}: |g_n|_1 = 2n^2/(n+1) for n <= 100", worst_norm, config.tol)
    if bounded:
        checks.at_most(f"{which}: limit field mass at infinity", mass_at_infinity(limits_lab.origin_limit().xi), 0.0)
    return report


def _escape(config: RunConfig, checks: _Checks) -> ConvergenceReport:
    a = IntervalSet.of((0.0, 0.5))
    g = config.anchor()
    seq = limits_lab.ExampleSequence(
        limits_lab.SequenceId.ESCAPE_ON_SET, lambda n: limits_lab.escape_sequence(a, g, n), parameters={"A": a.intervals}
    )
    tests = limits_lab.default_test_suite()
    report = limits_lab.run_convergence(seq, L1Form(limits_lab.escape_limit_field(a, g)), tests, config.schedule)
    worst = max(
        r.abs_err - config.tol * r.n for r in report.rows if r.n >= math.ceil(sup_norm(tests[r.test_id]))
    )
    checks.at_most("escape: exact once n >= max|f|", worst, 0.0)
    checks.at_most(
        "escape: limit field mass at infinity = len(A)",
        abs(mass_at_infinity(limits_lab.escape_limit_field(a, g)) - a.measure),
        0.0,
    )
    return report


def _rademacher(config: RunConfig, checks: _Checks) -> ConvergenceReport:
    n_max = min(config.n_max, RADEMACHER_MAX_N)
    report = limits_lab.rademacher_limit_check(n_max)
    _exact_tail(checks, "rademacher", report, SUITE_LEVEL + 1, config.tol)
    return report


def _alspach_orbit(config: RunConfig, checks: _Checks) -> ConvergenceReport:
    n_max = min(config.n_max, ORBIT_MAX_N)
    report = alspach.alspach_convergence(n_max=n_max)
    _exact_tail(checks, "alspach-orbit", report, SUITE_LEVEL + 1, config.tol)
    worst = max(
        float(np.max(np.abs((alspach.orbit_from_one(n) - (1.0 + rademacher(n))).values))) for n in range(1, n_max + 1)
    )
    checks.at_most("alspach-orbit: F^n(1) = 1 + r_n", worst, 1e-15)
    return report


def run_examples(config: RunConfig, checks: _Checks) -> Tuple[Dict[str, Any], str]:
    runners: Dict[str, Callable[[], ConvergenceReport]] = {
        "spike": lambda: _spike_like(config, checks, "spike"),
        "bounded-spike": lambda: _spike_like(config, checks, "bounded-spike"),
        "escape": lambda: _escape(config, checks),
        "rademacher": lambda: _rademacher(config, checks),
        "alspach-orbit": lambda: _alspach_orbit(config, checks),
    }
    if config.which == "all":
        selected = list(EXAMPLE_IDS)
    elif config.which in runners:
        selected = [config.which]
    else:
        raise UnknownExperimentError(f"unknown example {config.which!r}; choose from {', '.join(EXAMPLE_IDS)} or all")
    reports = {name: runners[name]() for name in selected}
    if "spike" in reports and "bounded-spike" in reports:
        spike_limits = {(r.n, r.test_id): r.h_limit for r in reports["spike"].rows}
        gap = max(abs(r.h_limit - spike_limits[(r.n, r.test_id)]) for r in reports["bounded-spike"].rows)
        checks.at_most("spike and bounded-spike share the limit", gap, 0.0)
    bounded, escaping = limits_lab.tightness_dichotomy(IntervalSet.of((0.0, 0.5)), config.anchor(), config.schedule)
    sections: Dict[str, Any] = {name: _dump(r) for name, r in reports.items()}
    sections["tightness"] = [vars(bounded), vars(escaping)]
    return sections, _convergence_csv(list(reports.values()))


def run_converse(config: RunConfig, checks: _Checks) -> Tuple[Dict[str, Any], str]:
    tests = limits_lab.default_test_suite()
    if config.mixture is not None:
        try:
            custom = AtomicMeasureModel.model_validate_json(config.mixture)
        except ValidationError as exc:
            raise ContractError(
                f"invalid mixture: {exc.errors()[0]['msg']}", invariant="mixture schema"
            ) from exc
        mixture = custom.to_domain()
        if not mixture.is_probability:
            raise ContractError(f"mixture has total mass {mixture.total_mass!r}", invariant="mixture is probability")
        mixtures = {"custom": mixture}
    else:
        mixtures = {
            "finite": AtomicMeasure.mixture((0.5, Eta.finite(0.0)), (0.5, Eta.finite(2.0))),
            "escaping": AtomicMeasure.mixture((0.5, PLUS_INFINITY), (0.5, Eta.finite(0.0))),
        }
    sections: Dict[str, Any] = {}
    reports = []
    for name, mixture in mixtures.items():
        bound = 0.0
        try:
            limits_lab.rational_weights(mixture)
        except UnsupportedWeightsError:
            mixture, bound = limits_lab.rationalize_mixture(mixture)
        seq = limits_lab.converse_sequence(mixture)
        report = limits_lab.run_convergence(
            seq, L1Form(constant_field(mixture)), tests, config.schedule, experiment=f"converse-{name}"
        )
        # partição uniforme com n >= 2^SUITE_LEVEL células alinha com as funções de teste
        n_min = max(2**SUITE_LEVEL, math.ceil(max(sup_norm(f) for f in tests.values())))
        tail = [r.abs_err - config.tol * r.n for r in report.rows if r.n >= n_min]
        if tail:
            checks.at_most(f"converse-{name}: exact on aligned partitions", max(tail), 0.0)
        sections[name] = {"mixture": mixture.to_dict(), "perturbation_bound": bound, "report": _dump(report)}
        reports.append(report)
    return sections, _convergence_csv(reports)


def run_lp_witness(config: RunConfig, checks: _Checks) -> Tuple[Dict[str, Any], str]:
    p = config.resolved_p(2.0)
    q = conjugate_exponent(p)
    zeta = StepFunction.constant(1.0) if config.g is None else step_function_from_json(config.g)
    tests = limits_lab.default_test_suite()
    seq = limits_lab.witness_sequence(zeta, p)
    report = limits_lab.run_convergence(seq, limits_lab.witness_limit(zeta, p), tests, config.schedule)
    worst_dual, worst_norm, worst_pair = 0.0, 0.0, 0.0
    for n in config.schedule:
        zeta_n = limits_lab.lp_witness_dual(zeta, p, n)
        g_tilde = limits_lab.norming_element(zeta_n, p)
        worst_dual = max(worst_dual, abs(lp_norm(zeta_n, q) - 1.0))
        worst_norm = max(worst_norm, abs(lp_norm(g_tilde, p) - 1.0))
        worst_pair = max(worst_pair, abs(expectation(g_tilde * zeta_n) - 1.0))
    checks.at_most("lp-witness: |zeta_n|_q = 1", worst_dual, 1e-9)
    checks.at_most("lp-witness: |g_n~|_p = 1", worst_norm, 1e-9)
    checks.at_most("lp-witness: E[g_n~ zeta_n] = 1", worst_pair, 1e-9)
    body: Dict[str, Any] = {"p": p, "zeta": zeta.to_dict(), "report": _dump(report)}
    if limits_lab.witness_is_stationary(zeta, p):
        _monotone(checks, "lp-witness", report)
        return body, report.to_csv()
    # ζ_n varia com n: erro = primeira ordem (>= 0) − cauda, sem monotonicidade garantida
    n_align = limits_lab.witness_alignment([zeta, *tests.values()])
    rows = limits_lab.witness_decomposition(zeta, p, tests, config.schedule)
    log.info("lp-witness zeta is not stationary; tail checked for n >= %d", n_align)
    checks.at_most("lp-witness: h_n(f) + E[f zeta_n] >= 0", max(-r.first_order for r in rows), 1e-9)
    for test_id in sorted(tests):
        tails = [abs(r.tail) for r in rows if r.test_id == test_id and r.n >= n_align]
        checks.holds(
            f"lp-witness: tail nonincreasing for n >= {n_align} ({test_id})",
            monotone_nonincreasing(tails),
        )
    body["alignment"] = n_align
    body["decomposition"] = [_dump(r) for r in rows]
    return body, report.to_csv()


def run_ergodic(config: RunConfig, checks: _Checks) -> Tuple[Dict[str, Any], str]:
    op = parse_operator(config.operator)
    p = config.resolved_p(2.0)
    report = spectral.ergodic_limit_check(op, config.anchor(), p, config.n_max)
    escape = report.escape
    checks.at_most("ergodic: subadditivity", escape.subadditivity_gap, 1e-9)
    checks.at_most("ergodic: tau <= every a_n/n", report.tau - min(r.rate for r in escape.table), 0.0)
    checks.at_most("ergodic: F_g nonexpansive on probes", report.lipschitz_gap, 1e-9)
    if not report.degenerate_direction:
        checks.at_most("ergodic: |zeta|_q = 1", abs(report.zeta_dual_norm - 1.0), 1e-9)
        checks.at_most("ergodic: E[g* zeta] = 1", abs(report.pairing_g_star_zeta - 1.0), 1e-9)
    return _dump(report), report.to_csv()


def run_alspach(config: RunConfig, checks: _Checks) -> Tuple[Dict[str, Any], str]:
    certificate = alspach.fixed_point_certificate(config.depth, sample=config.sample, seed=config.seed)
    checks.holds("alspach: certificate", certificate.certified)
    if certificate.exhaustive:
        checks.at_most(
            "alspach: all candidates checked",
            abs(certificate.candidate_count - certificate.expected_count),
            0.0,
        )
    rng = np.random.default_rng(config.seed)
    isometry, vanishing = 0.0, 0.0
    for _ in range(config.random_pairs):
        f, g = alspach.random_k_point(rng), alspach.random_k_point(rng)
        isometry = max(isometry, alspach.verify_isometry(f, g))
        vanishing = max(vanishing, abs(alspach.alspach_limit_functional(f.f)))
    checks.at_most("alspach: isometry on random K pairs", isometry, 1e-12)
    checks.at_most("alspach: limit functional vanishes on K", vanishing, 1e-12)
    convergence = alspach.alspach_convergence(n_max=min(config.n_max, ORBIT_MAX_N))
    _exact_tail(checks, "alspach", convergence, SUITE_LEVEL + 1, config.tol)
    body = {
        "certificate": _dump(certificate),
        "isometry_deviation": isometry,
        "limit_on_k": vanishing,
        "convergence": _dump(convergence),
    }
    return body, convergence.to_csv()


EXPERIMENTS: Dict[str, Callable[[RunConfig, _Checks], Tuple[Dict[str, Any], str]]] = {
    "examples": run_examples,
    "converse": run_converse,
    "lp-witness": run_lp_witness,
    "ergodic": run_ergodic,
    "alspach": run_alspach,
}


def run(config: RunConfig) -> RunResult:
    """
    Roda um experimento; exit_code 0 se todos os checks passam, 1 caso contrário
    Erros de invariante sobem como HorolabError (a CLI mapeia para o código de saída)
    """
    runner = EXPERIMENTS.get(config.experiment)
    if runner is None:
        raise UnknownExperimentError(
            f"unknown experiment {config.experiment!r}; choose from {', '.join(EXPERIMENTS)}"
        )
    resolved = config.model_dump(mode="json")
    log.info("run experiment=%s fingerprint=%s", config.experiment, body_hash(resolved)[:12])
    checks = _Checks()
    sections, csv_body = runner(config, checks)
    failures = checks.failures
    body = {
        "schema": REPORT_SCHEMA,
        "experiment": config.experiment,
        "config": resolved,
        "fingerprint": body_hash(resolved),
        "settings": settings.model_dump(mode="json"),
        "passed": not failures,
        "checks": [_dump(c) for c in checks.items],
        "failures": [_dump(c) for c in failures],
        "result": sections,
    }
    written = []
    if config.out is not None:
        written = [str(p) for p in save_report(config.out, body, csv_body, config.format)]
    log.info("run experiment=%s checks=%d failures=%d", config.experiment, len(checks.items), len(failures))
    return RunResult(exit_code=1 if failures else 0, body=body, csv=csv_body, failures=failures, written=written)


def render(result: RunResult) -> str:
    """JSON canônico do relatório (saída padrão quando não há --out)."""
    return canonical_json(result.body, indent=2)
