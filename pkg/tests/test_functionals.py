import numpy as np
import pytest
from hypothesis import example, given, settings as hsettings, strategies as st

from src.errors import (
    ConstraintViolationError,
    ContractError,
    InvalidExponentError,
    NotOnRError,
    StepFunctionError,
)
from src.functionals.codec import (
    functional_from_dict,
    functional_from_json,
    functional_to_json,
    step_function_from_json,
    step_function_to_json,
)
from src.functionals.internal import InternalFunctional, eval_internal
from src.functionals.l1_form import L1Form, eval_l1, two_set_closed_form, two_set_field
from src.functionals.lp_forms import LpFinite, LpLinear, eval_lp_finite
from src.functionals.probes import bound_violation, lipschitz_probe, riemann_oracle
from src.space.interval_space import IntervalSet, StepFunction, conjugate_exponent, dyadic_step, lp_norm, rademacher
from src.space.rbar_measures import (
    PLUS_INFINITY,
    AtomicMeasure,
    Eta,
    constant_field,
    dirac_field,
    splice,
)
from tests.strategies import dyadic_step_functions, exponents, measure_fields

small_dyadic = dyadic_step_functions(max_level=3)


# --------------------------------------------------
# Funcional interno e forma L_1
# --------------------------------------------------
def test_internal_basepoint_is_zero(anchor):
    assert InternalFunctional(anchor)(StepFunction.constant(0.0)) == 0.0
    assert InternalFunctional(anchor, 2.0)(StepFunction.constant(0.0)) == 0.0


def test_internal_rejects_bad_exponent(anchor):
    with pytest.raises(InvalidExponentError):
        InternalFunctional(anchor, 0.5)


@given(dyadic_step_functions(), dyadic_step_functions())
@hsettings(max_examples=100, deadline=None)
def test_dirac_field_reproduces_internal_functional(g, f):
    assert eval_l1(dirac_field(g), f) == pytest.approx(eval_internal(g, 1.0, f), abs=1e-12)


def test_rademacher_mixture_limit_on_constants():
    h = L1Form(constant_field(AtomicMeasure.mixture((0.5, Eta.finite(-1.0)), (0.5, Eta.finite(1.0)))))
    for s in (-3.0, -0.5, 0.0, 0.25, 2.0):
        expected = 0.5 * (abs(s + 1) - 1) + 0.5 * (abs(s - 1) - 1)
        assert h(StepFunction.constant(s)) == pytest.approx(expected, abs=1e-15)


@given(small_dyadic, small_dyadic)
@hsettings(max_examples=50, deadline=None)
def test_two_set_closed_form_matches_field(g, f):
    a = IntervalSet.of((0.0, 0.25))
    b = IntervalSet.of((0.5, 0.625))
    assert eval_l1(two_set_field(a, b, g), f) == pytest.approx(two_set_closed_form(a, b, g, f), abs=1e-12)


def test_two_set_field_requires_disjoint_sets(anchor):
    with pytest.raises(ContractError):
        two_set_field(IntervalSet.of((0.0, 0.5)), IntervalSet.of((0.25, 0.75)), anchor)


# --------------------------------------------------
# Ramos em L_p
# --------------------------------------------------
@given(small_dyadic, small_dyadic, exponents)
@example(dyadic_step([1.0, 0.0, 1.0, 0.0]), dyadic_step([1.0, 0.0, 1.0, 0.0]), 2.0)
@example(dyadic_step([1.0, 0.0, 1.0, 0.0]), dyadic_step([1.0, 0.0, 1.0, 0.0]), 3.0)
@hsettings(max_examples=60, deadline=None)
def test_finite_branch_reduces_to_internal_functional(g, f, p):
    value = eval_lp_finite(dirac_field(g), lp_norm(g, p), p, f)
    assert value == pytest.approx(eval_internal(g, p, f), abs=1e-9)


def test_finite_branch_constraints(anchor):
    xi = dirac_field(anchor)
    with pytest.raises(ConstraintViolationError):
        LpFinite(xi, 0.1, 2.0)
    with pytest.raises(InvalidExponentError):
        LpFinite(xi, 1.0, 1.0)
    escaping = constant_field(AtomicMeasure.mixture((0.5, PLUS_INFINITY), (0.5, Eta.finite(0.0))))
    with pytest.raises(NotOnRError):
        LpFinite(escaping, 1.0, 2.0)


def test_finite_branch_with_zero_c_is_norm():
    h = LpFinite(dirac_field(StepFunction.constant(0.0)), 0.0, 2.0)
    assert h(rademacher(2)) == pytest.approx(1.0, abs=1e-15)


# c = ‖g‖_p e f = g: h(g) = −‖g‖_p sem perder a folga c^p − E|g|^p no arredondamento
@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_finite_branch_at_the_anchor_itself(p):
    g = dyadic_step([1.0, 0.0, 1.0, 0.0])
    h = LpFinite(dirac_field(g), lp_norm(g, p), p)
    assert h.branch.slack == 0.0
    assert h(g) == pytest.approx(eval_internal(g, p, g), abs=1e-12)
    assert h(StepFunction.constant(0.0)) == 0.0


def test_finite_branch_with_huge_c_does_not_overflow():
    # c^p = 10^400 não cabe em float
    h = LpFinite(constant_field(AtomicMeasure.dirac(Eta.finite(0.0))), 1e50, 8.0)
    assert h.branch.scale == 1e50
    assert h(StepFunction.constant(0.0)) == 0.0
    assert abs(h(StepFunction.constant(1.0))) <= 1e-12
    far = constant_field(AtomicMeasure.dirac(Eta.finite(1e50)))
    assert LpFinite(far, 1e50, 8.0)(StepFunction.constant(0.0)) == 0.0
    with pytest.raises(ConstraintViolationError):
        LpFinite(far, 1e49, 8.0)


@given(measure_fields(allow_infinity=False), small_dyadic, exponents, st.sampled_from([0.0, 0.1, 1.0, 10.0]))
@hsettings(max_examples=60, deadline=None)
def test_finite_branch_basepoint_bound_and_lipschitz(xi, f, p, slack):
    h = LpFinite(xi, (xi.moment(p) + slack) ** (1.0 / p), p)
    zero = StepFunction.constant(0.0)
    assert h(zero) == 0.0
    assert bound_violation(h, f) <= 1e-9
    assert lipschitz_probe(h, [(f, zero), (f, 2.0 * f), (f, f + rademacher(1))]) <= 1e-9


@given(dyadic_step_functions(), exponents)
@hsettings(max_examples=60, deadline=None)
def test_linear_branch_holder_bound(f, p):
    q = conjugate_exponent(p)
    zeta = StepFunction([0.0, 0.5, 1.0], [0.5, -0.5])
    zeta = zeta / lp_norm(zeta, q)
    h = LpLinear(zeta, p)
    assert abs(h(f)) <= lp_norm(f, p) + 1e-9


def test_linear_branch_requires_unit_ball():
    with pytest.raises(ContractError):
        LpLinear(StepFunction.constant(1.5), 2.0)


# --------------------------------------------------
# Sondas e oráculo
# --------------------------------------------------
def test_probes_on_internal_functional(anchor, suite):
    h = InternalFunctional(anchor, 2.0)
    fs = list(suite.values())
    pairs = [(f, g) for f in fs for g in fs]
    assert lipschitz_probe(h, pairs) <= 1e-12
    assert max(bound_violation(h, f) for f in fs) <= 1e-12


def _field_from(g: StepFunction) -> L1Form:
    return L1Form(splice(
        IntervalSet.of((0.0, 0.25)).indicator(),
        constant_field(AtomicMeasure.mixture((0.5, PLUS_INFINITY), (0.5, Eta.finite(1.0)))),
        dirac_field(g),
    ))


def test_lipschitz_gap_needs_pairs(anchor):
    with pytest.raises(ContractError):
        lipschitz_probe(InternalFunctional(anchor), [])


@given(measure_fields(), small_dyadic, small_dyadic)
@hsettings(max_examples=60, deadline=None)
def test_l1_form_basepoint_bound_and_lipschitz(xi, f, f2):
    h = L1Form(xi)
    assert h(StepFunction.constant(0.0)) == pytest.approx(0.0, abs=1e-12)
    assert bound_violation(h, f) <= 1e-12
    assert lipschitz_probe(h, [(f, f2), (f, -f)]) <= 1e-12


@given(small_dyadic, small_dyadic, small_dyadic, exponents)
@hsettings(max_examples=60, deadline=None)
def test_linear_branch_basepoint_and_lipschitz(zeta, f, f2, p):
    q = conjugate_exponent(p)
    h = LpLinear(zeta / max(lp_norm(zeta, q), 1.0), p)
    assert h(StepFunction.constant(0.0)) == 0.0
    assert lipschitz_probe(h, [(f, f2), (f, 2.0 * f2)]) <= 1e-9


# Oráculo de Riemann: 50 entradas por variante
@given(small_dyadic, small_dyadic, exponents)
@hsettings(max_examples=50, deadline=None)
def test_oracle_agrees_for_internal_functional(g, f, p):
    h = InternalFunctional(g, p)
    assert riemann_oracle(h, f) == pytest.approx(h(f), abs=1e-6)


@given(measure_fields(), small_dyadic)
@hsettings(max_examples=50, deadline=None)
def test_oracle_agrees_for_l1_form(xi, f):
    h = L1Form(xi)
    assert riemann_oracle(h, f) == pytest.approx(h(f), abs=1e-6)


@given(measure_fields(allow_infinity=False), small_dyadic, exponents, st.sampled_from([0.0, 0.5, 4.0]))
@hsettings(max_examples=50, deadline=None)
def test_oracle_agrees_for_finite_branch(xi, f, p, slack):
    h = LpFinite(xi, (xi.moment(p) + slack) ** (1.0 / p), p)
    assert riemann_oracle(h, f) == pytest.approx(h(f), abs=1e-6)


@given(small_dyadic, small_dyadic, exponents)
@hsettings(max_examples=50, deadline=None)
def test_oracle_agrees_for_linear_branch(g, f, p):
    q = conjugate_exponent(p)
    h = LpLinear(g / max(lp_norm(g, q), 1.0), p)
    assert riemann_oracle(h, f) == pytest.approx(h(f), abs=1e-6)


def test_oracle_handles_escaping_field(anchor, suite):
    h = _field_from(anchor)
    for f in suite.values():
        assert riemann_oracle(h, f) == pytest.approx(h(f), abs=1e-6)


# --------------------------------------------------
# JSON
# --------------------------------------------------
def test_functional_json_round_trip(anchor, suite):
    functionals = [
        InternalFunctional(anchor, 1.5),
        _field_from(anchor),
        LpFinite(dirac_field(anchor), 1.0, 2.0),
        LpLinear(anchor / 2.0, 2.0),
    ]
    for h in functionals:
        again = functional_from_json(functional_to_json(h))
        assert type(again) is type(h)
        for f in suite.values():
            assert again(f) == h(f)


def test_functional_from_dict_rejects_unknown_variant():
    with pytest.raises(ContractError):
        functional_from_dict({"variant": "mystery"})


def test_step_function_json_is_bit_exact():
    f = StepFunction([0.0, 1 / 3, 1.0], [np.pi, -1e-300])
    assert step_function_from_json(step_function_to_json(f)) == f
    with pytest.raises(StepFunctionError):
        step_function_from_json('{"breakpoints": [0.0, 1.0], "values": []}')
