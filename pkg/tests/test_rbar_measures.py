import math

import pytest
from hypothesis import given, settings as hsettings, strategies as st

from src.errors import ContractError, EvaluationError, NotOnRError, StepFunctionError
from src.space.interval_space import IntervalSet, Partition, StepFunction, dyadic_step, rademacher
from src.space.rbar_measures import (
    MINUS_INFINITY,
    PLUS_INFINITY,
    AtomicMeasure,
    Eta,
    RandomMeasureField,
    average,
    coarsen,
    constant_field,
    dirac_field,
    integrate,
    mass_at_infinity,
    pairing,
    splice,
)
from tests.strategies import finite_values, measure_fields


def test_eta_evaluation():
    assert Eta.finite(2.0)(0.0) == 0.0
    assert Eta.finite(2.0)(3.0) == -1.0
    assert Eta.finite(-1.0)(1.0) == 1.0
    assert PLUS_INFINITY(3.0) == -3.0
    assert MINUS_INFINITY(3.0) == 3.0


def test_eta_validation_and_dict():
    with pytest.raises(StepFunctionError):
        Eta.finite(float("inf"))
    assert Eta.from_dict(Eta.finite(1.5).to_dict()) == Eta.finite(1.5)
    assert Eta.from_dict({"tag": "+inf"}) == PLUS_INFINITY


def test_atomic_measure_merges_duplicates_in_first_appearance_order():
    mu = AtomicMeasure.mixture((0.25, Eta.finite(2.0)), (0.5, Eta.finite(0.0)), (0.25, Eta.finite(2.0)))
    assert mu.atoms == (Eta.finite(2.0), Eta.finite(0.0))
    assert mu.weights == (0.5, 0.5)
    assert mu.is_probability


def test_atomic_measure_merges_within_tolerance_and_drops_zero_weights():
    mu = AtomicMeasure([(Eta.finite(1.0), 0.5), (Eta.finite(1.0 + 1e-13), 0.5), (PLUS_INFINITY, 0.0)])
    assert len(mu.atoms) == 1
    assert mu.total_mass == 1.0


def test_atomic_measure_rejects_negative_weights():
    with pytest.raises(ContractError):
        AtomicMeasure([(Eta.finite(0.0), -0.1)])


def test_moment_and_mass_at_infinity():
    mu = AtomicMeasure.mixture((0.5, Eta.finite(-2.0)), (0.5, Eta.finite(2.0)))
    assert mu.moment(2) == 4.0
    escaping = AtomicMeasure.mixture((0.5, PLUS_INFINITY), (0.5, Eta.finite(0.0)))
    assert escaping.mass_at_infinity == 0.5
    with pytest.raises(NotOnRError):
        escaping.moment(1)


def test_average_and_integrate():
    mu = average([AtomicMeasure.dirac(Eta.finite(0.0)), AtomicMeasure.dirac(Eta.finite(2.0))], [0.5, 0.5])
    assert mu == AtomicMeasure.mixture((0.5, Eta.finite(0.0)), (0.5, Eta.finite(2.0)))
    # ∫ η(1) dμ = ½·1 + ½·(|1−2| − 2)
    assert integrate(mu, lambda e: e(1.0)) == 0.0
    with pytest.raises(EvaluationError):
        integrate(mu, lambda e: float("nan"))


def test_field_requires_probability_on_every_cell():
    half = AtomicMeasure([(Eta.finite(0.0), 0.5)])
    with pytest.raises(ContractError):
        RandomMeasureField([0.0, 1.0], [half])
    with pytest.raises(StepFunctionError):
        RandomMeasureField([0.0, 0.5, 1.0], [AtomicMeasure.dirac(PLUS_INFINITY)])


def test_dirac_field_and_measure_at():
    xi = dirac_field(rademacher(1))
    assert xi.is_on_R
    assert xi.measure_at(0.25) == AtomicMeasure.dirac(Eta.finite(1.0))
    assert xi.measure_at(0.75) == AtomicMeasure.dirac(Eta.finite(-1.0))
    assert xi.moment(2) == 1.0


def test_splice_builds_escape_field():
    a = IntervalSet.of((0.0, 0.25))
    xi = splice(a.indicator(), constant_field(AtomicMeasure.dirac(PLUS_INFINITY)), dirac_field(rademacher(1)))
    assert mass_at_infinity(xi) == 0.25
    assert xi.measure_at(0.1) == AtomicMeasure.dirac(PLUS_INFINITY)
    assert xi.measure_at(0.4) == AtomicMeasure.dirac(Eta.finite(1.0))
    assert not xi.is_on_R


def test_coarsen_averages_over_cells():
    xi = dirac_field(StepFunction([0.0, 0.5, 1.0], [0.0, 2.0]))
    coarse = coarsen(xi, Partition.trivial())
    assert coarse.measures[0] == AtomicMeasure.mixture((0.5, Eta.finite(0.0)), (0.5, Eta.finite(2.0)))
    # refinar não muda nada
    fine = coarsen(xi, Partition.dyadic(2))
    assert fine.measures[1] == AtomicMeasure.dirac(Eta.finite(0.0))
    assert fine.measures[2] == AtomicMeasure.dirac(Eta.finite(2.0))


def test_pairing_sums_cell_by_cell():
    xi = constant_field(AtomicMeasure.mixture((0.5, Eta.finite(-1.0)), (0.5, Eta.finite(1.0))))
    f = StepFunction([0.0, 0.5, 1.0], [2.0, 0.0])
    value = pairing(xi, lambda ctx, eta: eta(ctx.values[0]), coupled=(f,))
    # f = 2 em metade: ½(|3|−1) + ½(|1|−1) = 1; f = 0 na outra: 0
    assert value == pytest.approx(0.5, abs=1e-15)


def test_field_dict_round_trip():
    xi = splice(
        IntervalSet.of((0.5, 1.0)).indicator(),
        constant_field(AtomicMeasure.dirac(MINUS_INFINITY)),
        dirac_field(rademacher(2)),
    )
    again = RandomMeasureField.from_dict(xi.to_dict())
    assert again.breakpoints.tolist() == xi.breakpoints.tolist()
    assert again.measures == xi.measures


def test_moment_overflow_becomes_infinity_and_scale_avoids_it():
    mu = AtomicMeasure.dirac(Eta.finite(1e50))
    assert mu.moment(8) == math.inf
    assert mu.moment(8, scale=1e50) == 1.0
    xi = dirac_field(StepFunction.constant(1e50))
    assert xi.moment(8) == math.inf
    assert xi.moment(8, scale=1e50) == 1.0


# --------------------------------------------------
# Coarsen: identidade fraca-* e torre
# --------------------------------------------------
def _cellwise(level: int, values) -> StepFunction:
    return dyadic_step(list(values)) if level else StepFunction.constant(values[0])


def _linear(ctx, eta):
    return eta(ctx.values[0])


def _quadratic(ctx, eta):
    return eta(ctx.values[0]) ** 2


@given(measure_fields(), st.integers(min_value=0, max_value=3), st.data())
@hsettings(max_examples=60, deadline=None)
def test_coarsen_preserves_pairing_with_cellwise_constant_integrands(xi, level, data):
    values = data.draw(st.lists(finite_values, min_size=2**level, max_size=2**level))
    h = _cellwise(level, values)
    coarse = coarsen(xi, Partition.dyadic(level))
    assert all(abs(mu.total_mass - 1.0) <= 1e-12 for mu in coarse.measures)
    for psi in (_linear, _quadratic):
        expected = pairing(xi, psi, coupled=(h,))
        assert pairing(coarse, psi, coupled=(h,)) == pytest.approx(expected, rel=1e-12, abs=1e-10)


@given(measure_fields(), st.integers(min_value=0, max_value=2), st.data())
@hsettings(max_examples=40, deadline=None)
def test_coarsen_tower_property(xi, level, data):
    fine = Partition.dyadic(level + 1)
    coarse = Partition.dyadic(level)
    values = data.draw(st.lists(finite_values, min_size=2**level, max_size=2**level))
    h = _cellwise(level, values)
    twice = coarsen(coarsen(xi, fine), coarse)
    once = coarsen(xi, coarse)
    for psi in (_linear, _quadratic):
        assert pairing(twice, psi, coupled=(h,)) == pytest.approx(
            pairing(once, psi, coupled=(h,)), rel=1e-12, abs=1e-10
        )
