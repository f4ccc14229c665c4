# Estratégias hypothesis compartilhadas pelos testes
# Funções escada diádicas: integrais exatas e oráculo de Riemann (2^20 pontos médios) exato

import numpy as np
from hypothesis import strategies as st

from src.experiments.alspach import random_k_point
from src.space.interval_space import dyadic_step, merge_refine
from src.space.rbar_measures import MINUS_INFINITY, PLUS_INFINITY, AtomicMeasure, Eta, RandomMeasureField

finite_values = st.floats(min_value=-4.0, max_value=4.0, allow_nan=False, allow_infinity=False)


@st.composite
def dyadic_step_functions(draw, max_level: int = 5, values=finite_values):
    level = draw(st.integers(min_value=0, max_value=max_level))
    cells = 2**level
    return dyadic_step(draw(st.lists(values, min_size=cells, max_size=cells)))


@st.composite
def measure_fields(draw, allow_infinity: bool = True, max_level: int = 3):
    """Campo w·δ_{g1(ω)} + (1−w)·δ_{g2(ω)}; com allow_infinity o segundo átomo pode ser η_{±∞}."""
    g1 = draw(dyadic_step_functions(max_level=max_level))
    g2 = draw(dyadic_step_functions(max_level=max_level))
    w = draw(st.sampled_from([0.25, 0.5, 0.75, 1.0]))
    escape = draw(st.sampled_from([None, PLUS_INFINITY, MINUS_INFINITY])) if allow_infinity else None
    a, b = merge_refine(g1, g2)
    measures = []
    for x, y in zip(a.values, b.values):
        other = Eta.finite(float(y)) if escape is None else escape
        measures.append(AtomicMeasure([(Eta.finite(float(x)), w), (other, 1.0 - w)]))
    return RandomMeasureField(a.breakpoints, measures)


@st.composite
def k_points(draw, max_level: int = 5):
    level = draw(st.integers(min_value=1, max_value=max_level))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_k_point(np.random.default_rng(seed), level)


exponents = st.sampled_from([1.5, 2.0, 3.0])
