import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.experiments.limits_lab import default_test_suite  # noqa: E402
from src.space.interval_space import dyadic_step  # noqa: E402


@pytest.fixture
def suite():
    """Funções de teste padrão (nível diádico <= 4)."""
    return default_test_suite()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def anchor():
    # ½ + ¼ r_1, E = ½
    return dyadic_step([0.75, 0.25])
