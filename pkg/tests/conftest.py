import numpy as np
import pytest

from bellcav import validate
from bellcav.model import Modulation


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def caption_params():
    """C = 200 operating point (tan modulation, theta = pi)."""
    return validate.caption_parameters()


@pytest.fixture
def random_params(rng):
    def draw(modulation: Modulation | None = None):
        return validate.random_parameters(rng, modulation)
    return draw
