import math

import numpy as np
import pytest
from hypothesis import settings

from bicoherent.model import PhysicalInputs, derive_params
from bicoherent.states import CoherentLabel


# matrix builds make single examples slow; timing is not what is tested
settings.register_profile('bicoherent', deadline=None, max_examples=40)
settings.load_profile('bicoherent')


LABEL_GRID_SEED = 20240611
LABEL_GRID_SIZE = 20


def _label_grid():
    rng = np.random.default_rng(LABEL_GRID_SEED)
    ret = []
    for _ in range(LABEL_GRID_SIZE):
        q = float(rng.uniform(0.5, 1.0))
        theta = float(rng.uniform(0.0, 1.0))
        J1, J2 = (float(x) for x in rng.uniform(0.0, 0.5, 2))
        g1, g2 = (float(x) for x in rng.uniform(-math.pi, math.pi, 2))
        ret.append((q, theta, CoherentLabel(J1, g1, J2, g2)))
    return ret


LABEL_GRID = _label_grid()


@pytest.fixture(scope='session')
def label_grid():
    "Seeded ``(q, theta, label)`` triples with ``q`` in [0.5, 1] and ``J <= 0.5``."
    return LABEL_GRID


@pytest.fixture
def unit_params():
    return derive_params(PhysicalInputs())


@pytest.fixture
def deformed_params():
    return derive_params(PhysicalInputs(q=0.6, theta=0.4))
