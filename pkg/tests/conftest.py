import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from omp_prior import build_necessary, build_sharp

SHARP_TUPLES = [(2, 1, 0), (4, 1, 1), (6, 3, 2), (10, 4, 3)]


@pytest.fixture
def sharp_411():
    return build_sharp(4, 1, 1)


@pytest.fixture
def necessary_default():
    return build_necessary(4, 1, 1, 0.25, 0.1)


def gaussian_instance(seed, m, n, normalized=True):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    if normalized:
        A = A / np.linalg.norm(A, axis=0)
    return A, rng
