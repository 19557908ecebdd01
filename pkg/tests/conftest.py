import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def half_space_points(rng, n, count, zmin=0.2, zmax=5.0, wmax=3.0):
    w = rng.uniform(-wmax, wmax, (count, n - 1))
    z = rng.uniform(zmin, zmax, (count, 1))
    return np.concatenate([w, z], axis=1)


def ball_points(rng, n, count, rmax=0.9):
    x = rng.standard_normal((count, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x * rmax * rng.uniform(0.05, 1, (count, 1)) ** (1 / n)
