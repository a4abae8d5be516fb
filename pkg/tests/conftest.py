import numpy as np
import pytest

from lrbgk.lowrank import LowRankMatrix


def random_lowrank(rng, n, r, scale=1.0):
    """Random Schmidt-form matrix with orthonormal factors and decreasing core."""
    r = min(r, n)
    if r == 0:
        return LowRankMatrix.zero(n)
    qx, _ = np.linalg.qr(rng.standard_normal((n, r)))
    qy, _ = np.linalg.qr(rng.standard_normal((n, r)))
    core = np.sort(scale * rng.uniform(0.1, 10.0, size=r))[::-1].copy()
    return LowRankMatrix(qx, core, qy)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
