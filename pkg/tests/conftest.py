import numpy as np
import pytest

from vallee_lab.series import TrigSeries

INF = float("inf")


def random_series(rng, degree, a0=0.0, scale=1.0):
    return TrigSeries(a0, scale * rng.standard_normal(degree),
                      scale * rng.standard_normal(degree))


def band_series(rng, lo, hi, scale=1.0):
    """Random series supported on harmonics lo..hi (inclusive)."""
    a = np.zeros(hi)
    b = np.zeros(hi)
    a[lo - 1:] = scale * rng.standard_normal(hi - lo + 1)
    b[lo - 1:] = scale * rng.standard_normal(hi - lo + 1)
    return TrigSeries(0.0, a, b)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
