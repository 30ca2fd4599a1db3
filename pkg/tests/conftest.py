import numpy as np
import pytest
from scipy.signal import lfilter

import whittleboot as wb


def ar1_series(n: int, a: float = 0.8, seed: int = 0, scale: float = 1.0,
               laplace: bool = False) -> wb.TimeSeries:
    """AR(1) sample with 500-step burn-in."""
    rng = np.random.default_rng(seed)
    if laplace:
        eps = rng.laplace(0.0, scale, size=n + 500)
    else:
        eps = scale * rng.standard_normal(n + 500)
    x = lfilter([1.0], [1.0, -a], eps)[500:]
    return wb.TimeSeries(x)


@pytest.fixture(scope="session")
def sunspot_series() -> wb.TimeSeries:
    from pathlib import Path

    path = Path(__file__).parent / "data" / "sunspots_yearly_1700_2020.csv"
    return wb.read_series_csv(path)
