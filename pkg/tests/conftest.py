import numpy as np
import pytest

from scde.density import (GridSpec, convex_combine, make_bawgnc, make_bec,
                          make_bsc)

# one shared default-resolution grid and a coarse one for slow paths
GRID = GridSpec(30.0, 4096)
GRID_1024 = GridSpec(30.0, 1024)
GRID_FINE = GridSpec(30.0, 16384)


@pytest.fixture(scope="session")
def grid():
    return GRID


@pytest.fixture(scope="session")
def grid_1024():
    return GRID_1024


def random_density(rng: np.random.Generator, grid: GridSpec = GRID):
    """Random symmetric density: convex mixture of BSC/BAWGNC/BEC pieces."""
    parts = []
    n = rng.integers(1, 4)
    for _ in range(n):
        kind = rng.integers(0, 3)
        if kind == 0:
            parts.append(make_bsc(float(rng.uniform(0.01, 0.5)), grid))
        elif kind == 1:
            parts.append(make_bawgnc(float(rng.uniform(0.3, 3.0)), grid))
        else:
            parts.append(make_bec(float(rng.uniform(0.0, 1.0)), grid))
    d = parts[0]
    for p in parts[1:]:
        d = convex_combine(float(rng.uniform(0.2, 0.8)), d, p)
    return d
