import math

import numpy as np
import pytest

from caloric import SpatialGrid, SpaceTimeField


@pytest.fixture(scope="session")
def grid_1d():
    return SpatialGrid.make(1, 8.0, 512)


@pytest.fixture(scope="session")
def grid_2d():
    return SpatialGrid.make(2, 2 * math.pi, 64)


@pytest.fixture(scope="session")
def periodic_pi_grid():
    """1D grid whose box length is a multiple of 2*pi, so sin(x) is a mode."""
    return SpatialGrid.make(1, 4 * math.pi, 256)


def constant_field(grid, times, value=1.0, label="const"):
    times = np.asarray(times, dtype=float)
    return SpaceTimeField(grid, times, np.full((times.size, *grid.shape), value), label)
