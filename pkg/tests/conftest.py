import pytest
import numpy as np
from typing import Callable

from radmhd.models.physics import PhysParams
from radmhd.models.state import Grid, SimState
from radmhd.services.physics import internal_energy


@pytest.fixture
def params() -> PhysParams:
    return PhysParams()


@pytest.fixture
def grid() -> Grid:
    return Grid(16)


@pytest.fixture
def rest_state(grid, params) -> SimState:
    n = grid.n_cells
    v = np.ones(n)
    theta = np.ones(n)
    return SimState(
        t=0.0,
        v=v,
        theta=theta,
        e=np.asarray(internal_energy(params, v, theta)),
        b=np.zeros((n, 2)),
        u=np.zeros(n + 1),
        w=np.zeros((n + 1, 2)),
    )


@pytest.fixture
def random_state(params) -> Callable[..., SimState]:
    """Smooth-ish random state with w pinned to zero at the faces."""

    def build(n: int = 16, seed: int = 7, transverse: bool = True) -> SimState:
        rng = np.random.default_rng(seed)
        v = 1.0 + 0.3 * rng.uniform(-1.0, 1.0, n)
        theta = 1.0 + 0.3 * rng.uniform(-1.0, 1.0, n)
        w = 0.1 * rng.standard_normal((n + 1, 2)) if transverse else np.zeros((n + 1, 2))
        w[0] = 0.0
        w[-1] = 0.0
        b = 0.2 * rng.standard_normal((n, 2)) if transverse else np.zeros((n, 2))
        return SimState(
            t=0.0,
            v=v,
            theta=theta,
            e=np.asarray(internal_energy(params, v, theta)),
            b=b,
            u=0.1 * rng.standard_normal(n + 1),
            w=w,
        )

    return build


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale acceptance runs (minutes)")
