import numpy as np
import pytest

from pinchsim.scenario import (
    AccessMode,
    Obstacle,
    Point3,
    RadioConstants,
    ScenarioConfig,
    User,
    Waveguide,
)


def make_config(
    num_waveguides=1,
    num_users=1,
    grid_size=5,
    length=10.0,
    mode=AccessMode.OMA,
    obstacles=(),
    users=None,
    radio=None,
    seed=0,
    **kwargs,
):
    """Room 10 x 10 x 3 m with ceiling-mounted guides running along x."""
    room_min = Point3(0.0, 0.0, 0.0)
    room_max = Point3(10.0, 10.0, 3.0)
    ys = np.linspace(2.0, 8.0, num_waveguides) if num_waveguides > 1 else [5.0]
    waveguides = tuple(
        Waveguide(
            id=i,
            feed=Point3(0.0, float(ys[i]), 3.0),
            axis=Point3(1.0, 0.0, 0.0),
            length=length,
            grid_size=grid_size,
            tx_power=1.0,
        )
        for i in range(num_waveguides)
    )
    if users is None:
        xs = np.linspace(2.0, 8.0, num_users) if num_users > 1 else [5.0]
        users = tuple(
            User(id=i, position=Point3(float(xs[i]), float(ys[min(i, num_waveguides - 1)]), 0.8))
            for i in range(num_users)
        )
    return ScenarioConfig(
        room_min=room_min,
        room_max=room_max,
        waveguides=waveguides,
        users=tuple(users),
        obstacles=tuple(obstacles),
        radio=radio or RadioConstants(noise_power=1e-9),
        access_mode=mode,
        seed=seed,
        **kwargs,
    )


@pytest.fixture
def simple_config():
    return make_config()
