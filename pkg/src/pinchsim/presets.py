"""Built-in scenario configurations for the six control problems (a)-(f).

All presets share a 10 x 10 x 3 m room with ceiling-mounted guides and
users at 0.8 m height; they differ in access mode, grid resolution,
obstacles, and mobility. Everything here is config data, not a claim
about any particular deployment.
"""

from __future__ import annotations

from .scenario import (
    AccessMode,
    Obstacle,
    Point3,
    RadioConstants,
    ScenarioConfig,
    User,
    Waveguide,
)

ROOM_MIN = Point3(0.0, 0.0, 0.0)
ROOM_MAX = Point3(10.0, 10.0, 3.0)
USER_Z = 0.8
GUIDE_Z = 3.0

_RADIO = RadioConstants(noise_power=1e-9)


def _guide(idx: int, y: float, grid_size: int, length: float = 10.0, tx_power: float = 1.0) -> Waveguide:
    return Waveguide(
        id=idx,
        feed=Point3(0.0, y, GUIDE_Z),
        axis=Point3(1.0, 0.0, 0.0),
        length=length,
        grid_size=grid_size,
        tx_power=tx_power,
    )


def scenario_preset(name: str, seed: int = 0) -> ScenarioConfig:
    if name == "a":
        # Two-user power-domain pairing on one guide; a dense grid so the
        # position-to-rate mapping is worth learning.
        return ScenarioConfig(
            room_min=ROOM_MIN,
            room_max=ROOM_MAX,
            waveguides=(_guide(0, 5.0, 20),),
            users=(
                User(id=0, position=Point3(3.0, 4.0, USER_Z)),
                User(id=1, position=Point3(7.0, 6.0, USER_Z)),
            ),
            radio=_RADIO,
            access_mode=AccessMode.NOMA,
            seed=seed,
        )
    if name == "b":
        # Coarse discrete grid with a floor-to-ceiling pillar that shadows
        # part of it; activation choice is obstacle-aware.
        return ScenarioConfig(
            room_min=ROOM_MIN,
            room_max=ROOM_MAX,
            waveguides=(_guide(0, 5.0, 5),),
            users=(
                User(id=0, position=Point3(2.0, 3.0, USER_Z)),
                User(id=1, position=Point3(7.5, 6.5, USER_Z)),
            ),
            obstacles=(Obstacle(Point3(3.5, 3.2, 0.0), Point3(5.5, 4.6, 3.0)),),
            radio=_RADIO,
            access_mode=AccessMode.OMA,
            seed=seed,
        )
    if name == "c":
        # One pedestrian walking the room on a straight line; continuous
        # activation control has to track the crossing.
        walk = tuple(
            (float(t), Point3(1.0 + 0.2 * t, 4.0, USER_Z)) for t in range(0, 41, 5)
        )
        return ScenarioConfig(
            room_min=ROOM_MIN,
            room_max=ROOM_MAX,
            waveguides=(_guide(0, 5.0, 21),),
            users=(User(id=0, position=Point3(1.0, 4.0, USER_Z), waypoints=walk, v_max=1.5),),
            radio=_RADIO,
            access_mode=AccessMode.OMA,
            seed=seed,
        )
    if name == "d":
        # Multi-guide, multi-user joint position/power problem on an
        # energy-efficiency objective.
        return ScenarioConfig(
            room_min=ROOM_MIN,
            room_max=ROOM_MAX,
            waveguides=(_guide(0, 3.0, 8), _guide(1, 7.0, 8)),
            users=(
                User(id=0, position=Point3(2.0, 2.0, USER_Z)),
                User(id=1, position=Point3(8.0, 3.5, USER_Z)),
                User(id=2, position=Point3(3.0, 7.5, USER_Z)),
                User(id=3, position=Point3(7.0, 6.5, USER_Z)),
            ),
            radio=_RADIO,
            access_mode=AccessMode.OMA,
            seed=seed,
            p_circuit=1.0,
        )
    if name == "e":
        # Two interfering guides, discrete grids, per-user floor rates.
        return ScenarioConfig(
            room_min=ROOM_MIN,
            room_max=ROOM_MAX,
            waveguides=(_guide(0, 3.0, 5), _guide(1, 7.0, 5)),
            users=(
                User(id=0, position=Point3(4.5, 4.2, USER_Z), qos_min_rate=0.5),
                User(id=1, position=Point3(5.5, 5.8, USER_Z), qos_min_rate=0.5),
            ),
            radio=_RADIO,
            access_mode=AccessMode.MULTI_WAVEGUIDE,
            seed=seed,
        )
    if name == "f":
        # Continuous twin of (e).
        return ScenarioConfig(
            room_min=ROOM_MIN,
            room_max=ROOM_MAX,
            waveguides=(_guide(0, 3.0, 21), _guide(1, 7.0, 21)),
            users=(
                User(id=0, position=Point3(4.5, 4.2, USER_Z)),
                User(id=1, position=Point3(5.5, 5.8, USER_Z)),
            ),
            radio=_RADIO,
            access_mode=AccessMode.MULTI_WAVEGUIDE,
            seed=seed,
        )
    raise ValueError(f"unknown scenario {name!r}; expected one of a-f")
