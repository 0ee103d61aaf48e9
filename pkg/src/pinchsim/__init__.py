"""Pinching-antenna system simulator and optimization toolkit."""

__version__ = "0.1.0"

from .scenario import (
    AccessMode,
    Obstacle,
    PinchConfiguration,
    PinchElement,
    Point3,
    RadioConstants,
    ScenarioConfig,
    User,
    Waveguide,
    candidate_positions,
    load_scenario,
    save_scenario,
    user_position_at,
    validate,
)

__all__ = [
    "AccessMode",
    "Obstacle",
    "PinchConfiguration",
    "PinchElement",
    "Point3",
    "RadioConstants",
    "ScenarioConfig",
    "User",
    "Waveguide",
    "candidate_positions",
    "load_scenario",
    "save_scenario",
    "user_position_at",
    "validate",
    "__version__",
]
