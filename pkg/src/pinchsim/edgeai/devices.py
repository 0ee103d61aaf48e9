"""Edge-device bookkeeping and the rule-based straggler classifier.

The classifier splits devices into three treatments: high-value devices
on poor channels get a pinch link, low-value devices on poor channels
are dropped, everything else proceeds normally. Thresholds are plain
config values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..scenario import Point3


class DeviceClass(str, enum.Enum):
    NORMAL = "NORMAL"
    PA_ASSIST = "PA_ASSIST"
    DROP = "DROP"


@dataclass
class ClassifierThresholds:
    value_high: float = 0.45
    value_low: float = 0.2
    quality_low: float = 0.5


@dataclass
class FlDevice:
    id: int
    position: Point3
    features: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    labels: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    data_value: float = 0.0  # in [0, 1]
    compute_time: float = 1.0  # [s] per local epoch

    def __post_init__(self) -> None:
        if not 0.0 <= self.data_value <= 1.0:
            raise ValueError(f"device {self.id}: data_value must lie in [0, 1]")
        if self.compute_time <= 0:
            raise ValueError(f"device {self.id}: compute_time must be > 0")

    @property
    def sample_count(self) -> int:
        return int(self.labels.shape[0])


@dataclass(frozen=True)
class FlRoundLog:
    round_index: int
    selected: tuple[int, ...]  # device ids that made the round
    dropped: tuple[int, ...]
    rescued: tuple[int, ...]  # made it only thanks to the pinch link
    upload_times: dict[int, float]
    round_seconds: float  # max over selected of compute + upload
    accuracy: float


def classify_devices(
    devices: list[FlDevice],
    channel_quality: dict[int, float],
    thresholds: ClassifierThresholds | None = None,
) -> dict[int, DeviceClass]:
    """Value/quality rule: both inputs normalized to [0, 1]."""
    th = thresholds or ClassifierThresholds()
    out: dict[int, DeviceClass] = {}
    for dev in devices:
        quality = channel_quality[dev.id]
        if not 0.0 <= quality <= 1.0:
            raise ValueError(f"device {dev.id}: quality {quality} outside [0, 1]")
        if quality < th.quality_low and dev.data_value >= th.value_high:
            out[dev.id] = DeviceClass.PA_ASSIST
        elif quality < th.quality_low and dev.data_value < th.value_low:
            out[dev.id] = DeviceClass.DROP
        else:
            out[dev.id] = DeviceClass.NORMAL
    return out
