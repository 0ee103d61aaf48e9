from .aircomp import (
    AirCompComparison,
    AirCompConfig,
    AirCompReport,
    AirCompSetup,
    aircomp_aggregate,
    aircomp_with_pa,
    analytic_mse,
    inversion_with_cutoff,
    make_setup,
)
from .devices import ClassifierThresholds, DeviceClass, FlDevice, FlRoundLog, classify_devices
from .fl import FlAborted, FlConfig, FlRunResult, FlScheme, build_devices, default_fl_scenario, fl_run
from .hotspot import HotspotPolicy, HotspotResult, hotspot_schedule
from .mobility import MobilityReport, TrackingMode, mobility_track

__all__ = [
    "AirCompComparison",
    "AirCompConfig",
    "AirCompReport",
    "AirCompSetup",
    "ClassifierThresholds",
    "DeviceClass",
    "FlAborted",
    "FlConfig",
    "FlDevice",
    "FlRoundLog",
    "FlRunResult",
    "FlScheme",
    "HotspotPolicy",
    "HotspotResult",
    "MobilityReport",
    "TrackingMode",
    "aircomp_aggregate",
    "aircomp_with_pa",
    "analytic_mse",
    "build_devices",
    "classify_devices",
    "default_fl_scenario",
    "fl_run",
    "hotspot_schedule",
    "inversion_with_cutoff",
    "make_setup",
    "mobility_track",
]
