"""World model for pinching-antenna runs.

A scenario bundles everything a run needs: the room, the waveguides with
their candidate activation grids, the users (static or moving), obstacles,
and the radio constants. Scenario objects are immutable; every operation
here is a pure function, so configs can be shared freely across parallel
runs.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

C_LIGHT = 299792458.0  # speed of light [m/s]

# Pedestrian-scale default for the per-user speed cap [m/s].
DEFAULT_SPEED_CAP = 1.5


class ScenarioError(ValueError):
    """Malformed scenario document or out-of-contract argument."""


class AccessMode(str, enum.Enum):
    OMA = "OMA"
    NOMA = "NOMA"
    MULTI_WAVEGUIDE = "MULTI_WAVEGUIDE"


@dataclass(frozen=True)
class Point3:
    """A point (or direction) in room coordinates [m]."""

    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def distance_to(self, other: "Point3") -> float:
        return math.dist((self.x, self.y, self.z), (other.x, other.y, other.z))

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in (self.x, self.y, self.z))


@dataclass(frozen=True)
class Waveguide:
    """A dielectric guide with a discrete grid of candidate activation spots.

    Coordinates along the guide are measured from the feed; ``grid_size``
    candidate positions are spread uniformly over ``[0, length]``.
    """

    id: int
    feed: Point3
    axis: Point3  # unit direction from the feed toward the far end
    length: float  # [m]
    grid_size: int
    tx_power: float  # [W]

    @property
    def far_end(self) -> Point3:
        return Point3(
            self.feed.x + self.length * self.axis.x,
            self.feed.y + self.length * self.axis.y,
            self.feed.z + self.length * self.axis.z,
        )


@dataclass(frozen=True)
class PinchElement:
    """One pinch on a guide: its coordinate from the feed and whether it radiates."""

    s: float  # [m] along the guide axis
    active: bool = True


@dataclass(frozen=True)
class PinchConfiguration:
    """Per-waveguide pinch placements; the decision variable of every optimizer.

    ``placements[i]`` holds the pinches of ``config.waveguides[i]``.
    """

    placements: tuple[tuple[PinchElement, ...], ...]

    @classmethod
    def one_per_waveguide(cls, positions: Sequence[float]) -> "PinchConfiguration":
        """Single active pinch per guide, at the given coordinates."""
        return cls(tuple((PinchElement(float(s), True),) for s in positions))

    def active_positions(self, wg_index: int) -> tuple[float, ...]:
        return tuple(e.s for e in self.placements[wg_index] if e.active)

    def with_position(self, wg_index: int, element_index: int, s: float) -> "PinchConfiguration":
        """Copy with one pinch moved to a new coordinate."""
        rows = list(self.placements)
        row = list(rows[wg_index])
        row[element_index] = PinchElement(float(s), row[element_index].active)
        rows[wg_index] = tuple(row)
        return PinchConfiguration(tuple(rows))


@dataclass(frozen=True)
class User:
    id: int
    position: Point3
    qos_min_rate: float = 0.0  # [bit/s/Hz]
    waypoints: tuple[tuple[float, Point3], ...] = ()  # (time [s], position)
    v_max: float = DEFAULT_SPEED_CAP  # [m/s]


@dataclass(frozen=True)
class Obstacle:
    """Axis-aligned box; anything crossing it loses line of sight."""

    lo: Point3
    hi: Point3


@dataclass(frozen=True)
class RadioConstants:
    """Physical constants of the radio link.

    ``eta`` is the free-space path-loss scale [m^2], so the unblocked power
    gain at distance d is eta / d^2. The default is the isotropic value
    c^2 / (16 pi^2 f^2).
    """

    frequency: float = 28e9  # [Hz]
    n_eff: float = 1.4  # guide effective refractive index
    noise_power: float = 1e-9  # [W]
    attenuation_db_per_m: float = 0.0  # in-guide amplitude loss
    eta: float | None = None  # [m^2]; None = c^2/(16 pi^2 f^2)
    wavelength: float | None = None  # [m]; None = c / frequency

    def __post_init__(self) -> None:
        if self.eta is None:
            object.__setattr__(self, "eta", C_LIGHT**2 / (16.0 * math.pi**2 * self.frequency**2))
        if self.wavelength is None:
            object.__setattr__(self, "wavelength", C_LIGHT / self.frequency)


@dataclass(frozen=True)
class ScenarioConfig:
    """Single source of truth for a run."""

    room_min: Point3
    room_max: Point3
    waveguides: tuple[Waveguide, ...]
    users: tuple[User, ...]
    obstacles: tuple[Obstacle, ...] = ()
    radio: RadioConstants = field(default_factory=RadioConstants)
    min_spacing: float | None = None  # [m]; None = half a wavelength
    access_mode: AccessMode = AccessMode.OMA
    seed: int = 0
    p_circuit: float = 1.0  # [W], static term of the energy-efficiency denominator
    fixed_antenna: Point3 | None = None  # conventional-antenna fallback position

    @property
    def spacing(self) -> float:
        """Minimum separation between active pinches on one guide [m]."""
        if self.min_spacing is not None:
            return self.min_spacing
        return 0.5 * self.radio.wavelength

    @property
    def fixed_antenna_point(self) -> Point3:
        """Conventional-antenna position: room center at first-guide height unless set."""
        if self.fixed_antenna is not None:
            return self.fixed_antenna
        z = self.waveguides[0].feed.z if self.waveguides else self.room_max.z
        return Point3(
            0.5 * (self.room_min.x + self.room_max.x),
            0.5 * (self.room_min.y + self.room_max.y),
            z,
        )


@dataclass(frozen=True)
class Violation:
    """One broken invariant: which field and which rule."""

    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.field}: {self.rule}"


def candidate_positions(w: Waveguide) -> np.ndarray:
    """Uniform candidate grid on [0, L], endpoints included for N >= 2.

    A single-candidate grid sits at the guide midpoint.
    """
    if w.grid_size < 1:
        raise ScenarioError(f"waveguide {w.id}: grid_size must be >= 1")
    if w.grid_size == 1:
        return np.array([0.5 * w.length])
    return np.linspace(0.0, w.length, w.grid_size)


def user_position_at(u: User, t: float) -> Point3:
    """Piecewise-linear waypoint interpolation, clamped outside the time range."""
    if not u.waypoints:
        return u.position
    times = [wt for wt, _ in u.waypoints]
    if t <= times[0]:
        return u.waypoints[0][1]
    if t >= times[-1]:
        return u.waypoints[-1][1]
    for (t0, p0), (t1, p1) in zip(u.waypoints, u.waypoints[1:]):
        if t0 <= t <= t1:
            if t1 == t0:
                return p1
            w = (t - t0) / (t1 - t0)
            return Point3(
                p0.x + w * (p1.x - p0.x),
                p0.y + w * (p1.y - p0.y),
                p0.z + w * (p1.z - p0.z),
            )
    return u.waypoints[-1][1]


def nearest_waveguide(config: ScenarioConfig, position: Point3) -> int:
    """Index of the waveguide whose segment is closest to the position (ties: lower index)."""
    best = 0
    best_d = math.inf
    p = position.as_array()
    for i, w in enumerate(config.waveguides):
        a = w.feed.as_array()
        d = w.axis.as_array()
        s = float(np.clip(np.dot(p - a, d), 0.0, w.length))
        dist = float(np.linalg.norm(p - (a + s * d)))
        if dist < best_d - 1e-15:
            best = i
            best_d = dist
    return best


def _point_in_room(config: ScenarioConfig, p: Point3, tol: float = 1e-9) -> bool:
    lo, hi = config.room_min, config.room_max
    return (
        lo.x - tol <= p.x <= hi.x + tol
        and lo.y - tol <= p.y <= hi.y + tol
        and lo.z - tol <= p.z <= hi.z + tol
    )


def validate(config: ScenarioConfig, pinch: PinchConfiguration | None = None) -> list[Violation]:
    """Check every structural invariant; violations are data, not raises.

    An empty list means every downstream module accepts the config. When a
    pinch configuration is supplied, its coordinate-range and spacing rules
    are checked too.
    """
    out: list[Violation] = []

    if len(config.waveguides) < 1:
        out.append(Violation("waveguides", "at least one waveguide required"))

    for p_name, p in (("room_min", config.room_min), ("room_max", config.room_max)):
        if not p.is_finite():
            out.append(Violation(p_name, "coordinates must be finite"))
    for ax in "xyz":
        if getattr(config.room_min, ax) > getattr(config.room_max, ax):
            out.append(Violation("room_min", f"room_min.{ax} must be <= room_max.{ax}"))

    for i, w in enumerate(config.waveguides):
        tag = f"waveguides[{i}]"
        if not (w.feed.is_finite() and w.axis.is_finite()):
            out.append(Violation(f"{tag}.feed", "coordinates must be finite"))
            continue
        if abs(w.axis.norm() - 1.0) > 1e-9:
            out.append(Violation(f"{tag}.axis", "axis must be a unit vector"))
        if not w.length > 0:
            out.append(Violation(f"{tag}.length", "length must be > 0"))
        if w.grid_size < 1:
            out.append(Violation(f"{tag}.grid_size", "grid_size must be >= 1"))
        if w.tx_power < 0:
            out.append(Violation(f"{tag}.tx_power", "tx_power must be >= 0"))
        if not (_point_in_room(config, w.feed) and _point_in_room(config, w.far_end)):
            out.append(Violation(f"{tag}", "waveguide must lie inside the room"))

    for i, u in enumerate(config.users):
        tag = f"users[{i}]"
        if not u.position.is_finite():
            out.append(Violation(f"{tag}.position", "coordinates must be finite"))
            continue
        if u.qos_min_rate < 0:
            out.append(Violation(f"{tag}.qos_min_rate", "qos_min_rate must be >= 0"))
        if not _point_in_room(config, u.position):
            out.append(Violation(f"{tag}.position", "user must lie inside the room"))
        last_t: float | None = None
        for j, (t, p) in enumerate(u.waypoints):
            if last_t is not None and t <= last_t:
                out.append(Violation(f"{tag}.waypoints[{j}]", "waypoint times must increase"))
            if not _point_in_room(config, p):
                out.append(Violation(f"{tag}.waypoints[{j}]", "waypoint must lie inside the room"))
            last_t = t
        for j in range(1, len(u.waypoints)):
            t0, p0 = u.waypoints[j - 1]
            t1, p1 = u.waypoints[j]
            if t1 > t0:
                speed = p0.distance_to(p1) / (t1 - t0)
                if speed > u.v_max * (1.0 + 1e-9):
                    out.append(
                        Violation(f"{tag}.waypoints[{j}]", f"implied speed {speed:.3f} m/s exceeds v_max")
                    )

    for i, ob in enumerate(config.obstacles):
        for ax in "xyz":
            if getattr(ob.lo, ax) > getattr(ob.hi, ax):
                out.append(Violation(f"obstacles[{i}]", f"lo.{ax} must be <= hi.{ax}"))

    r = config.radio
    if r.frequency <= 0:
        out.append(Violation("radio.frequency", "frequency must be > 0"))
    elif abs(r.wavelength - C_LIGHT / r.frequency) > 1e-9 * r.wavelength:
        out.append(Violation("radio.wavelength", "wavelength must equal c / frequency"))
    if r.n_eff < 1.0:
        out.append(Violation("radio.n_eff", "n_eff must be >= 1"))
    if not r.noise_power > 0:
        out.append(Violation("radio.noise_power", "noise_power must be > 0"))
    if r.attenuation_db_per_m < 0:
        out.append(Violation("radio.attenuation_db_per_m", "attenuation must be >= 0"))
    if config.spacing < 0:
        out.append(Violation("min_spacing", "min_spacing must be >= 0"))
    if config.p_circuit < 0:
        out.append(Violation("p_circuit", "p_circuit must be >= 0"))

    if pinch is not None:
        out.extend(_validate_pinch(config, pinch))
    return out


def _validate_pinch(config: ScenarioConfig, pinch: PinchConfiguration) -> list[Violation]:
    out: list[Violation] = []
    if len(pinch.placements) != len(config.waveguides):
        out.append(Violation("pinch.placements", "one placement row per waveguide required"))
        return out
    serving = {nearest_waveguide(config, u.position) for u in config.users}
    for i, (w, row) in enumerate(zip(config.waveguides, pinch.placements)):
        tag = f"pinch.placements[{i}]"
        active = [e.s for e in row if e.active]
        for j, e in enumerate(row):
            if not (0.0 <= e.s <= w.length):
                out.append(Violation(f"{tag}[{j}].s", "coordinate must lie on [0, length]"))
        active.sort()
        for a, b in zip(active, active[1:]):
            if b - a < config.spacing * (1.0 - 1e-12):
                out.append(
                    Violation(tag, f"active pinches {b - a:.6f} m apart violate min_spacing {config.spacing:.6f} m")
                )
        if i in serving and not active:
            out.append(Violation(tag, "waveguide serving a user needs at least one active pinch"))
    return out


# ---------------------------------------------------------------------------
# JSON scenario documents (strict: unknown keys are errors)
# ---------------------------------------------------------------------------


def _take(doc: dict, where: str, required: dict, optional: dict) -> dict:
    unknown = set(doc) - set(required) - set(optional)
    if unknown:
        raise ScenarioError(f"{where}: unknown keys {sorted(unknown)}")
    missing = set(required) - set(doc)
    if missing:
        raise ScenarioError(f"{where}: missing keys {sorted(missing)}")
    out = dict(optional)
    out.update(doc)
    return out


def _point(v, where: str) -> Point3:
    if not (isinstance(v, (list, tuple)) and len(v) == 3):
        raise ScenarioError(f"{where}: expected [x, y, z]")
    return Point3(float(v[0]), float(v[1]), float(v[2]))


def scenario_from_dict(doc: dict) -> ScenarioConfig:
    top = _take(
        doc,
        "scenario",
        required={"room_min": None, "room_max": None, "waveguides": None, "users": None},
        optional={
            "obstacles": [],
            "radio": {},
            "min_spacing": None,
            "access_mode": "OMA",
            "seed": 0,
            "p_circuit": 1.0,
            "fixed_antenna": None,
        },
    )

    waveguides = []
    for i, wd in enumerate(top["waveguides"]):
        w = _take(
            wd,
            f"waveguides[{i}]",
            required={"id": None, "feed": None, "axis": None, "length": None, "grid_size": None},
            optional={"tx_power": 1.0},
        )
        waveguides.append(
            Waveguide(
                id=int(w["id"]),
                feed=_point(w["feed"], f"waveguides[{i}].feed"),
                axis=_point(w["axis"], f"waveguides[{i}].axis"),
                length=float(w["length"]),
                grid_size=int(w["grid_size"]),
                tx_power=float(w["tx_power"]),
            )
        )

    users = []
    for i, ud in enumerate(top["users"]):
        u = _take(
            ud,
            f"users[{i}]",
            required={"id": None, "position": None},
            optional={"qos_min_rate": 0.0, "waypoints": [], "v_max": DEFAULT_SPEED_CAP},
        )
        waypoints = tuple(
            (float(t), _point(p, f"users[{i}].waypoints[{j}]")) for j, (t, p) in enumerate(u["waypoints"])
        )
        users.append(
            User(
                id=int(u["id"]),
                position=_point(u["position"], f"users[{i}].position"),
                qos_min_rate=float(u["qos_min_rate"]),
                waypoints=waypoints,
                v_max=float(u["v_max"]),
            )
        )

    obstacles = []
    for i, od in enumerate(top["obstacles"]):
        o = _take(od, f"obstacles[{i}]", required={"min": None, "max": None}, optional={})
        obstacles.append(Obstacle(_point(o["min"], "obstacle.min"), _point(o["max"], "obstacle.max")))

    rd = _take(
        top["radio"],
        "radio",
        required={},
        optional={
            "frequency": 28e9,
            "n_eff": 1.4,
            "noise_power": 1e-9,
            "attenuation_db_per_m": 0.0,
            "eta": None,
            "wavelength": None,
        },
    )
    radio = RadioConstants(
        frequency=float(rd["frequency"]),
        n_eff=float(rd["n_eff"]),
        noise_power=float(rd["noise_power"]),
        attenuation_db_per_m=float(rd["attenuation_db_per_m"]),
        eta=None if rd["eta"] is None else float(rd["eta"]),
        wavelength=None if rd["wavelength"] is None else float(rd["wavelength"]),
    )

    try:
        mode = AccessMode(top["access_mode"])
    except ValueError as exc:
        raise ScenarioError(f"access_mode: unknown mode {top['access_mode']!r}") from exc

    return ScenarioConfig(
        room_min=_point(top["room_min"], "room_min"),
        room_max=_point(top["room_max"], "room_max"),
        waveguides=tuple(waveguides),
        users=tuple(users),
        obstacles=tuple(obstacles),
        radio=radio,
        min_spacing=None if top["min_spacing"] is None else float(top["min_spacing"]),
        access_mode=mode,
        seed=int(top["seed"]),
        p_circuit=float(top["p_circuit"]),
        fixed_antenna=None if top["fixed_antenna"] is None else _point(top["fixed_antenna"], "fixed_antenna"),
    )


def scenario_to_dict(config: ScenarioConfig) -> dict:
    def pt(p: Point3) -> list[float]:
        return [p.x, p.y, p.z]

    return {
        "room_min": pt(config.room_min),
        "room_max": pt(config.room_max),
        "waveguides": [
            {
                "id": w.id,
                "feed": pt(w.feed),
                "axis": pt(w.axis),
                "length": w.length,
                "grid_size": w.grid_size,
                "tx_power": w.tx_power,
            }
            for w in config.waveguides
        ],
        "users": [
            {
                "id": u.id,
                "position": pt(u.position),
                "qos_min_rate": u.qos_min_rate,
                "waypoints": [[t, pt(p)] for t, p in u.waypoints],
                "v_max": u.v_max,
            }
            for u in config.users
        ],
        "obstacles": [{"min": pt(o.lo), "max": pt(o.hi)} for o in config.obstacles],
        "radio": {
            "frequency": config.radio.frequency,
            "n_eff": config.radio.n_eff,
            "noise_power": config.radio.noise_power,
            "attenuation_db_per_m": config.radio.attenuation_db_per_m,
            "eta": config.radio.eta,
            "wavelength": config.radio.wavelength,
        },
        "min_spacing": config.min_spacing,
        "access_mode": config.access_mode.value,
        "seed": config.seed,
        "p_circuit": config.p_circuit,
        "fixed_antenna": None if config.fixed_antenna is None else pt(config.fixed_antenna),
    }


def load_scenario(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))


def save_scenario(config: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(config), fh, indent=2)
        fh.write("\n")
