"""Federated-learning co-simulation with pinch-assisted straggler rescue.

The learning task is a seeded 2-D Gaussian-mixture classification split
non-IID over devices (Dirichlet class proportions), trained by federated
averaging. Communications decide who makes each round: a device's upload
must fit inside a deadline derived from the round-time median. The three
schemes differ only in the uplink a device may use: the fixed room
antenna, plus a pinch at the guide midpoint, or a pinch re-placed every
round to maximize the worst assisted uplink.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ..harness.rng import rng_stream
from ..neural import MlpModel, TrainConfig, train
from ..propagation import channel_coeff, pa_point
from ..rates import oma_rate
from ..scenario import (
    Obstacle,
    Point3,
    RadioConstants,
    ScenarioConfig,
    Waveguide,
    candidate_positions,
)
from .devices import ClassifierThresholds, DeviceClass, FlDevice, FlRoundLog, classify_devices


class FlScheme(str, enum.Enum):
    NO_PA = "NO_PA"
    FIXED_PA = "FIXED_PA"
    OPTIMIZED_PA = "OPTIMIZED_PA"


class FlAborted(RuntimeError):
    """No device met the round deadline."""


CLASS_MEANS = np.array([[-2.0, -2.0], [2.0, -2.0], [-2.0, 2.0], [2.0, 2.0]])
NUM_CLASSES = 4
FEATURE_SCALE = 3.0  # fixed global standardization for the mixture task


def default_fl_scenario() -> ScenarioConfig:
    """Room with a shadowed corner and a pocket only the guide can see.

    Wall A hides the corner cluster from the room-center antenna and from
    the guide midpoint; pillar B hides the pocket from the antenna but not
    from the guide. Low guide coordinates see everything.
    """
    return ScenarioConfig(
        room_min=Point3(0.0, 0.0, 0.0),
        room_max=Point3(10.0, 10.0, 3.0),
        waveguides=(
            Waveguide(
                id=0,
                feed=Point3(0.0, 2.0, 3.0),
                axis=Point3(1.0, 0.0, 0.0),
                length=10.0,
                grid_size=21,
                tx_power=1.0,
            ),
        ),
        users=(),
        obstacles=(
            Obstacle(Point3(2.4, 0.0, 0.0), Point3(3.0, 3.6, 3.0)),  # wall A
            Obstacle(Point3(6.0, 2.0, 0.0), Point3(6.5, 3.2, 3.0)),  # pillar B
        ),
        radio=RadioConstants(noise_power=1e-9),
        fixed_antenna=Point3(5.0, 5.0, 3.0),
    )


@dataclass
class FlConfig:
    scenario: ScenarioConfig = field(default_factory=default_fl_scenario)
    num_devices: int = 10
    samples_per_device: int = 80
    holdout_size: int = 2000
    dirichlet_alpha: float = 0.3
    mixture_std: float = 1.4
    hidden_units: int = 32
    local_lr: float = 0.1
    local_batch: int = 32
    local_epochs: int = 1
    bandwidth_hz: float = 1500.0
    model_bits: float = 10_000.0
    device_tx_power: float = 0.1  # [W]
    deadline_factor: float = 2.0
    device_z: float = 0.8
    thresholds: ClassifierThresholds = field(default_factory=ClassifierThresholds)


# -- synthetic task ---------------------------------------------------------


def sample_mixture(rng: np.random.Generator, labels: np.ndarray, std: float) -> np.ndarray:
    return CLASS_MEANS[labels] + rng.normal(0.0, std, size=(labels.shape[0], 2))


def holdout_set(config: FlConfig, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Balanced held-out set, fixed across schemes."""
    rng = rng_stream(seed, "fl.holdout")
    per_class = config.holdout_size // NUM_CLASSES
    labels = np.repeat(np.arange(NUM_CLASSES), per_class)
    return sample_mixture(rng, labels, config.mixture_std) / FEATURE_SCALE, labels


def accuracy(model: MlpModel, features: np.ndarray, labels: np.ndarray) -> float:
    pred = np.argmax(model.forward(features), axis=1)
    return float(np.mean(pred == labels))


# -- device construction ------------------------------------------------------


def _device_positions(num_devices: int, rank: np.ndarray, seed: int, z: float) -> list[Point3]:
    """Most class-exclusive devices go to the shadowed spots.

    Rank 0 (the single most exclusive holder) takes the pocket behind
    pillar B, which the guide midpoint can still see; ranks 1..3 take the
    corner behind wall A, reachable only from low guide coordinates. The
    rest sit on a jittered ring near the room antenna.
    """
    corner = [(1.2, 1.2), (1.8, 0.8), (0.8, 2.0)]
    pocket = (7.5, 1.0)
    rng = rng_stream(seed, "fl.placement")
    positions: list[Point3 | None] = [None] * num_devices
    ring_count = max(1, num_devices - 4)
    angles = np.linspace(0.0, 2.0 * math.pi, ring_count, endpoint=False)
    ring_slot = 0
    for place, dev in enumerate(rank):
        if place == 0 and num_devices > 4:
            x, y = pocket
        elif place < 4 and num_devices > 4:
            x, y = corner[place - 1]
        else:
            # Tight ring: stays clear of both obstacle footprints.
            radius = 1.5 + rng.uniform(-0.2, 0.2)
            theta = angles[ring_slot % ring_count] + rng.uniform(-0.1, 0.1)
            ring_slot += 1
            x = 5.0 + radius * math.cos(theta)
            y = 5.0 + radius * math.sin(theta)
        positions[dev] = Point3(float(x), float(y), z)
    return positions  # type: ignore[return-value]


def build_devices(config: FlConfig, seed: int) -> list[FlDevice]:
    """Non-IID split plus placement that turns data value into geometry.

    Per-device class proportions are Dirichlet draws; a device's data
    value is its largest share of any class's total samples, so devices
    holding near-exclusive data score high and are placed in the shadowed
    spots where only a well-placed pinch reaches them.
    """
    split_rng = rng_stream(seed, "fl.split")
    proportions = split_rng.dirichlet(
        config.dirichlet_alpha * np.ones(NUM_CLASSES), size=config.num_devices
    )
    counts = np.stack(
        [split_rng.multinomial(config.samples_per_device, p) for p in proportions]
    )
    class_totals = counts.sum(axis=0)
    class_totals[class_totals == 0] = 1
    share = counts / class_totals  # device-by-class share of each class's samples
    exclusivity = share.max(axis=1)
    # Data value is relative: the most class-exclusive device scores 1.
    exclusivity = exclusivity / exclusivity.max() if exclusivity.max() > 0 else exclusivity

    # The shadowed spots take the top holders of the two most concentrated
    # classes, so dropping them starves those classes almost completely;
    # the pocket gets the single biggest holder, which a midpoint pinch
    # can still rescue.
    class_order = np.argsort(-share.max(axis=0), kind="stable")
    cls_a, cls_b = int(class_order[0]), int(class_order[1])
    candidates = []
    for pos in range(config.num_devices):
        candidates.append(int(np.argsort(-share[:, cls_a], kind="stable")[pos]))
        candidates.append(int(np.argsort(-share[:, cls_b], kind="stable")[pos]))
    chosen: list[int] = []
    for dev in candidates:
        if dev not in chosen:
            chosen.append(dev)
        if len(chosen) == min(4, config.num_devices):
            break
    rest = [i for i in np.argsort(-exclusivity, kind="stable") if int(i) not in chosen]
    rank = np.array(chosen + [int(i) for i in rest])
    positions = _device_positions(config.num_devices, rank, seed, config.device_z)

    compute_rng = rng_stream(seed, "fl.compute")
    compute_times = compute_rng.uniform(1.0, 3.0, size=config.num_devices)

    devices = []
    for i in range(config.num_devices):
        data_rng = rng_stream(seed, f"fl.data.{i}")
        labels = np.repeat(np.arange(NUM_CLASSES), counts[i])
        data_rng.shuffle(labels)
        features = sample_mixture(data_rng, labels, config.mixture_std) / FEATURE_SCALE
        devices.append(
            FlDevice(
                id=i,
                position=positions[i],
                features=features,
                labels=labels,
                data_value=float(min(1.0, exclusivity[i])),
                compute_time=float(compute_times[i]),
            )
        )
    return devices


# -- uplinks -----------------------------------------------------------------


def _spectral_efficiency(config: FlConfig, h: complex) -> float:
    g = abs(h) ** 2
    return oma_rate(g, config.device_tx_power, config.scenario.radio.noise_power)


def antenna_rate(config: FlConfig, position: Point3) -> float:
    """Uplink spectral efficiency through the fixed room antenna [bit/s/Hz]."""
    sc = config.scenario
    h = channel_coeff(sc.fixed_antenna_point, 0.0, position, sc.radio, sc.obstacles)
    return _spectral_efficiency(config, h)


def pinch_rate(config: FlConfig, s: float, position: Point3) -> float:
    """Uplink spectral efficiency through a pinch at guide coordinate s."""
    sc = config.scenario
    w = sc.waveguides[0]
    h = channel_coeff(pa_point(w, s), s, position, sc.radio, sc.obstacles)
    return _spectral_efficiency(config, h)


def upload_seconds(config: FlConfig, rate_bits_per_hz: float) -> float:
    throughput = config.bandwidth_hz * rate_bits_per_hz
    if config.model_bits == 0.0:
        return 0.0
    if throughput <= 0.0:
        return math.inf
    return config.model_bits / throughput


def optimize_pinch(config: FlConfig, devices: list[FlDevice], assisted: list[int]) -> float:
    """Grid placement maximizing the worst assisted uplink (ties: lowest s).

    Under hard blockage one position cannot always reach every assisted
    device, which would pin the raw min at zero everywhere; the sweep
    therefore first maximizes how many assisted uplinks are live at all,
    then the worst live rate.
    """
    grid = candidate_positions(config.scenario.waveguides[0])
    if not assisted:
        return float(grid[len(grid) // 2])
    by_id = {d.id: d for d in devices}
    best_s, best_key = float(grid[0]), (-1, -math.inf)
    for s in grid:
        rates = [
            max(pinch_rate(config, float(s), by_id[i].position), antenna_rate(config, by_id[i].position))
            for i in assisted
        ]
        live = [r for r in rates if r > 0.0]
        key = (len(live), min(live) if live else -math.inf)
        if key > best_key:
            best_key = key
            best_s = float(s)
    return best_s


# -- federated averaging -------------------------------------------------------


def _init_model(config: FlConfig, seed: int) -> MlpModel:
    return MlpModel(
        [2, config.hidden_units, NUM_CLASSES],
        seed=int(rng_stream(seed, "fl.model").integers(2**31)),
    )


def local_train(model: MlpModel, device: FlDevice, config: FlConfig, seed: int, round_index: int) -> MlpModel:
    """One device's local pass, seeded per (device, round)."""
    clone = model.clone()
    targets = np.eye(NUM_CLASSES)[device.labels]
    train_seed = int(rng_stream(seed, f"fl.train.d{device.id}.r{round_index}").integers(2**31))
    train(
        clone,
        (device.features, targets),
        TrainConfig(
            learning_rate=config.local_lr,
            batch_size=config.local_batch,
            epochs=config.local_epochs,
            optimizer="sgd",
            seed=train_seed,
            loss="mse",
            normalize=False,
        ),
    )
    return clone


def fedavg(global_model: MlpModel, locals_: list[tuple[int, MlpModel]]) -> np.ndarray:
    """Sample-count-weighted average; returns the weights used (sum to 1)."""
    total = sum(n for n, _ in locals_)
    weights = np.array([n / total for n, _ in locals_])
    params = [np.zeros_like(p) for p in global_model.parameters()]
    for w, (_, model) in zip(weights, locals_):
        for acc, p in zip(params, model.parameters()):
            acc += w * p
    global_model.set_parameters(params)
    return weights


@dataclass
class FlRunResult:
    scheme: FlScheme
    seed: int
    accuracies: list[float]
    logs: list[FlRoundLog]
    classes: dict[int, DeviceClass]
    quality: dict[int, float]
    pinch_positions: list[float | None]

    @property
    def final_accuracy(self) -> float:
        return self.accuracies[-1]


def fl_run(
    config: FlConfig,
    scheme: FlScheme | str,
    rounds: int,
    seed: int,
    devices: list[FlDevice] | None = None,
) -> FlRunResult:
    """Federated averaging under one uplink scheme.

    Device data, placement, compute times, local-training streams, and
    the held-out set depend only on (config, seed), never on the scheme,
    so runs differ through communications alone.
    """
    scheme = FlScheme(scheme)
    if devices is None:
        devices = build_devices(config, seed)
    if len(devices) < 1:
        raise ValueError("need at least one device")

    conv_rates = {d.id: antenna_rate(config, d.position) for d in devices}
    max_rate = max(conv_rates.values())
    quality = {
        i: (r / max_rate if max_rate > 0 else 0.0) for i, r in conv_rates.items()
    }
    classes = classify_devices(devices, quality, config.thresholds)
    assisted = sorted(i for i, c in classes.items() if c is DeviceClass.PA_ASSIST)

    holdout_x, holdout_y = holdout_set(config, seed)
    model = _init_model(config, seed)

    accuracies: list[float] = []
    logs: list[FlRoundLog] = []
    pinch_positions: list[float | None] = []

    for r in range(rounds):
        if scheme is FlScheme.NO_PA:
            s_pinch: float | None = None
        elif scheme is FlScheme.FIXED_PA:
            s_pinch = 0.5 * config.scenario.waveguides[0].length
        else:
            s_pinch = optimize_pinch(config, devices, assisted)
        pinch_positions.append(s_pinch)

        upload: dict[int, float] = {}
        upload_conv_only: dict[int, float] = {}
        for d in devices:
            rate = conv_rates[d.id]
            upload_conv_only[d.id] = upload_seconds(config, rate)
            if s_pinch is not None and classes[d.id] is DeviceClass.PA_ASSIST:
                rate = max(rate, pinch_rate(config, s_pinch, d.position))
            upload[d.id] = upload_seconds(config, rate)

        by_id = {d.id: d for d in devices}
        round_times = {d.id: d.compute_time + upload[d.id] for d in devices}
        # The deadline is scheme-independent: a multiple of the median
        # baseline (antenna-only) round time over devices that can finish.
        baseline = [
            d.compute_time + upload_conv_only[d.id]
            for d in devices
            if math.isfinite(upload_conv_only[d.id])
        ]
        if not baseline:
            raise FlAborted(f"round {r}: every baseline upload is blocked")
        deadline = config.deadline_factor * float(np.median(baseline))
        selected = sorted(
            i for i, t in round_times.items() if math.isfinite(t) and t <= deadline
        )
        dropped = tuple(sorted(set(round_times) - set(selected)))
        rescued = tuple(
            i for i in selected if by_id[i].compute_time + upload_conv_only[i] > deadline
        )
        if not selected:
            raise FlAborted(
                f"round {r}: no device met the {deadline:.2f} s deadline under {scheme.value}"
            )

        locals_ = []
        for i in selected:  # ascending id keeps aggregation reproducible
            device = by_id[i]
            locals_.append((device.sample_count, local_train(model, device, config, seed, r)))
        fedavg(model, locals_)

        acc = accuracy(model, holdout_x, holdout_y)
        accuracies.append(acc)
        logs.append(
            FlRoundLog(
                round_index=r,
                selected=tuple(selected),
                dropped=dropped,
                rescued=rescued,
                upload_times={i: upload[i] for i in selected},
                round_seconds=max(round_times[i] for i in selected),
                accuracy=acc,
            )
        )

    return FlRunResult(
        scheme=scheme,
        seed=seed,
        accuracies=accuracies,
        logs=logs,
        classes=classes,
        quality=quality,
        pinch_positions=pinch_positions,
    )
