"""Supervised activation positioning: learn the user-locations-to-best-
position mapping from exhaustively labeled instances.

Labels come from the exact grid search on a two-user NOMA sum-rate
objective, so a trained model answers in one forward pass what the
labeling search answered in N evaluations. Reported quality is the
held-out achieved-rate ratio against the same exact search, with the
prediction snapped to the candidate grid (the oracle's domain).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from ..harness.rng import rng_stream
from ..neural import MlpModel, TrainConfig, train
from ..rates import evaluate
from ..scenario import PinchConfiguration, Point3, ScenarioConfig, candidate_positions
from ..search import brute_force, sum_rate_objective


@dataclass
class PositionerDataset:
    features: np.ndarray  # (n, 4): both users' floor coordinates
    labels: np.ndarray  # (n, 1): exhaustive-search best coordinate [m]
    oracle_values: np.ndarray  # (n,): exhaustive-search best sum rate
    configs: list[ScenarioConfig] = field(default_factory=list)


def sample_instances(config: ScenarioConfig, count: int, seed: int) -> PositionerDataset:
    """Random two-user placements labeled by the exact grid search."""
    if len(config.users) != 2 or len(config.waveguides) != 1:
        raise ValueError("positioner instances need exactly 2 users and 1 guide")
    rng = rng_stream(seed, "positioner.instances")
    lo, hi = config.room_min, config.room_max
    feats, labels, oracle, configs = [], [], [], []
    for _ in range(count):
        users = tuple(
            dataclasses.replace(
                u,
                position=Point3(
                    float(rng.uniform(lo.x + 0.5, hi.x - 0.5)),
                    float(rng.uniform(lo.y + 0.5, hi.y - 0.5)),
                    u.position.z,
                ),
            )
            for u in config.users
        )
        instance = dataclasses.replace(config, users=users)
        result = brute_force(instance, sum_rate_objective(instance))
        feats.append(
            [users[0].position.x, users[0].position.y, users[1].position.x, users[1].position.y]
        )
        labels.append([result.best_pinch.active_positions(0)[0]])
        oracle.append(result.best_value)
        configs.append(instance)
    return PositionerDataset(
        features=np.array(feats),
        labels=np.array(labels),
        oracle_values=np.array(oracle),
        configs=configs,
    )


@dataclass
class PositionerResult:
    model: MlpModel
    mean_coord_error: float  # held-out |prediction - label| [m]
    rate_ratios: np.ndarray  # held-out achieved / oracle sum rate
    median_rate_ratio: float
    holdout_size: int


def predict_position(model: MlpModel, features: np.ndarray, length: float) -> float:
    """One forward pass, clipped to the guide."""
    return float(np.clip(model.forward(np.asarray(features, dtype=float))[0], 0.0, length))


def snap_to_grid(s: float, grid: np.ndarray) -> float:
    return float(grid[int(np.argmin(np.abs(grid - s)))])


def train_supervised_positioner(
    config: ScenarioConfig,
    dataset: PositionerDataset,
    seed: int = 0,
    holdout_fraction: float = 0.2,
    train_config: TrainConfig | None = None,
    hidden: tuple[int, ...] = (64, 64),
) -> PositionerResult:
    """Fit the positioner and score it on a held-out split.

    The achieved-rate ratio evaluates the snapped prediction with the same
    objective the labels were produced with, so 1.0 means oracle-equal.
    """
    n = dataset.features.shape[0]
    if n == 0:
        raise ValueError("dataset must be non-empty")
    n_holdout = max(1, int(holdout_fraction * n)) if n > 1 else 0
    order = rng_stream(seed, "positioner.split").permutation(n)
    test_idx = order[:n_holdout]
    train_idx = order[n_holdout:]
    if train_idx.size == 0:
        train_idx = order

    if train_config is None:
        train_config = TrainConfig(
            learning_rate=3e-3, batch_size=32, epochs=300, optimizer="adam", seed=seed
        )
    model = MlpModel(
        [dataset.features.shape[1], *hidden, 1],
        seed=int(rng_stream(seed, "positioner.init").integers(2**31)),
    )
    train(model, (dataset.features[train_idx], dataset.labels[train_idx]), train_config)

    guide = config.waveguides[0]
    grid = candidate_positions(guide)
    errors, ratios = [], []
    for i in test_idx:
        pred = predict_position(model, dataset.features[i], guide.length)
        errors.append(abs(pred - float(dataset.labels[i, 0])))
        instance = dataset.configs[i]
        snapped = snap_to_grid(pred, grid)
        achieved = evaluate(
            instance, PinchConfiguration.one_per_waveguide([snapped])
        ).sum_rate
        oracle = dataset.oracle_values[i]
        ratios.append(achieved / oracle if oracle > 0 else 1.0)
    ratios_arr = np.array(ratios) if ratios else np.array([math.nan])
    return PositionerResult(
        model=model,
        mean_coord_error=float(np.mean(errors)) if errors else math.nan,
        rate_ratios=ratios_arr,
        median_rate_ratio=float(np.median(ratios_arr)),
        holdout_size=len(test_idx),
    )
