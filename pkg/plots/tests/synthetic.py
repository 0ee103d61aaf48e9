"""Deterministic synthetic CSVs shared by the tests and the golden
regeneration script."""

import csv

import numpy as np

SCHEMES = ("NO_PA", "FIXED_PA", "OPTIMIZED_PA")
OFFSETS = {"NO_PA": 0.0, "FIXED_PA": 0.05, "OPTIMIZED_PA": 0.09}

COMPLEXITY_ROWS = [
    {"method": "brute_force", "N": 20, "K": 6, "passes": "", "evaluations": 64_000_000, "est_time_seconds": 64000.0},
    {"method": "brute_force", "N": 30, "K": 4, "passes": "", "evaluations": 810_000, "est_time_seconds": 810.0},
    {"method": "brute_force", "N": 30, "K": 8, "passes": "", "evaluations": 656_100_000_000, "est_time_seconds": 656100000.0},
    {"method": "coordinate_grid", "N": 20, "K": 6, "passes": 3, "evaluations": 360, "est_time_seconds": 0.36},
    {"method": "deep_learning", "N": "", "K": "", "passes": "", "evaluations": 1, "est_time_seconds": 0.001},
]


def write_fl_csv(path, rounds=12, seeds=10):
    rng = np.random.default_rng(1234)
    header = ["round", "scheme", "seed", "accuracy", "round_seconds", "dropped", "rescued"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for scheme in SCHEMES:
            for seed in range(seeds):
                for rnd in range(rounds):
                    acc = 0.5 + 0.3 * (1 - np.exp(-rnd / 4)) + OFFSETS[scheme]
                    acc += float(rng.normal(0, 0.02))
                    writer.writerow([rnd, scheme, seed, round(acc, 6), 5.0, 2, 1])
    return path


def write_complexity_csv(path):
    header = ["method", "N", "K", "passes", "evaluations", "est_time_seconds"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in COMPLEXITY_ROWS:
            writer.writerow([row[c] for c in header])
    return path


def write_sweep_csv(path, positions=11, users=2):
    header = ["waveguide", "position", "user_id", "rate_bits_per_hz"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for j in range(positions):
            s = j * 10.0 / (positions - 1)
            for u in range(users):
                peak = 3.0 + 4.0 * u
                rate = 6.0 / (1.0 + (s - peak) ** 2)
                writer.writerow([0, s, u, round(rate, 6)])
    return path


def write_learning_csv(path, episodes=40, offset=0.0):
    header = ["episode", "mean_reward", "eval_rate", "oracle_ratio"]
    rng = np.random.default_rng(99 + int(offset * 100))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for ep in range(episodes):
            reward = 2.0 + 6.0 * (1 - np.exp(-ep / 10)) + float(rng.normal(0, 0.3)) + offset
            ratio = min(1.0, 0.4 + 0.6 * (1 - np.exp(-ep / 8)))
            writer.writerow([ep, round(reward, 6), "", round(ratio, 6)])
    return path
