"""Figure builders over pinchsim experiment CSVs.

Rendering never recomputes any science: builders only aggregate columns
(medians and interquartile bands) and draw. Styles, fonts, and image
metadata are pinned so the same CSV bytes always produce the same image
bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# Pinned render settings: bundled font, fixed dpi, no timestamps anywhere.
matplotlib.rcParams.update(
    {
        "font.family": "DejaVu Sans",
        "font.size": 10,
        "figure.dpi": 100,
        "savefig.dpi": 100,
        "axes.grid": True,
        "grid.alpha": 0.3,
    }
)

PNG_METADATA = {"Software": "pinchplots"}

KINDS = ("fl_curves", "rate_heatmap", "complexity_bars", "learning_curves")

SCHEME_STYLE = {
    "NO_PA": {"color": "#b3b3b3", "linestyle": "--"},
    "FIXED_PA": {"color": "#5b8db8", "linestyle": "-."},
    "OPTIMIZED_PA": {"color": "#c1554e", "linestyle": "-"},
}


class FigureError(ValueError):
    """Bad figure request: unknown kind, missing columns, or empty data."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    csv_paths: tuple[str, ...]
    out_path: str
    xlabel: str = ""
    ylabel: str = ""
    scheme_style: dict = field(default_factory=lambda: dict(SCHEME_STYLE))

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise FigureError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.csv_paths:
            raise FigureError("at least one input CSV required")


def _read_rows(path: str, required: tuple[str, ...]) -> list[dict]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in required if c not in header]
            if missing:
                raise FigureError(f"{path}: missing columns {missing}")
            rows = list(reader)
    except OSError as exc:
        raise FigureError(f"{path}: {exc}") from exc
    if not rows:
        raise FigureError(f"{path}: no data rows")
    return rows


def _median_iqr(series: dict[float, list[float]]) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    xs = np.array(sorted(series))
    med = np.array([np.median(series[x]) for x in xs])
    lo = np.array([np.percentile(series[x], 25) for x in xs])
    hi = np.array([np.percentile(series[x], 75) for x in xs])
    return xs, med, lo, hi


# -- builders -------------------------------------------------------------------


def build_fl_curves(spec: FigureSpec):
    """One median accuracy curve per scheme with an interquartile band."""
    per_scheme: dict[str, dict[float, list[float]]] = {}
    for path in spec.csv_paths:
        for row in _read_rows(path, ("round", "scheme", "seed", "accuracy")):
            scheme = row["scheme"]
            rnd = float(row["round"])
            per_scheme.setdefault(scheme, {}).setdefault(rnd, []).append(float(row["accuracy"]))
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    for scheme in sorted(per_scheme):
        xs, med, lo, hi = _median_iqr(per_scheme[scheme])
        style = spec.scheme_style.get(scheme, {})
        ax.plot(xs, med, label=scheme, **style)
        ax.fill_between(xs, lo, hi, alpha=0.2, color=style.get("color"))
    ax.set_xlabel(spec.xlabel or "round")
    ax.set_ylabel(spec.ylabel or "held-out accuracy")
    ax.legend(loc="lower right")
    fig.tight_layout()
    return fig


def build_rate_heatmap(spec: FigureSpec):
    """Per-user rate as a function of activation position on one guide."""
    rows = []
    for path in spec.csv_paths:
        rows.extend(_read_rows(path, ("position", "user_id", "rate_bits_per_hz")))
    positions = sorted({float(r["position"]) for r in rows})
    users = sorted({int(r["user_id"]) for r in rows})
    grid = np.full((len(users), len(positions)), np.nan)
    pos_index = {p: j for j, p in enumerate(positions)}
    user_index = {u: i for i, u in enumerate(users)}
    for r in rows:
        grid[user_index[int(r["user_id"])], pos_index[float(r["position"])]] = float(
            r["rate_bits_per_hz"]
        )
    fig, ax = plt.subplots(figsize=(5.5, 2.4 + 0.4 * len(users)))
    image = ax.imshow(
        grid,
        aspect="auto",
        origin="lower",
        cmap="viridis",
        extent=(min(positions), max(positions), -0.5, len(users) - 0.5),
    )
    ax.set_yticks(range(len(users)), [f"user {u}" for u in users])
    ax.set_xlabel(spec.xlabel or "activation position [m]")
    ax.set_ylabel(spec.ylabel or "")
    ax.grid(False)
    fig.colorbar(image, ax=ax, label="rate [bit/s/Hz]")
    fig.tight_layout()
    return fig


def build_complexity_bars(spec: FigureSpec):
    """Log-scale evaluation counts, one bar per benchmark row."""
    rows = []
    for path in spec.csv_paths:
        rows.extend(_read_rows(path, ("method", "N", "K", "evaluations")))
    labels = []
    counts = []
    for r in rows:
        suffix = f" N={r['N']} K={r['K']}" if r["N"] else ""
        labels.append(f"{r['method']}{suffix}")
        counts.append(float(r["evaluations"]))
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.bar(range(len(counts)), counts, color="#5b8db8")
    ax.set_yscale("log")
    ax.set_xticks(range(len(labels)), labels, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel(spec.ylabel or "objective evaluations")
    fig.tight_layout()
    return fig


def build_learning_curves(spec: FigureSpec):
    """Median episode reward across runs with an IQR band, plus the
    median oracle ratio on a second axis when present."""
    reward: dict[float, list[float]] = {}
    ratio: dict[float, list[float]] = {}
    for path in spec.csv_paths:
        for row in _read_rows(path, ("episode", "mean_reward")):
            ep = float(row["episode"])
            reward.setdefault(ep, []).append(float(row["mean_reward"]))
            value = row.get("oracle_ratio", "")
            if value not in ("", "nan"):
                ratio.setdefault(ep, []).append(float(value))
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    xs, med, lo, hi = _median_iqr(reward)
    ax.plot(xs, med, color="#5b8db8", label="median reward")
    ax.fill_between(xs, lo, hi, alpha=0.2, color="#5b8db8")
    ax.set_xlabel(spec.xlabel or "episode")
    ax.set_ylabel(spec.ylabel or "mean reward")
    if ratio:
        twin = ax.twinx()
        rx, rmed, rlo, rhi = _median_iqr(ratio)
        twin.plot(rx, rmed, color="#c1554e", linestyle="--", label="oracle ratio")
        twin.fill_between(rx, rlo, rhi, alpha=0.15, color="#c1554e")
        twin.set_ylabel("oracle ratio")
        twin.set_ylim(0.0, 1.05)
        twin.grid(False)
    ax.legend(loc="lower right")
    fig.tight_layout()
    return fig


BUILDERS = {
    "fl_curves": build_fl_curves,
    "rate_heatmap": build_rate_heatmap,
    "complexity_bars": build_complexity_bars,
    "learning_curves": build_learning_curves,
}


def build_figure(spec: FigureSpec):
    return BUILDERS[spec.kind](spec)


def plot(kind: str, csv_paths: list[str], out_path: str) -> str:
    """Render one figure; nothing is written when the inputs are bad."""
    spec = FigureSpec(kind=kind, csv_paths=tuple(csv_paths), out_path=out_path)
    fig = build_figure(spec)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format=out.suffix.lstrip(".") or "png", metadata=PNG_METADATA)
    plt.close(fig)
    return str(out)
