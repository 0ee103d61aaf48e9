"""Exact and heuristic optimizers over discrete activation grids.

Evaluation counters are exact closed forms (N^K for exhaustive search,
P*K*N for the coordinate sweep) because every candidate is evaluated,
never memoized; the reported time estimate is always count * tau, an
arithmetic illustration rather than a wall-clock measurement. Ties break
toward the lexicographically smallest index vector so results reproduce
across platforms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .rates import PowerAllocation, default_assignment, evaluate
from .scenario import PinchConfiguration, PinchElement, ScenarioConfig, candidate_positions

Objective = Callable[[PinchConfiguration], float]

DEFAULT_TAU = 1e-3  # seconds per objective evaluation
DEFAULT_BUDGET_CAP = 10**8

_SECONDS_PER_YEAR = 365.25 * 86400.0


class SearchBudgetError(RuntimeError):
    """Requested enumeration exceeds the evaluation budget cap."""


class SpacingInfeasibleError(RuntimeError):
    """No pinch placement satisfies the minimum-spacing constraint."""


@dataclass(frozen=True)
class SearchResult:
    best_pinch: PinchConfiguration
    best_value: float
    evaluations: int
    tau: float
    best_indices: tuple[int, ...] = ()
    trace: tuple[float, ...] = ()  # objective after each improvement step

    @property
    def estimated_time_s(self) -> float:
        return self.evaluations * self.tau


def time_estimate(evaluations: int, tau: float) -> float:
    """Arithmetic runtime estimate [s] at tau seconds per evaluation."""
    if tau <= 0:
        raise ValueError("tau must be > 0")
    return evaluations * tau


def format_duration(seconds: float) -> str:
    """Human-scale rendering: ms / s / min / h / yr with one-step rounding."""
    if seconds < 0.01:
        return f"{seconds * 1e3:.0f} ms"
    if seconds < 60.0:
        return f"{seconds:.2f} s"
    if seconds < 3600.0:
        return f"{seconds / 60.0:.1f} min"
    if seconds < _SECONDS_PER_YEAR:
        return f"{seconds / 3600.0:.1f} h"
    return f"{seconds / _SECONDS_PER_YEAR:.1f} yr"


def sum_rate_objective(
    config: ScenarioConfig,
    power: PowerAllocation | None = None,
    assignment: dict[int, int] | None = None,
) -> Objective:
    def objective(pinch: PinchConfiguration) -> float:
        return evaluate(config, pinch, power, assignment).sum_rate

    return objective


def min_rate_objective(
    config: ScenarioConfig,
    power: PowerAllocation | None = None,
    assignment: dict[int, int] | None = None,
) -> Objective:
    def objective(pinch: PinchConfiguration) -> float:
        return evaluate(config, pinch, power, assignment).min_rate

    return objective


def _grids(config: ScenarioConfig) -> list[np.ndarray]:
    return [candidate_positions(w) for w in config.waveguides]


def _pinch_from_indices(grids: Sequence[np.ndarray], indices: Sequence[int]) -> PinchConfiguration:
    return PinchConfiguration.one_per_waveguide([float(g[i]) for g, i in zip(grids, indices)])


def random_configuration(config: ScenarioConfig, rng: np.random.Generator) -> PinchConfiguration:
    """One active pinch per guide at a uniformly drawn grid index."""
    grids = _grids(config)
    indices = [int(rng.integers(0, len(g))) for g in grids]
    return _pinch_from_indices(grids, indices)


def brute_force(
    config: ScenarioConfig,
    objective: Objective,
    tau: float = DEFAULT_TAU,
    budget_cap: int = DEFAULT_BUDGET_CAP,
) -> SearchResult:
    """Exhaustive search over all N^K joint activations, one pinch per guide.

    Global optimum with lexicographic tie-break on the index vector;
    evaluations equal N^K exactly.
    """
    grids = _grids(config)
    total = math.prod(len(g) for g in grids)
    if total > budget_cap:
        raise SearchBudgetError(f"{total} evaluations exceed the cap of {budget_cap}")

    best_value = -math.inf
    best_indices: tuple[int, ...] = ()
    evaluations = 0
    for indices in itertools.product(*(range(len(g)) for g in grids)):
        value = objective(_pinch_from_indices(grids, indices))
        evaluations += 1
        if value > best_value:
            best_value = value
            best_indices = indices
    return SearchResult(
        best_pinch=_pinch_from_indices(grids, best_indices),
        best_value=best_value,
        evaluations=evaluations,
        tau=tau,
        best_indices=best_indices,
    )


def coordinate_grid(
    config: ScenarioConfig,
    objective: Objective,
    passes: int = 3,
    tau: float = DEFAULT_TAU,
    start_indices: Sequence[int] | None = None,
) -> SearchResult:
    """Cyclic one-guide-at-a-time sweeps; P full passes cost exactly P*K*N.

    Each sweep re-evaluates all candidates of one guide (current position
    included), so the objective never decreases across sweeps.
    """
    if passes < 1:
        raise ValueError("passes must be >= 1")
    grids = _grids(config)
    indices = list(start_indices) if start_indices is not None else [0] * len(grids)
    current = -math.inf
    evaluations = 0
    trace: list[float] = []
    for _ in range(passes):
        for k in range(len(grids)):
            best_j = indices[k]
            best_value = -math.inf
            for j in range(len(grids[k])):
                trial = list(indices)
                trial[k] = j
                value = objective(_pinch_from_indices(grids, trial))
                evaluations += 1
                if value > best_value:
                    best_value = value
                    best_j = j
            indices[k] = best_j
            current = best_value
            trace.append(current)
    return SearchResult(
        best_pinch=_pinch_from_indices(grids, indices),
        best_value=current,
        evaluations=evaluations,
        tau=tau,
        best_indices=tuple(indices),
        trace=tuple(trace),
    )


def complexity_table(tau: float = DEFAULT_TAU) -> list[dict]:
    """Benchmark rows comparing search and learning evaluation counts."""
    rows: list[dict] = []
    for n, k in ((20, 6), (30, 4), (30, 8)):
        rows.append(
            {
                "method": "brute_force",
                "N": n,
                "K": k,
                "passes": "",
                "evaluations": n**k,
                "est_time_seconds": time_estimate(n**k, tau),
            }
        )
    n, k, p = 20, 6, 3
    rows.append(
        {
            "method": "coordinate_grid",
            "N": n,
            "K": k,
            "passes": p,
            "evaluations": p * k * n,
            "est_time_seconds": time_estimate(p * k * n, tau),
        }
    )
    rows.append(
        {
            "method": "deep_learning",
            "N": "",
            "K": "",
            "passes": "",
            "evaluations": 1,
            "est_time_seconds": time_estimate(1, tau),
        }
    )
    return rows


# ---------------------------------------------------------------------------
# Alternating position / power optimization (energy-efficiency objective)
# ---------------------------------------------------------------------------


def default_power_levels(config: ScenarioConfig, num_levels: int = 8) -> list[list[float]]:
    """Per-guide uniform levels in (0, tx_power]."""
    return [
        [w.tx_power * (i + 1) / num_levels for i in range(num_levels)] for w in config.waveguides
    ]


def _spaced_initial_indices(grid: np.ndarray, count: int, spacing: float) -> list[int]:
    chosen: list[int] = []
    last = -math.inf
    for j, s in enumerate(grid):
        if s - last >= spacing - 1e-12:
            chosen.append(j)
            last = s
            if len(chosen) == count:
                return chosen
    raise SpacingInfeasibleError(
        f"cannot place {count} pinches at spacing {spacing} on a grid of {len(grid)}"
    )


@dataclass(frozen=True)
class JointSearchResult:
    best_pinch: PinchConfiguration
    best_levels: tuple[float, ...]  # per-guide power [W]
    best_value: float  # energy efficiency
    evaluations: int
    tau: float
    trace: tuple[float, ...]  # EE after every half-step

    @property
    def estimated_time_s(self) -> float:
        return self.evaluations * self.tau


def alternating_joint(
    config: ScenarioConfig,
    power_levels: list[list[float]] | None = None,
    pas_per_waveguide: int = 1,
    max_rounds: int = 20,
    rel_tol: float = 1e-6,
    tau: float = DEFAULT_TAU,
    budget_cap: int = DEFAULT_BUDGET_CAP,
) -> JointSearchResult:
    """Alternate pinch-position sweeps and power-level sweeps on energy efficiency.

    Positions move one pinch at a time over spacing-feasible candidates;
    the power step enumerates the per-guide level grid exhaustively. Both
    half-steps keep the incumbent in their candidate sets, so the
    efficiency trace is non-decreasing; iteration stops once a full round
    improves it by less than ``rel_tol`` or after ``max_rounds``.
    """
    if power_levels is None:
        power_levels = default_power_levels(config)
    if any(len(levels) == 0 for levels in power_levels):
        raise ValueError("every waveguide needs at least one power level")
    grids = _grids(config)
    spacing = config.spacing
    assignment = default_assignment(config)

    placements = []
    for grid in grids:
        idx = _spaced_initial_indices(grid, pas_per_waveguide, spacing)
        placements.append([int(i) for i in idx])

    level_idx = [len(levels) - 1 for levels in power_levels]  # start at full power

    evaluations = 0

    def build_pinch() -> PinchConfiguration:
        return PinchConfiguration(
            tuple(
                tuple(PinchElement(float(grids[k][j]), True) for j in placements[k])
                for k in range(len(grids))
            )
        )

    def ee(pinch: PinchConfiguration, lvl_idx: Sequence[int]) -> float:
        nonlocal evaluations
        levels = {k: power_levels[k][i] for k, i in enumerate(lvl_idx)}
        power = PowerAllocation.from_waveguide_levels(config, levels, assignment)
        evaluations += 1
        return evaluate(config, pinch, power, assignment).energy_efficiency

    current = ee(build_pinch(), level_idx)
    trace: list[float] = [current]

    for _ in range(max_rounds):
        round_start = current

        # Half-step 1: sweep each pinch coordinate with powers fixed.
        for k in range(len(grids)):
            for slot in range(len(placements[k])):
                others = [grids[k][j] for t, j in enumerate(placements[k]) if t != slot]
                best_j = placements[k][slot]
                best_value = -math.inf
                for j in range(len(grids[k])):
                    s = float(grids[k][j])
                    if any(abs(s - o) < spacing - 1e-12 for o in others):
                        continue
                    trial = [row[:] for row in placements]
                    trial[k][slot] = j
                    pinch = PinchConfiguration(
                        tuple(
                            tuple(PinchElement(float(grids[kk][jj]), True) for jj in trial[kk])
                            for kk in range(len(grids))
                        )
                    )
                    value = ee(pinch, level_idx)
                    if value > best_value:
                        best_value = value
                        best_j = j
                if best_value == -math.inf:
                    raise SpacingInfeasibleError("no spacing-feasible candidate for a pinch")
                placements[k][slot] = best_j
                current = best_value
        trace.append(current)

        # Half-step 2: exhaustive sweep over the per-guide power-level grid.
        combos = math.prod(len(levels) for levels in power_levels)
        if combos > budget_cap:
            raise SearchBudgetError(f"{combos} power combinations exceed the cap of {budget_cap}")
        pinch = build_pinch()
        best_value = -math.inf
        best_combo = tuple(level_idx)
        for combo in itertools.product(*(range(len(levels)) for levels in power_levels)):
            value = ee(pinch, combo)
            if value > best_value:
                best_value = value
                best_combo = combo
        level_idx = list(best_combo)
        current = best_value
        trace.append(current)

        if current - round_start < rel_tol * max(1.0, abs(round_start)):
            break

    return JointSearchResult(
        best_pinch=build_pinch(),
        best_levels=tuple(power_levels[k][i] for k, i in enumerate(level_idx)),
        best_value=current,
        evaluations=evaluations,
        tau=tau,
        trace=tuple(trace),
    )
