"""Command-line entry point.

Every subcommand takes a single --seed that feeds labeled RNG streams,
writes tidy CSVs into --out, and records a manifest there. Exit codes:
0 success, 1 configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

import numpy as np

from .. import __version__
from ..agents import (
    AgentConfig,
    make_env,
    sample_instances,
    train_ddpg,
    train_dqn,
    train_madqn,
    train_maddpg,
    train_supervised_positioner,
)
from ..agents.dqn import evaluate_greedy
from ..agents.ddpg import evaluate_policy
from ..edgeai import (
    AirCompConfig,
    FlConfig,
    FlScheme,
    HotspotPolicy,
    TrackingMode,
    aircomp_with_pa,
    fl_run,
    hotspot_schedule,
    mobility_track,
)
from ..presets import scenario_preset
from ..rates import evaluate
from ..scenario import (
    PinchConfiguration,
    Point3,
    ScenarioConfig,
    ScenarioError,
    load_scenario,
    validate,
)
from ..search import (
    alternating_joint,
    brute_force,
    complexity_table,
    coordinate_grid,
    sum_rate_objective,
)
from .csvio import write_csv
from .manifest import RunManifest


class ConfigError(Exception):
    """User-facing configuration problem (exit code 1)."""


def _load_config(args) -> ScenarioConfig:
    if getattr(args, "config", None):
        try:
            config = load_scenario(args.config)
        except (OSError, ScenarioError, ValueError) as exc:
            raise ConfigError(f"cannot load {args.config}: {exc}") from exc
    elif getattr(args, "scenario", None):
        try:
            config = scenario_preset(args.scenario, seed=args.seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        raise ConfigError("provide --config or --scenario")
    violations = validate(config)
    if violations:
        raise ConfigError("; ".join(str(v) for v in violations))
    return config


def _midgrid_pinch(config: ScenarioConfig) -> PinchConfiguration:
    return PinchConfiguration.one_per_waveguide([0.5 * w.length for w in config.waveguides])


# -- subcommands ----------------------------------------------------------------


def cmd_validate(args, manifest: RunManifest) -> int:
    if not args.config:
        raise ConfigError("validate requires --config")
    try:
        config = load_scenario(args.config)
    except (OSError, ScenarioError, ValueError) as exc:
        print(f"invalid scenario document: {exc}")
        return 1
    violations = validate(config)
    for v in violations:
        print(v)
    if violations:
        return 1
    print("ok")
    return 0


def cmd_simulate(args, manifest: RunManifest) -> int:
    config = _load_config(args)
    report = evaluate(config, _midgrid_pinch(config))
    rows = [
        {
            "user_id": uid,
            "rate_bits_per_hz": rate,
            "qos_violated": int(uid in report.qos_violations),
            "sum_rate": report.sum_rate,
            "min_rate": report.min_rate,
            "energy_efficiency": report.energy_efficiency,
        }
        for uid, rate in sorted(report.per_user_rate.items())
    ]
    out = Path(args.out) / "rates.csv"
    write_csv(
        out,
        ["user_id", "rate_bits_per_hz", "qos_violated", "sum_rate", "min_rate", "energy_efficiency"],
        rows,
    )
    manifest.add_output(out.name)
    if args.sweep:
        from ..scenario import candidate_positions

        sweep_rows = []
        for wi, w in enumerate(config.waveguides):
            base = [0.5 * g.length for g in config.waveguides]
            for s in candidate_positions(w):
                trial = list(base)
                trial[wi] = float(s)
                trial_report = evaluate(config, PinchConfiguration.one_per_waveguide(trial))
                for uid, rate in sorted(trial_report.per_user_rate.items()):
                    sweep_rows.append(
                        {
                            "waveguide": wi,
                            "position": float(s),
                            "user_id": uid,
                            "rate_bits_per_hz": rate,
                        }
                    )
        sweep_out = Path(args.out) / "rate_sweep.csv"
        write_csv(sweep_out, ["waveguide", "position", "user_id", "rate_bits_per_hz"], sweep_rows)
        manifest.add_output(sweep_out.name)
    print(f"sum rate {report.sum_rate:.4f} bit/s/Hz over {len(rows)} user(s) -> {out}")
    return 0


def cmd_optimize(args, manifest: RunManifest) -> int:
    config = _load_config(args)
    objective = sum_rate_objective(config)
    if args.method == "brute":
        result = brute_force(config, objective)
        positions = [float(p) for p in result.best_pinch.active_positions(0)]
        best_value, evaluations = result.best_value, result.evaluations
    elif args.method == "grid":
        result = coordinate_grid(config, objective, passes=args.passes)
        best_value, evaluations = result.best_value, result.evaluations
    else:
        joint = alternating_joint(config)
        best_value, evaluations = joint.best_value, joint.evaluations
        result = joint
    rows = [
        {
            "method": args.method,
            "evaluations": evaluations,
            "est_time_seconds": result.estimated_time_s,
            "best_value": best_value,
            "positions": " ".join(
                repr(float(s)) for s in _positions_of(result.best_pinch)
            ),
        }
    ]
    out = Path(args.out) / "search.csv"
    write_csv(out, ["method", "evaluations", "est_time_seconds", "best_value", "positions"], rows)
    manifest.add_output(out.name)
    print(f"{args.method}: best {best_value:.6f} after {evaluations} evaluations -> {out}")
    return 0


def _positions_of(pinch: PinchConfiguration) -> list[float]:
    return [e.s for row in pinch.placements for e in row if e.active]


def cmd_benchmark(args, manifest: RunManifest) -> int:
    rows = complexity_table(tau=args.tau)
    out = Path(args.out) / "complexity.csv"
    write_csv(out, ["method", "N", "K", "passes", "evaluations", "est_time_seconds"], rows)
    manifest.add_output(out.name)
    print(f"{len(rows)} rows -> {out}")
    return 0


def cmd_train(args, manifest: RunManifest) -> int:
    scenario = args.scenario
    if scenario is None:
        raise ConfigError("train requires --scenario {a..f}")
    out = Path(args.out)
    rows: list[dict] = []
    checkpoint = out / "model.json"

    if scenario == "a":
        config = scenario_preset("a", seed=args.seed)
        dataset = sample_instances(config, args.instances, seed=args.seed)
        result = train_supervised_positioner(config, dataset, seed=args.seed)
        rows.append(
            {
                "episode": args.instances,
                "mean_reward": math.nan,
                "eval_rate": math.nan,
                "oracle_ratio": result.median_rate_ratio,
            }
        )
        result.model.save(checkpoint)
    elif scenario == "d":
        config = scenario_preset("d", seed=args.seed)
        joint = alternating_joint(config)
        for i, ee in enumerate(joint.trace):
            rows.append(
                {"episode": i, "mean_reward": ee, "eval_rate": math.nan, "oracle_ratio": math.nan}
            )
        print(f"alternating search: EE {joint.best_value:.6f}, levels {joint.best_levels}")
    else:
        env = make_env(scenario, seed=args.seed, randomize_start=scenario in ("c", "f"))
        cfg = AgentConfig(seed=args.seed, episodes=args.episodes, eval_every=args.eval_every)
        oracle = math.nan
        if not env.continuous and env.joint_action_size <= 4096:
            env.reset(episode=0)
            _, oracle = env.best_joint_action()
        if scenario == "b":
            result = train_dqn(env, cfg)
            eval_fn = lambda: evaluate_greedy(env, result.policy)  # noqa: E731
            result.model.save(checkpoint)
        elif scenario == "e":
            result = train_madqn(env, cfg)
            eval_fn = lambda: evaluate_greedy(env, result.policy)  # noqa: E731
            result.models[0].save(checkpoint)
        elif scenario == "c":
            result = train_ddpg(env, cfg)
            eval_fn = lambda: evaluate_policy(env, result)  # noqa: E731
            result.actors[0].save(checkpoint)
        else:  # f
            result = train_maddpg(env, cfg)
            eval_fn = lambda: evaluate_policy(env, result)  # noqa: E731
            result.actors[0].save(checkpoint)
        env.randomize_start = False
        final_eval = eval_fn()
        for log in result.trace:
            rows.append(
                {
                    "episode": log.episode,
                    "mean_reward": log.mean_reward,
                    "eval_rate": log.eval_reward,
                    "oracle_ratio": (
                        log.eval_reward / oracle
                        if math.isfinite(oracle) and math.isfinite(log.eval_reward) and oracle > 0
                        else math.nan
                    ),
                }
            )
        print(f"scenario {scenario}: final greedy value {final_eval:.4f} (oracle {oracle})")

    curve = out / "learning_curve.csv"
    write_csv(curve, ["episode", "mean_reward", "eval_rate", "oracle_ratio"], rows)
    manifest.add_output(curve.name)
    if checkpoint.exists():
        manifest.add_output(checkpoint.name)
    return 0


def cmd_fl(args, manifest: RunManifest) -> int:
    config = FlConfig()
    schemes = [FlScheme(args.scheme)] if args.scheme != "all" else list(FlScheme)
    rows = []
    for scheme in schemes:
        result = fl_run(config, scheme, rounds=args.rounds, seed=args.seed)
        for log in result.logs:
            rows.append(
                {
                    "round": log.round_index,
                    "scheme": scheme.value,
                    "seed": args.seed,
                    "accuracy": log.accuracy,
                    "round_seconds": log.round_seconds,
                    "dropped": len(log.dropped),
                    "rescued": len(log.rescued),
                }
            )
        print(f"{scheme.value}: final accuracy {result.final_accuracy:.4f}")
    out = Path(args.out) / "fl.csv"
    write_csv(out, ["round", "scheme", "seed", "accuracy", "round_seconds", "dropped", "rescued"], rows)
    manifest.add_output(out.name)
    return 0


def _default_aircomp_config() -> AirCompConfig:
    from ..edgeai.fl import default_fl_scenario

    scenario = default_fl_scenario()
    ring = [
        Point3(5.0 + 2.6 * math.cos(a), 5.0 + 2.6 * math.sin(a), 0.8)
        for a in np.linspace(0, 2 * math.pi, 6, endpoint=False)
    ]
    shadowed = [Point3(1.2, 1.2, 0.8), Point3(7.5, 1.0, 0.8)]
    return AirCompConfig(scenario=scenario, device_positions=tuple(ring + shadowed))


def cmd_aircomp(args, manifest: RunManifest) -> int:
    comparison = aircomp_with_pa(_default_aircomp_config(), seed=args.seed)
    rows = [
        {"scheme": "NO_PA", "mse": comparison.mse_no_pa, "position": ""},
        {"scheme": "OPTIMIZED_PA", "mse": comparison.mse_optimized, "position": comparison.best_position},
    ]
    out = Path(args.out) / "aircomp.csv"
    write_csv(out, ["scheme", "mse", "position"], rows)
    manifest.add_output(out.name)
    print(
        f"aggregation MSE {comparison.mse_no_pa:.6e} -> {comparison.mse_optimized:.6e} "
        f"(pinch at s = {comparison.best_position:.2f} m)"
    )
    return 0


def cmd_hotspot(args, manifest: RunManifest) -> int:
    config = scenario_preset("b", seed=args.seed)
    config = dataclasses.replace(config, obstacles=())
    slots = args.slots
    traffic = np.ones((slots, len(config.users)))
    traffic[slots // 2 :, 0] = 0.1
    traffic[slots // 2 :, 1] = 3.0
    rows = []
    for policy in (HotspotPolicy.STATIC, HotspotPolicy.ADAPTIVE):
        result = hotspot_schedule(config, traffic, policy)
        for log in result.slots:
            rows.append(
                {
                    "slot": log.slot,
                    "policy": policy.value,
                    "position": log.position,
                    "weighted_min_rate": log.weighted_min_rate,
                    "served_load": log.served_load,
                }
            )
    out = Path(args.out) / "hotspot.csv"
    write_csv(out, ["slot", "policy", "position", "weighted_min_rate", "served_load"], rows)
    manifest.add_output(out.name)
    print(f"{slots} slots x 2 policies -> {out}")
    return 0


def cmd_mobility(args, manifest: RunManifest) -> int:
    # Preset walk plus a pillar that shadows the mid-guide activation.
    config = scenario_preset("c", seed=args.seed)
    config = dataclasses.replace(config, obstacles=(_pillar(),))
    rows = []
    for mode in (TrackingMode.NONE, TrackingMode.GRID):
        report = mobility_track(config, ticks=args.ticks, mode=mode, outage_rate=args.outage_rate)
        for tick in report.ticks:
            rows.append(
                {
                    "tick": tick.tick,
                    "mode": mode.value,
                    "serving": tick.serving,
                    "rate_bits_per_hz": tick.rate,
                    "outage": int(tick.outage),
                }
            )
        print(
            f"{mode.value}: outage {report.outage_fraction:.2f}, handovers {report.handovers}, "
            f"staleness {report.staleness}"
        )
    out = Path(args.out) / "mobility.csv"
    write_csv(out, ["tick", "mode", "serving", "rate_bits_per_hz", "outage"], rows)
    manifest.add_output(out.name)
    return 0


def _pillar():
    from ..scenario import Obstacle

    return Obstacle(Point3(4.5, 4.3, 0.0), Point3(5.5, 4.7, 3.0))


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pinchsim",
        description="Pinching-antenna placement search, learning agents, and edge-AI co-simulations.",
    )
    parser.add_argument("--version", action="version", version=f"pinchsim {__version__}")
    sub = parser.add_subparsers(dest="command")

    def common(p, needs_scenario=False):
        p.add_argument("--config", type=str, default=None, help="scenario JSON document")
        p.add_argument("--seed", type=int, default=0, help="root seed for all RNG streams")
        p.add_argument("--out", type=str, default="out", help="output directory")
        p.add_argument(
            "--scenario",
            type=str,
            default=None,
            help="built-in scenario preset (a..f)" if needs_scenario else argparse.SUPPRESS,
        )

    p = sub.add_parser("validate", help="check a scenario document against every invariant")
    common(p)

    p = sub.add_parser("simulate", help="evaluate rates for a mid-grid activation")
    common(p, needs_scenario=True)
    p.add_argument("--sweep", action="store_true", help="also emit per-position rate sweep")

    p = sub.add_parser("optimize", help="search activation positions")
    common(p, needs_scenario=True)
    p.add_argument("--method", choices=["brute", "grid", "alternating"], default="brute")
    p.add_argument("--passes", type=int, default=3)

    p = sub.add_parser("benchmark", help="emit the search-complexity comparison table")
    common(p)
    p.add_argument("--tau", type=float, default=1e-3, help="seconds per evaluation")

    p = sub.add_parser("train", help="train a learning agent on a scenario")
    common(p, needs_scenario=True)
    p.add_argument("--episodes", type=int, default=300)
    p.add_argument("--eval-every", type=int, default=25)
    p.add_argument("--instances", type=int, default=500, help="labeled instances (scenario a)")

    p = sub.add_parser("fl", help="federated-learning co-simulation")
    common(p)
    p.add_argument("--rounds", type=int, default=20)
    p.add_argument("--scheme", choices=["all"] + [s.value for s in FlScheme], default="all")

    p = sub.add_parser("aircomp", help="over-the-air aggregation comparison")
    common(p)

    p = sub.add_parser("hotspot", help="demand-aware scheduling comparison")
    common(p)
    p.add_argument("--slots", type=int, default=12)

    p = sub.add_parser("mobility", help="connectivity tracking for a moving device")
    common(p)
    p.add_argument("--ticks", type=int, default=20)
    p.add_argument("--outage-rate", type=float, default=2.0)

    return parser


HANDLERS = {
    "validate": cmd_validate,
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "benchmark": cmd_benchmark,
    "train": cmd_train,
    "fl": cmd_fl,
    "aircomp": cmd_aircomp,
    "hotspot": cmd_hotspot,
    "mobility": cmd_mobility,
}


def cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract wants 1.
        return 0 if exc.code in (0, None) else 1
    if args.command is None:
        parser.print_usage()
        return 1

    manifest = RunManifest(
        command=args.command,
        config_path=getattr(args, "config", None),
        seed=getattr(args, "seed", 0),
        code_version=__version__,
        out_dir=getattr(args, "out", "out"),
    )
    manifest.write()
    try:
        code = HANDLERS[args.command](args, manifest)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        manifest.finalize("config_error")
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        manifest.finalize("failed")
        return 2
    manifest.finalize("ok" if code == 0 else "config_error")
    return code


def main() -> None:
    sys.exit(cli())
