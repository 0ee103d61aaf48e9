import dataclasses
import math

import numpy as np
import pytest

from pinchsim.propagation import compute_link_state, los_blocked, pa_point
from pinchsim.rates import (
    PowerAllocation,
    default_assignment,
    evaluate,
    multi_waveguide_sinr,
    noma_rates,
    oma_rate,
)
from pinchsim.scenario import (
    AccessMode,
    Obstacle,
    PinchConfiguration,
    Point3,
    User,
    candidate_positions,
)

from conftest import make_config


class TestOmaRate:
    def test_unit_snr_is_one_bit(self):
        assert oma_rate(1.0, 1.0, 1.0) == pytest.approx(1.0)

    def test_zero_power_zero_rate(self):
        assert oma_rate(0.5, 0.0, 1e-9) == 0.0

    def test_snr_three_is_two_bits(self):
        assert oma_rate(3.0, 1.0, 1.0) == pytest.approx(2.0)

    def test_monotone_in_gain(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            g1, g2 = sorted(rng.uniform(0, 10, 2))
            p = rng.uniform(0, 5)
            assert oma_rate(g1, p, 1e-3) <= oma_rate(g2, p, 1e-3)


def _noma_oracle(g1, g2, p1, p2, noise):
    """Try both decode orders by brute force; each message must be decodable
    at every receiver that needs it. Returns the best (sum_rate, rates)."""
    best = None
    for strong, weak in ((1, 2), (2, 1)):
        gs, ps = (g1, p1) if strong == 1 else (g2, p2)
        gw, pw = (g1, p1) if weak == 1 else (g2, p2)
        rate_strong = math.log2(1.0 + ps * gs / noise)
        weak_msg_at_weak = math.log2(1.0 + pw * gw / (ps * gw + noise))
        weak_msg_at_strong = math.log2(1.0 + pw * gs / (ps * gs + noise))
        rate_weak = min(weak_msg_at_weak, weak_msg_at_strong)
        rates = {strong: rate_strong, weak: rate_weak}
        total = rate_strong + rate_weak
        if best is None or total > best[0]:
            best = (total, rates)
    return best


class TestNomaRates:
    def test_equal_gain_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            g = rng.uniform(1e-6, 10.0)
            p1, p2 = rng.uniform(0.0, 5.0, 2)
            noise = rng.uniform(1e-6, 1.0)
            r1, r2, _ = noma_rates(g, g, p1, p2, noise)
            expected = math.log2(1.0 + (p1 + p2) * g / noise)
            assert r1 + r2 == pytest.approx(expected, rel=1e-12)

    def test_dead_link_reduces_to_oma(self):
        r1, r2, order = noma_rates(2.0, 0.0, 1.0, 1.0, 1e-3)
        assert r2 == 0.0
        assert r1 == pytest.approx(oma_rate(2.0, 1.0, 1e-3), rel=1e-12)
        assert order == (1, 2)

    def test_swapped_gains_permute_roles(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            g1, g2 = rng.uniform(0.1, 5.0, 2)
            p1, p2 = rng.uniform(0.1, 2.0, 2)
            noise = 1e-2
            r1, r2, order = noma_rates(g1, g2, p1, p2, noise)
            s1, s2, sorder = noma_rates(g2, g1, p2, p1, noise)
            assert r1 == pytest.approx(s2, rel=1e-12)
            assert r2 == pytest.approx(s1, rel=1e-12)
            # Brute-force oracle: the chosen order maximizes the sum rate
            # subject to both receivers decoding the weak message.
            best_total, best_rates = _noma_oracle(g1, g2, p1, p2, noise)
            assert r1 + r2 == pytest.approx(best_total, rel=1e-12)
            assert r1 == pytest.approx(best_rates[1], rel=1e-12)

    def test_tie_breaks_to_lower_id(self):
        _, _, order = noma_rates(1.0, 1.0, 0.5, 0.5, 1e-3)
        assert order == (1, 2)


class TestMultiWaveguideSinr:
    def test_single_waveguide_is_pure_snr(self, simple_config):
        pinch = PinchConfiguration.one_per_waveguide([5.0])
        assignment = default_assignment(simple_config)
        power = PowerAllocation.even_split(simple_config, assignment)
        sinr = multi_waveguide_sinr(simple_config, pinch, assignment, power)
        links = compute_link_state(simple_config, pinch)
        uid = simple_config.users[0].id
        expected = power.per_user[uid] * links.gain(0, 0) / simple_config.radio.noise_power
        assert sinr[uid] == pytest.approx(expected, rel=1e-12)

    def test_blocked_interferer_restores_snr(self):
        config = make_config(num_waveguides=2, num_users=2, mode=AccessMode.MULTI_WAVEGUIDE)
        pinch = PinchConfiguration.one_per_waveguide([5.0, 5.0])
        assignment = default_assignment(config)
        power = PowerAllocation.even_split(config, assignment)
        base = multi_waveguide_sinr(config, pinch, assignment, power)

        # Wall between the two guide lanes blocks every cross link.
        wall = Obstacle(Point3(0.0, 4.9, 0.0), Point3(10.0, 5.1, 3.0))
        blocked_config = dataclasses.replace(config, obstacles=(wall,))
        sinr = multi_waveguide_sinr(blocked_config, pinch, assignment, power)
        links = compute_link_state(blocked_config, pinch)
        for ui, user in enumerate(config.users):
            own = assignment[user.id]
            expected = power.per_user[user.id] * links.gain(ui, own) / config.radio.noise_power
            assert sinr[user.id] == pytest.approx(expected, rel=1e-12)
            assert sinr[user.id] >= base[user.id]

    def test_mirror_symmetric_geometry_gives_equal_sinrs(self):
        config = make_config(num_waveguides=2, num_users=2, mode=AccessMode.MULTI_WAVEGUIDE)
        # Mirror users about the y = 5 plane, each under its own guide.
        users = (
            User(id=0, position=Point3(5.0, 2.0, 0.8)),
            User(id=1, position=Point3(5.0, 8.0, 0.8)),
        )
        config = dataclasses.replace(config, users=users)
        pinch = PinchConfiguration.one_per_waveguide([5.0, 5.0])
        assignment = default_assignment(config)
        power = PowerAllocation.even_split(config, assignment)
        sinr = multi_waveguide_sinr(config, pinch, assignment, power)
        assert sinr[0] == pytest.approx(sinr[1], rel=1e-9)

    def test_unassigned_user_raises(self, simple_config):
        pinch = PinchConfiguration.one_per_waveguide([5.0])
        power = PowerAllocation({0: 1.0})
        with pytest.raises(ValueError, match="assignment"):
            multi_waveguide_sinr(simple_config, pinch, {}, power)


class TestEvaluate:
    def test_zero_power_zero_rates_zero_ee(self, simple_config):
        pinch = PinchConfiguration.one_per_waveguide([5.0])
        power = PowerAllocation({0: 0.0})
        report = evaluate(simple_config, pinch, power)
        assert report.sum_rate == 0.0
        assert report.energy_efficiency == 0.0
        assert all(r == 0.0 for r in report.per_user_rate.values())

    def test_overhead_pinch_beats_every_other_grid_point(self, simple_config):
        # Brute force over the candidate grid: the pinch right above the
        # user (s = 5 on this grid) must win strictly.
        grid = candidate_positions(simple_config.waveguides[0])
        best_s, best_rate = None, -1.0
        for s in grid:
            report = evaluate(simple_config, PinchConfiguration.one_per_waveguide([float(s)]))
            if report.sum_rate > best_rate:
                best_rate = report.sum_rate
                best_s = float(s)
        assert best_s == 5.0
        others = [
            evaluate(simple_config, PinchConfiguration.one_per_waveguide([float(s)])).sum_rate
            for s in grid
            if float(s) != 5.0
        ]
        assert all(best_rate > r for r in others)

    def test_qos_list_matches_definition(self):
        config = make_config(
            users=(
                User(id=0, position=Point3(5.0, 5.0, 0.8), qos_min_rate=1e9),
                User(id=1, position=Point3(2.0, 5.0, 0.8), qos_min_rate=0.0),
            )
        )
        report = evaluate(config, PinchConfiguration.one_per_waveguide([5.0]))
        assert report.qos_violations == (0,)

    def test_deterministic_reports(self, simple_config):
        pinch = PinchConfiguration.one_per_waveguide([2.5])
        a = evaluate(simple_config, pinch)
        b = evaluate(simple_config, pinch)
        assert a == b

    def test_noma_mode_two_users(self):
        config = make_config(
            num_users=2,
            mode=AccessMode.NOMA,
            users=(
                User(id=0, position=Point3(4.0, 5.0, 0.8)),
                User(id=1, position=Point3(8.0, 5.0, 0.8)),
            ),
        )
        pinch = PinchConfiguration.one_per_waveguide([5.0])
        report = evaluate(config, pinch)
        links = compute_link_state(config, pinch)
        power = PowerAllocation.even_split(config, default_assignment(config))
        r0, r1, _ = noma_rates(
            links.gain(0, 0), links.gain(1, 0), power.per_user[0], power.per_user[1],
            config.radio.noise_power,
        )
        assert report.per_user_rate[0] == pytest.approx(r0, rel=1e-12)
        assert report.per_user_rate[1] == pytest.approx(r1, rel=1e-12)
        assert 0 in report.sic_orders

    def test_power_budget_enforced(self, simple_config):
        pinch = PinchConfiguration.one_per_waveguide([5.0])
        power = PowerAllocation({0: 2.0})  # budget is 1 W
        with pytest.raises(ValueError, match="budget"):
            evaluate(simple_config, pinch, power)

    def test_ee_denominator_includes_circuit_power(self, simple_config):
        pinch = PinchConfiguration.one_per_waveguide([5.0])
        report = evaluate(simple_config, pinch)
        assert report.energy_efficiency == pytest.approx(
            report.sum_rate / (1.0 + simple_config.p_circuit), rel=1e-12
        )


class TestInterferenceSuppression:
    def test_blocking_cross_paths_never_hurts(self):
        # Randomized geometries; the obstacle is shrunk until it misses
        # every serving path, then SINRs must not decrease (hard block).
        rng = np.random.default_rng(42)
        checked = 0
        for _ in range(100):
            config = make_config(num_waveguides=2, num_users=2, mode=AccessMode.MULTI_WAVEGUIDE)
            users = tuple(
                User(id=i, position=Point3(rng.uniform(1, 9), rng.uniform(1, 9), 0.8))
                for i in range(2)
            )
            config = dataclasses.replace(config, users=users)
            pinch = PinchConfiguration.one_per_waveguide(
                [float(rng.choice(candidate_positions(w))) for w in config.waveguides]
            )
            assignment = default_assignment(config)
            power = PowerAllocation.even_split(config, assignment)
            base = multi_waveguide_sinr(config, pinch, assignment, power)

            serving_segments = []
            cross_points = []
            for ui, user in enumerate(config.users):
                for wi, w in enumerate(config.waveguides):
                    s = pinch.active_positions(wi)[0]
                    seg = (pa_point(w, s), user.position)
                    if assignment[user.id] == wi:
                        serving_segments.append(seg)
                    else:
                        a, b = seg
                        cross_points.append(
                            Point3(0.5 * (a.x + b.x), 0.5 * (a.y + b.y), 0.5 * (a.z + b.z))
                        )
            center = cross_points[int(rng.integers(len(cross_points)))]
            half = 0.5
            box = None
            for _ in range(40):
                cand = Obstacle(
                    Point3(center.x - half, center.y - half, center.z - half),
                    Point3(center.x + half, center.y + half, center.z + half),
                )
                if not any(los_blocked(a, b, [cand]) for a, b in serving_segments):
                    box = cand
                    break
                half *= 0.5
            if box is None:
                continue
            blocked_config = dataclasses.replace(config, obstacles=(box,))
            after = multi_waveguide_sinr(blocked_config, pinch, assignment, power)
            for uid in after:
                assert after[uid] >= base[uid]
            checked += 1
        assert checked >= 90
