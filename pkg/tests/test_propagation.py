import math

import numpy as np
import pytest

from pinchsim.propagation import (
    channel_coeff,
    compute_link_state,
    effective_gain,
    los_blocked,
    pa_point,
)
from pinchsim.scenario import (
    C_LIGHT,
    Obstacle,
    PinchConfiguration,
    PinchElement,
    Point3,
    RadioConstants,
    Waveguide,
)

from conftest import make_config

WG = Waveguide(0, Point3(0, 0, 3), Point3(1, 0, 0), 10.0, 5, 1.0)

# eta = 1 and lambda = 1 m keep the coefficient arithmetic legible.
UNIT_RADIO = RadioConstants(frequency=C_LIGHT, n_eff=1.0, eta=1.0, noise_power=1e-9)


class TestPaPoint:
    def test_affine(self):
        assert pa_point(WG, 2.0) == Point3(2.0, 0.0, 3.0)

    def test_feed_point(self):
        assert pa_point(WG, 0.0) == WG.feed

    def test_far_end(self):
        assert pa_point(WG, 10.0) == Point3(10.0, 0.0, 3.0)

    def test_out_of_range_raises(self):
        with pytest.raises(ValueError):
            pa_point(WG, 10.5)


class TestLosBlocked:
    def test_oblique_segment_through_box(self):
        # Hand-derived: between x = 2 and x = 3 the segment has z in
        # [1.2, 1.8] and y = 0, all inside the box.
        box = Obstacle(Point3(2, -1, 0), Point3(3, 1, 5))
        assert los_blocked(Point3(0, 0, 3), Point3(5, 0, 0), [box])

    def test_no_obstacles(self):
        assert not los_blocked(Point3(0, 0, 3), Point3(5, 0, 0), [])

    def test_endpoint_inside_box(self):
        box = Obstacle(Point3(4, -1, -1), Point3(6, 1, 1))
        assert los_blocked(Point3(0, 0, 3), Point3(5, 0, 0), [box])

    def test_endpoint_on_face_counts_as_blocked(self):
        box = Obstacle(Point3(5, -1, -1), Point3(6, 1, 1))
        assert los_blocked(Point3(0, 0, 0), Point3(5, 0, 0), [box])

    def test_segment_missing_box(self):
        box = Obstacle(Point3(2, 2, 0), Point3(3, 3, 5))
        assert not los_blocked(Point3(0, 0, 3), Point3(5, 0, 0), [box])

    def test_parallel_segment_outside_slab(self):
        box = Obstacle(Point3(2, 1, 0), Point3(3, 2, 5))
        assert not los_blocked(Point3(0, 0, 1), Point3(5, 0, 1), [box])


class TestChannelCoeff:
    def test_unit_distance_unit_magnitude(self):
        h = channel_coeff(Point3(0, 0, 1), 0.0, Point3(0, 0, 0), UNIT_RADIO)
        assert abs(h) == pytest.approx(1.0, rel=1e-12)

    def test_inverse_square_law(self):
        h1 = channel_coeff(Point3(0, 0, 1), 0.0, Point3(0, 0, 0), UNIT_RADIO)
        h2 = channel_coeff(Point3(0, 0, 2), 0.0, Point3(0, 0, 0), UNIT_RADIO)
        assert abs(h1) ** 2 / abs(h2) ** 2 == pytest.approx(4.0, rel=1e-12)

    def test_blocked_is_exactly_zero(self):
        box = Obstacle(Point3(-1, -1, 0.4), Point3(1, 1, 0.6))
        h = channel_coeff(Point3(0, 0, 1), 0.0, Point3(0, 0, 0), UNIT_RADIO, [box])
        assert h == 0.0

    def test_magnitude_strictly_decreasing_in_distance(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            d1, d2 = sorted(rng.uniform(0.5, 30.0, size=2))
            if d2 - d1 < 1e-9:
                continue
            h1 = channel_coeff(Point3(0, 0, d1), 1.3, Point3(0, 0, 0), UNIT_RADIO)
            h2 = channel_coeff(Point3(0, 0, d2), 1.3, Point3(0, 0, 0), UNIT_RADIO)
            assert abs(h1) > abs(h2)

    def test_phase_periodic_in_wavelength(self):
        d = 3.7
        h1 = channel_coeff(Point3(0, 0, d), 0.0, Point3(0, 0, 0), UNIT_RADIO)
        h2 = channel_coeff(Point3(0, 0, d + UNIT_RADIO.wavelength), 0.0, Point3(0, 0, 0), UNIT_RADIO)
        assert math.isclose(np.angle(h1), np.angle(h2), abs_tol=1e-9)

    def test_guide_phase_periodic_in_wavelength(self):
        period = UNIT_RADIO.wavelength / UNIT_RADIO.n_eff
        h1 = channel_coeff(Point3(0, 0, 2.0), 1.0, Point3(0, 0, 0), UNIT_RADIO)
        h2 = channel_coeff(Point3(0, 0, 2.0), 1.0 + period, Point3(0, 0, 0), UNIT_RADIO)
        assert math.isclose(np.angle(h1), np.angle(h2), abs_tol=1e-9)

    def test_adding_obstacle_never_increases_magnitude(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            pa = Point3(*rng.uniform(0, 10, 3))
            user = Point3(*rng.uniform(0, 10, 3))
            if pa.distance_to(user) < 1e-6:
                continue
            lo = rng.uniform(0, 9, 3)
            box = Obstacle(Point3(*lo), Point3(*(lo + rng.uniform(0.1, 2.0, 3))))
            h_free = channel_coeff(pa, 1.0, user, UNIT_RADIO)
            h_obst = channel_coeff(pa, 1.0, user, UNIT_RADIO, [box])
            assert abs(h_obst) <= abs(h_free)
            assert h_obst == h_free or h_obst == 0.0

    def test_in_guide_attenuation(self):
        radio = RadioConstants(frequency=C_LIGHT, n_eff=1.0, eta=1.0, attenuation_db_per_m=6.0, noise_power=1e-9)
        h = channel_coeff(Point3(0, 0, 1), 2.0, Point3(0, 0, 0), radio)
        assert abs(h) == pytest.approx(10 ** (-6.0 * 2.0 / 20.0), rel=1e-12)

    def test_coincident_points_raise(self):
        with pytest.raises(ValueError):
            channel_coeff(Point3(0, 0, 1), 0.0, Point3(0, 0, 1), UNIT_RADIO)


class TestEffectiveGain:
    def test_single_pinch_is_squared_magnitude(self):
        pinch = PinchConfiguration.one_per_waveguide([2.0])
        user = Point3(2.0, 0.0, 0.0)
        g = effective_gain(WG, pinch, 0, user, UNIT_RADIO)
        h = channel_coeff(pa_point(WG, 2.0), 2.0, user, UNIT_RADIO)
        assert g == pytest.approx(abs(h) ** 2, rel=1e-12)

    def test_two_identical_coefficients_double_the_gain(self):
        # Symmetric pinches at equal air distance; guide-phase difference is
        # 6 * 2pi at lambda = 1, n_eff = 1, so the coefficients coincide.
        pinch = PinchConfiguration(((PinchElement(2.0, True), PinchElement(8.0, True)),))
        user = Point3(5.0, 0.0, 0.0)
        h = channel_coeff(pa_point(WG, 2.0), 2.0, user, UNIT_RADIO)
        g = effective_gain(WG, pinch, 0, user, UNIT_RADIO)
        assert g == pytest.approx(2.0 * abs(h) ** 2, rel=1e-12)

    def test_opposite_coefficients_cancel(self):
        # Equal air distances but a 6.5-wavelength guide-path difference,
        # so the second coefficient is exactly -h: destructive symmetry.
        pinch = PinchConfiguration(((PinchElement(2.0, True), PinchElement(8.5, True)),))
        user = Point3(5.25, 0.0, 0.0)
        h1 = channel_coeff(pa_point(WG, 2.0), 2.0, user, UNIT_RADIO)
        h2 = channel_coeff(pa_point(WG, 8.5), 8.5, user, UNIT_RADIO)
        assert h2 == pytest.approx(-h1, rel=1e-9)
        g = effective_gain(WG, pinch, 0, user, UNIT_RADIO)
        assert g < 1e-20

    def test_permutation_invariance(self):
        a = PinchConfiguration(((PinchElement(1.0, True), PinchElement(7.0, True)),))
        b = PinchConfiguration(((PinchElement(7.0, True), PinchElement(1.0, True)),))
        user = Point3(3.0, 1.0, 0.0)
        assert effective_gain(WG, a, 0, user, UNIT_RADIO) == pytest.approx(
            effective_gain(WG, b, 0, user, UNIT_RADIO), rel=1e-15
        )

    def test_no_active_pinch_raises(self):
        pinch = PinchConfiguration(((PinchElement(2.0, False),),))
        with pytest.raises(ValueError):
            effective_gain(WG, pinch, 0, Point3(5, 0, 0), UNIT_RADIO)


class TestLinkState:
    def test_blocked_flag_implies_zero_coefficient(self):
        box = Obstacle(Point3(4.0, 4.0, 0.0), Point3(6.0, 6.0, 3.0))
        config = make_config(obstacles=(box,))
        pinch = PinchConfiguration.one_per_waveguide([0.0])
        links = compute_link_state(config, pinch)
        for u_row_c, u_row_b in zip(links.coefficients, links.blocked):
            for pa_cs, pa_bs in zip(u_row_c, u_row_b):
                for c, b in zip(pa_cs, pa_bs):
                    if b:
                        assert c == 0.0

    def test_gains_match_effective_gain(self, simple_config):
        pinch = PinchConfiguration.one_per_waveguide([2.5])
        links = compute_link_state(simple_config, pinch)
        expected = effective_gain(
            simple_config.waveguides[0],
            pinch,
            0,
            simple_config.users[0].position,
            simple_config.radio,
        )
        assert links.gain(0, 0) == pytest.approx(expected, rel=1e-15)
