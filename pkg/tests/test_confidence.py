import math

import numpy as np
import pytest

from shapeconf import (
    KAPPA_TV,
    ConeKind,
    confidence_ball,
    contains,
    estimate_total_variation,
    radius_convex,
    radius_isotonic,
    radius_tv,
)
from shapeconf.confidence import ConfidenceBall


class TestRadiusIsotonic:
    def test_frozen_value(self):
        # independent high-precision evaluation of the formula
        assert radius_isotonic(2, 100, 1.0, 0.05) == pytest.approx(
            2.6654213365455584, rel=1e-12
        )

    def test_exact_formula(self):
        for k, n, sigma, alpha in [(1, 10, 1.0, 0.5), (7, 200, 0.3, 0.01), (50, 50, 2.0, 0.9)]:
            lhs = radius_isotonic(k, n, sigma, alpha) * n / sigma**2
            rhs = k * (2.0 + 22.0 * math.log(n) + 10.0 * math.log(1.0 / alpha))
            assert lhs == pytest.approx(rhs, rel=1e-14)

    def test_linear_in_pieces(self):
        base = radius_isotonic(3, 90, 1.0, 0.1)
        assert radius_isotonic(6, 90, 1.0, 0.1) == pytest.approx(2.0 * base, rel=1e-15)

    def test_alpha_to_one_limit(self):
        # log(1/alpha) term vanishes
        near_one = radius_isotonic(1, 10, 1.0, 1.0 - 1e-13)
        assert near_one == pytest.approx((2.0 + 22.0 * math.log(10)) / 10, rel=1e-9)

    def test_sigma_squared_scaling(self):
        assert radius_isotonic(4, 30, 2.0, 0.1) == pytest.approx(
            4.0 * radius_isotonic(4, 30, 1.0, 0.1), rel=1e-15
        )

    def test_increasing_in_inverse_alpha(self):
        assert radius_isotonic(2, 50, 1.0, 0.01) > radius_isotonic(2, 50, 1.0, 0.1)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            radius_isotonic(0, 10, 1.0, 0.1)
        with pytest.raises(ValueError):
            radius_isotonic(11, 10, 1.0, 0.1)
        with pytest.raises(ValueError):
            radius_isotonic(1, 10, -1.0, 0.1)
        with pytest.raises(ValueError):
            radius_isotonic(1, 10, 1.0, 1.0)


class TestRadiusTv:
    def test_frozen_value(self):
        assert radius_tv(1.0, 1000, 1.0, 0.05) == pytest.approx(
            0.9194273735270534, rel=1e-12
        )

    def test_alpha_to_one_additive_term_only(self):
        # v_hat = 0, n = 1: only the 2 kappa^2 sigma^2 ln(e) term survives;
        # the sqrt(log(1/alpha)) term decays slowly, hence the loose rel tol
        value = radius_tv(0.0, 1, 1.0, 1.0 - 1e-15)
        assert value == pytest.approx(2.0 * KAPPA_TV**2, rel=1e-4)

    def test_monotone_in_v_hat(self):
        assert radius_tv(2.0, 100, 1.0, 0.1) >= radius_tv(1.0, 100, 1.0, 0.1)

    def test_negative_v_hat_clamped(self):
        assert radius_tv(-5.0, 100, 1.0, 0.1) == radius_tv(0.0, 100, 1.0, 0.1)

    def test_sigma_squared_scaling_at_fixed_ratio(self):
        # with V/sigma held fixed the whole expression scales as sigma^2
        base = radius_tv(1.0, 100, 1.0, 0.1)
        scaled = radius_tv(2.0, 100, 2.0, 0.1)
        assert scaled == pytest.approx(4.0 * base, rel=1e-12)

    def test_kappa_override(self):
        assert radius_tv(1.0, 100, 1.0, 0.1, kappa=1.0) < radius_tv(1.0, 100, 1.0, 0.1)
        with pytest.raises(ValueError):
            radius_tv(1.0, 100, 1.0, 0.1, kappa=0.0)


class TestRadiusConvex:
    def test_frozen_value(self):
        assert radius_convex(3, 200, 0.5, 0.1) == pytest.approx(
            0.9560945459694822, rel=1e-12
        )

    def test_exact_formula(self):
        lhs = radius_convex(1, 40, 1.0, 1.0 - 1e-13) * 40
        assert lhs == pytest.approx(20.0 + 40.0 * math.log(40), rel=1e-9)

    def test_linear_in_pieces(self):
        base = radius_convex(2, 60, 1.0, 0.1)
        assert radius_convex(4, 60, 1.0, 0.1) == pytest.approx(2.0 * base, rel=1e-15)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            radius_convex(10, 10, 1.0, 0.1)  # q_hat > n - 1
        with pytest.raises(ValueError):
            radius_convex(2, 2, 1.0, 0.1)


class TestEstimateTotalVariation:
    def test_examples(self):
        assert estimate_total_variation([1, 5]) == 4.0
        assert estimate_total_variation([3]) == 0.0
        assert estimate_total_variation([2, -1, 7]) == 5.0


class TestConfidenceBall:
    def test_monotone_composition(self):
        ball = confidence_ball([1, 2, 3], ConeKind.MONOTONE_NONDECREASING, 1.0, 0.05)
        np.testing.assert_array_equal(ball.center, [1.0, 2.0, 3.0])
        assert ball.pieces == 3
        assert ball.squared_radius == radius_isotonic(3, 3, 1.0, 0.05)
        assert ball.nominal_coverage == pytest.approx(0.95)
        assert ball.v_hat is None

    def test_convex_composition(self):
        ball = confidence_ball([0, 1, 0], ConeKind.CONVEX, 1.0, 0.05)
        np.testing.assert_allclose(ball.center, [1 / 3, 1 / 3, 1 / 3], atol=1e-12)
        assert ball.pieces == 1
        assert ball.squared_radius == radius_convex(1, 3, 1.0, 0.05)

    def test_center_always_contained(self):
        rng = np.random.default_rng(9)
        for cone in ConeKind:
            y = rng.standard_normal(12)
            ball = confidence_ball(y, cone, 0.5, 0.1)
            assert contains(ball, ball.center)

    def test_tv_combination_takes_minimum(self):
        rng = np.random.default_rng(10)
        y = np.sort(rng.standard_normal(200))
        plain = confidence_ball(y, ConeKind.MONOTONE_NONDECREASING, 1.0, 0.1)
        combined = confidence_ball(
            y, ConeKind.MONOTONE_NONDECREASING, 1.0, 0.1, use_tv_combination=True
        )
        expected = min(plain.squared_radius, radius_tv(y[-1] - y[0], 200, 1.0, 0.1))
        assert combined.squared_radius == pytest.approx(expected, rel=1e-14)
        assert combined.nominal_coverage == pytest.approx(0.8)
        assert combined.v_hat == pytest.approx(y[-1] - y[0])

    def test_tv_combination_nonincreasing_orientation(self):
        y = np.array([5.0, 3.0, 1.0])
        ball = confidence_ball(
            y, ConeKind.MONOTONE_NONINCREASING, 1.0, 0.1, use_tv_combination=True
        )
        # total variation is estimated on the sign-flipped data
        assert ball.v_hat == pytest.approx(4.0)
        assert np.all(np.diff(ball.center) <= 1e-12)

    def test_tv_combination_rejected_for_convex(self):
        with pytest.raises(ValueError):
            confidence_ball([0, 1, 0], ConeKind.CONVEX, 1.0, 0.1, use_tv_combination=True)

    def test_validation(self):
        with pytest.raises(ValueError):
            confidence_ball([1, 2], ConeKind.CONVEX, 0.0, 0.1)
        with pytest.raises(ValueError):
            confidence_ball([1, 2], ConeKind.CONVEX, 1.0, 1.5)


class TestContains:
    def _ball(self, squared_radius):
        return ConfidenceBall(
            center=np.zeros(2),
            squared_radius=squared_radius,
            alpha=0.1,
            cone=ConeKind.MONOTONE_NONDECREASING,
            pieces=1,
            nominal_coverage=0.9,
        )

    def test_zero_radius_contains_center(self):
        assert contains(self._ball(0.0), [0.0, 0.0])

    def test_boundary_included(self):
        # scaled distance of [1,1] from the origin is exactly 1
        assert contains(self._ball(1.0), [1.0, 1.0])

    def test_outside(self):
        assert not contains(self._ball(0.5), [1.0, 1.0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            contains(self._ball(1.0), [0.0, 0.0, 0.0])
