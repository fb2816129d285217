"""The shipped metric catalogue."""

import math

import numpy as np
import pytest

from finslerproj.core import arc_length, validate_homogeneity, validate_strong_convexity
from finslerproj.distance import funk_distance_interval
from finslerproj.errors import ConstructionError, DomainError
from finslerproj.metrics import (IntervalFunkMetric, QuadraticDomainSpec,
                                 RandersSpec, funk_from_quadratic,
                                 interval_funk_eval, klein_metric,
                                 randers_metric)


def ball_closed_form(x, y):
    phi = 1.0 - x @ x
    xy = float(x @ y)
    return (math.sqrt(phi * float(y @ y) + xy * xy) + xy) / phi


class TestQuadraticFunk:
    def test_unit_ball_at_origin_is_euclidean(self, ball2, rng):
        for _ in range(10):
            y = rng.normal(size=2)
            assert ball2.norm([0.0, 0.0], y) == pytest.approx(np.linalg.norm(y),
                                                              abs=1e-14)

    def test_pinned_point_value(self, ball2):
        assert abs(ball2.norm([0.5, 0.0], [1.0, 0.0]) - 2.0) <= 1e-12

    def test_pinned_coefficients(self, ball2):
        a = ball2.coefficient_matrix(np.array([0.5, 0.0]))
        b = ball2.coefficient_oneform(np.array([0.5, 0.0]))
        assert a[0, 0] == pytest.approx(16.0 / 9.0, abs=1e-13)
        assert b[0] == pytest.approx(2.0 / 3.0, abs=1e-13)

    def test_matches_ball_closed_form(self, ball2, rng):
        worst = 0.0
        for _ in range(300):
            x = ball2.random_interior_point(rng)
            y = rng.normal(size=2)
            worst = max(worst, abs(ball2.norm(x, y) - ball_closed_form(x, y)))
        assert worst <= 1e-10

    def test_oneform_is_half_log_gradient(self, rng):
        # b_j = -d_j log(phi) / 2, checked with plain central differences
        for _ in range(5):
            A = rng.normal(size=(2, 2))
            spec = QuadraticDomainSpec(alpha=-(A @ A.T + 0.4 * np.eye(2)),
                                       beta=0.1 * rng.normal(size=2),
                                       gamma=1.0 + float(abs(rng.normal())))
            metric = funk_from_quadratic(spec)
            x = metric.random_interior_point(rng)
            b = metric.coefficient_oneform(x)
            h = 1e-6
            for j in range(2):
                e = np.zeros(2)
                e[j] = h
                grad = (math.log(spec.phi(x + e)) - math.log(spec.phi(x - e))) / (2 * h)
                assert b[j] == pytest.approx(-0.5 * grad, abs=1e-8)

    def test_construction_errors(self):
        with pytest.raises(ConstructionError):
            QuadraticDomainSpec(alpha=-np.eye(2), beta=np.zeros(2), gamma=-1.0)
        with pytest.raises(ConstructionError):
            QuadraticDomainSpec(alpha=-np.eye(2), beta=np.zeros(2), gamma=1.0, k=0.0)
        with pytest.raises(ConstructionError):
            QuadraticDomainSpec(alpha=np.array([[1.0, 0.5], [0.0, 1.0]]),
                                beta=np.zeros(2), gamma=1.0)

    def test_nonconvex_domain_warns(self):
        with pytest.warns(UserWarning):
            QuadraticDomainSpec(alpha=np.eye(2), beta=np.zeros(2), gamma=1.0)

    def test_domain_rejection(self, ball2):
        with pytest.raises(DomainError):
            ball2.norm([1.1, 0.0], [1.0, 0.0])


class TestIntervalFunk:
    @pytest.mark.parametrize("u,y,expected", [
        (0.0, 1.0, 1.0),
        (0.5, 1.0, 2.0),
        (0.5, -1.0, 2.0 / 3.0),
    ])
    def test_pinned_values(self, u, y, expected):
        assert interval_funk_eval(u, y, 1.0) == pytest.approx(expected, abs=1e-14)

    def test_branch_forms(self, rng):
        for _ in range(100):
            u = float(rng.uniform(-0.99, 0.99))
            y = float(rng.normal())
            if y == 0:
                continue
            k = float(rng.uniform(0.5, 2.0))
            expected = y / (k * (1 - u)) if y > 0 else -y / (k * (1 + u))
            assert interval_funk_eval(u, y, k) == pytest.approx(expected, rel=1e-14)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            interval_funk_eval(1.0, 1.0)
        with pytest.raises(DomainError):
            interval_funk_eval(0.0, 0.0)
        with pytest.raises(ConstructionError):
            interval_funk_eval(0.0, 1.0, k=0.0)
        with pytest.raises(ConstructionError):
            IntervalFunkMetric(-2.0)

    @pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
    def test_arc_length_matches_closed_distance(self, k, rng):
        metric = IntervalFunkMetric(k)
        for _ in range(7):
            a, b = rng.uniform(-0.9, 0.9, 2)
            d = b - a
            if d == 0:
                continue
            L = arc_length(metric, (lambda t: np.array([a + t * d]),
                                    lambda t: np.array([d])), 0.0, 1.0)
            assert L == pytest.approx(funk_distance_interval(a, b, k), abs=1e-9)


class TestKlein:
    def test_origin_is_euclidean(self, klein2, rng):
        y = rng.normal(size=2)
        assert klein2.norm([0.0, 0.0], y) == pytest.approx(np.linalg.norm(y))

    def test_domain_error(self, klein2):
        with pytest.raises(DomainError):
            klein2.norm([1.0, 0.2], [1.0, 0.0])

    def test_dimension_guard(self):
        with pytest.raises(ConstructionError):
            klein_metric(1)

    def test_analytic_tensor_matches_norm(self, klein2, rng):
        for _ in range(20):
            x = klein2.random_interior_point(rng)
            y = rng.normal(size=2)
            g = klein2.metric_tensor(x, y)
            assert klein2.norm(x, y) ** 2 == pytest.approx(float(y @ g @ y), rel=1e-12)


class TestRanders:
    def test_pinned_values(self, randers_const):
        assert randers_const.norm([0.0, 0.0], [1.0, 0.0]) == pytest.approx(1.5)
        assert randers_const.norm([0.0, 0.0], [-1.0, 0.0]) == pytest.approx(0.5)

    def test_asymmetry(self, randers_const, rng):
        y = rng.normal(size=2)
        assert (randers_const.norm([0.1, 0.1], y)
                != pytest.approx(randers_const.norm([0.1, 0.1], -y)))

    def test_zero_one_form_reduces_to_riemannian(self, rng):
        metric = randers_metric(RandersSpec(2, np.diag([2.0, 0.5]), np.zeros(2)))
        y = rng.normal(size=2)
        assert metric.norm([0.0, 0.0], y) == pytest.approx(
            math.sqrt(2.0 * y[0] ** 2 + 0.5 * y[1] ** 2))

    def test_oversized_one_form_rejected(self):
        with pytest.raises(ConstructionError, match="1.5"):
            randers_metric(RandersSpec(2, np.eye(2), np.array([1.5, 0.0])))

    def test_position_dependent_one_form(self):
        spec = RandersSpec(
            2, lambda x: np.eye(2), lambda x: 0.2 * np.array([-x[1], x[0]]),
            name="curl-randers")
        metric = randers_metric(spec)
        assert metric.norm([0.5, 0.0], [0.0, 1.0]) == pytest.approx(1.1)


class TestShippedAxioms:
    def test_homogeneity_and_convexity(self, eucl2, klein2, ball2, randers_const, rng):
        for metric in (eucl2, klein2, ball2, randers_const):
            samples = [(x, y, float(rng.uniform(0.1, 10.0)))
                       for x, y in metric.random_line_elements(100, rng)]
            assert validate_homogeneity(metric, samples, tolerance=1e-10).passed
            assert validate_strong_convexity(
                metric, metric.random_line_elements(40, rng)).passed
