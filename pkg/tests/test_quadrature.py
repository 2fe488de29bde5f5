"""Tests for the composite Gauss-Legendre quadrature helpers."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from dualwell.quadrature import GL4_NODES, GL4_WEIGHTS, between, cumulative, integrate, panel_points


class TestRule:
    def test_nodes_and_weights_shapes(self):
        assert GL4_NODES.shape == (4,)
        assert GL4_WEIGHTS.shape == (4,)
        assert_allclose(GL4_WEIGHTS.sum(), 2.0, rtol=1e-15)
        assert_allclose(GL4_NODES, -GL4_NODES[::-1], atol=1e-16)

    @pytest.mark.parametrize("degree", range(8))
    def test_exact_for_polynomials_through_degree_seven(self, degree):
        partition = np.linspace(0.3, 2.7, 7)
        value = integrate(lambda x: x**degree, partition)
        exact = (2.7 ** (degree + 1) - 0.3 ** (degree + 1)) / (degree + 1)
        assert_allclose(value, exact, rtol=1e-14)

    def test_degree_eight_is_not_exact_on_one_panel(self):
        partition = np.array([0.0, 1.0])
        value = integrate(lambda x: x**8, partition)
        assert abs(value - 1.0 / 9.0) > 1e-9

    def test_smooth_integrand_converges_fast(self):
        exact = np.sin(2.0) - np.sin(0.5)
        coarse = integrate(np.cos, np.linspace(0.5, 2.0, 3))
        fine = integrate(np.cos, np.linspace(0.5, 2.0, 5))
        assert abs(fine - exact) < abs(coarse - exact)
        assert_allclose(fine, exact, rtol=1e-12)


class TestPanelPoints:
    def test_points_lie_inside_their_panels(self):
        partition = np.array([1.0, 1.5, 2.5])
        points, weights = panel_points(partition)
        assert points.shape == (2, 4)
        assert weights.shape == (2, 4)
        assert np.all(points[0] > 1.0) and np.all(points[0] < 1.5)
        assert np.all(points[1] > 1.5) and np.all(points[1] < 2.5)
        assert_allclose(weights.sum(), 1.5, rtol=1e-15)


class TestCumulative:
    def test_starts_at_zero_and_matches_total(self):
        partition = np.linspace(1.0, 2.0, 11)
        values = cumulative(lambda x: x**3, partition)
        assert values.shape == partition.shape
        assert values[0] == 0.0
        assert_allclose(values[-1], integrate(lambda x: x**3, partition), rtol=1e-15)

    def test_matches_antiderivative_at_every_node(self):
        partition = np.linspace(0.5, 3.0, 17)
        values = cumulative(np.exp, partition)
        assert_allclose(values, np.exp(partition) - np.exp(0.5), rtol=1e-13)

    @given(st.integers(min_value=2, max_value=40))
    @settings(max_examples=25, deadline=None)
    def test_increments_are_single_panel_integrals(self, count):
        partition = np.linspace(0.2, 1.7, count)
        values = cumulative(lambda x: np.cos(3 * x), partition)
        increments = np.diff(values)
        per_panel = between(lambda x: np.cos(3 * x), partition[:-1], partition[1:])
        assert_allclose(increments, per_panel, rtol=1e-12, atol=1e-15)


class TestBetween:
    def test_scalar_interval(self):
        value = between(lambda x: x**5, 1.0, 2.0)
        assert_allclose(value, (2.0**6 - 1.0) / 6.0, rtol=1e-14)

    def test_elementwise_intervals(self):
        lo = np.array([0.0, 1.0, 2.0])
        hi = np.array([1.0, 1.5, 2.0])
        values = between(lambda x: 3 * x**2, lo, hi)
        assert_allclose(values, hi**3 - lo**3, rtol=1e-14, atol=1e-15)

    def test_zero_width_interval_is_zero(self):
        assert between(np.exp, 1.3, 1.3) == 0.0

    def test_broadcasts_against_trailing_axis(self):
        lo = np.array([[1.0], [2.0]])
        hi = np.array([[1.2, 1.4], [2.1, 2.3]])
        values = between(lambda x: 2 * x, lo, hi)
        assert_allclose(values, hi**2 - lo**2, rtol=1e-14)
