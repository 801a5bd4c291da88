from math import factorial

import numpy as np
import pytest

from helmholtz_ldg.discretization.basis import barycentric, edge_points, p1_eval, p1_gradients, triangle_points
from helmholtz_ldg.discretization.quadrature import (
    edge_rule,
    integrate_on_segment,
    integrate_on_triangle,
    triangle_rule,
)

REFERENCE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def _monomial_integral(i, j):
    return factorial(i) * factorial(j) / factorial(i + j + 2)


@pytest.mark.parametrize("degree", [1, 2, 5])
def test_triangle_rule_is_exact_up_to_degree(degree):
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            value = integrate_on_triangle(REFERENCE, lambda x, y: x**i * y**j, degree)
            assert value == pytest.approx(_monomial_integral(i, j), abs=1e-15)


@pytest.mark.parametrize("degree", [1, 2, 5])
def test_triangle_weights_sum_to_one(degree):
    rule = triangle_rule(degree)
    assert rule.weights.sum() == pytest.approx(1.0)
    assert np.allclose(rule.points.sum(axis=1), 1.0)


@pytest.mark.parametrize("degree", [1, 3, 7])
def test_edge_rule_is_exact_up_to_degree(degree):
    rule = edge_rule(degree)
    for p in range(degree + 1):
        assert np.sum(rule.weights * rule.points**p) == pytest.approx(1.0 / (p + 1), abs=1e-15)


def test_segment_integral_uses_length():
    value = integrate_on_segment([0.0, 0.0], [3.0, 4.0], lambda x, y: np.ones_like(x), 1)
    assert value == pytest.approx(5.0)


def test_unsupported_degrees():
    with pytest.raises(ValueError, match="unsupported triangle quadrature degree 3"):
        triangle_rule(3)
    with pytest.raises(ValueError):
        edge_rule(2)


def test_p1_eval_is_nodal():
    triangle = np.array([[0.2, -0.1], [0.9, 0.3], [0.1, 0.8]])
    for i, corner in enumerate(triangle):
        values, grads = p1_eval(triangle, corner)
        assert np.allclose(values, np.eye(3)[i])
        assert np.allclose(grads.sum(axis=0), 0.0)


def test_p1_eval_reproduces_linear_functions():
    triangle = np.array([[0.2, -0.1], [0.9, 0.3], [0.1, 0.8]])
    point = np.array([0.35, 0.3])
    values, grads = p1_eval(triangle, point)
    assert values.sum() == pytest.approx(1.0)
    assert values @ triangle == pytest.approx(point)
    assert np.allclose(triangle.T @ grads, np.eye(2))


def test_degenerate_triangle_rejected():
    with pytest.raises(ValueError, match="degenerate"):
        p1_eval([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], [0.5, 0.5])


def test_vectorized_basis_agrees_with_pointwise(mesh4):
    rule = triangle_rule(5)
    points = triangle_points(mesh4, rule.points)
    lam = barycentric(mesh4, np.arange(mesh4.n_triangles), points)
    assert np.allclose(lam, np.broadcast_to(rule.points, lam.shape))

    grads = p1_gradients(mesh4)
    t = 7
    _, expected = p1_eval(mesh4.vertices[mesh4.triangles[t]], points[t, 0])
    assert np.allclose(grads[t], expected)


def test_edge_points_lie_on_edges(mesh4):
    edges = mesh4.interior_edges[:5]
    points = edge_points(mesh4, edges, edge_rule(3).points)
    midpoints = points.mean(axis=1)
    assert np.allclose(midpoints, mesh4.edge_midpoints[edges])
