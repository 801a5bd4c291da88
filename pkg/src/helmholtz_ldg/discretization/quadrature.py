"""
Quadrature rules on triangles (barycentric points) and on edges (parameter t in [0, 1]).

Weights are normalized to the reference measure 1, so an integral is
``measure * sum(weights * f(points))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# exact for P1 x P1 products
POLYNOMIAL_TRIANGLE_DEGREE = 2
POLYNOMIAL_EDGE_DEGREE = 3
# f, g and the Bessel solution
DATA_TRIANGLE_DEGREE = 5
DATA_EDGE_DEGREE = 7


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray
    degree: int

    def __len__(self) -> int:
        return len(self.weights)


def _symmetric_orbit(a: float) -> np.ndarray:
    b = 1.0 - 2.0 * a
    return np.array([[a, a, b], [a, b, a], [b, a, a]])


@lru_cache(maxsize=None)
def triangle_rule(degree: int) -> QuadratureRule:
    """Centroid (1), edge-midpoint (2) or 7-point Radon (5) rule."""
    if degree == 1:
        points = np.full((1, 3), 1.0 / 3.0)
        weights = np.ones(1)
    elif degree == 2:
        points = np.array([[0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]])
        weights = np.full(3, 1.0 / 3.0)
    elif degree == 5:
        sqrt15 = np.sqrt(15.0)
        a1 = (6.0 - sqrt15) / 21.0
        a2 = (6.0 + sqrt15) / 21.0
        points = np.vstack([np.full((1, 3), 1.0 / 3.0), _symmetric_orbit(a1), _symmetric_orbit(a2)])
        weights = np.concatenate(
            [[9.0 / 40.0], np.full(3, (155.0 - sqrt15) / 1200.0), np.full(3, (155.0 + sqrt15) / 1200.0)]
        )
    else:
        raise ValueError(f"unsupported triangle quadrature degree {degree}")
    points.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(points=points, weights=weights, degree=degree)


@lru_cache(maxsize=None)
def edge_rule(degree: int) -> QuadratureRule:
    """Gauss-Legendre rules with 1, 2 and 4 points on [0, 1]."""
    n_points = {1: 1, 3: 2, 7: 4}.get(degree)
    if n_points is None:
        raise ValueError(f"unsupported edge quadrature degree {degree}")
    nodes, weights = np.polynomial.legendre.leggauss(n_points)
    points = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    points.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(points=points, weights=weights, degree=degree)


def integrate_on_triangle(vertices, f, degree: int) -> complex:
    """Integrate ``f(x, y)`` over the triangle with the given (3, 2) vertices."""
    rule = triangle_rule(degree)
    vertices = np.asarray(vertices, dtype=float)
    d1 = vertices[1] - vertices[0]
    d2 = vertices[2] - vertices[0]
    area = 0.5 * abs(d1[0] * d2[1] - d1[1] * d2[0])
    xy = rule.points @ vertices
    return area * np.sum(rule.weights * f(xy[:, 0], xy[:, 1]))


def integrate_on_segment(a, b, f, degree: int) -> complex:
    """Integrate ``f(x, y)`` along the segment from a to b."""
    rule = edge_rule(degree)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    xy = a + rule.points[:, None] * (b - a)
    return np.linalg.norm(b - a) * np.sum(rule.weights * f(xy[:, 0], xy[:, 1]))
