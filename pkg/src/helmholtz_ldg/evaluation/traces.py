"""
Traces of scalar fields along the line y = 0.
"""

from __future__ import annotations

import numpy as np

from helmholtz_ldg.discretization.basis import barycentric
from helmholtz_ldg.geometry.mesh import DOMAIN_LOWER, DOMAIN_UPPER, Mesh
from helmholtz_ldg.model.solve import DiscreteSolution
from helmholtz_ldg.problem.helmholtz import HelmholtzProblem

CONTAINMENT_TOLERANCE = 1e-12


def _structured_guess(mesh: Mesh, points: np.ndarray) -> np.ndarray:
    m = mesh.m
    scaled = (points - DOMAIN_LOWER) * m
    xi, eta = scaled[:, 0], scaled[:, 1]
    i = np.clip(np.ceil(xi) - 1, 0, m - 1).astype(np.int64)
    j = np.clip(np.ceil(eta) - 1, 0, m - 1).astype(np.int64)
    upper = (eta - j) >= (xi - i)
    return 2 * (j * m + i) + upper.astype(np.int64)


def _contains(mesh: Mesh, triangles: np.ndarray, points: np.ndarray) -> np.ndarray:
    lam = barycentric(mesh, triangles, points[:, None, :])[:, 0, :]
    return lam.min(axis=1) >= -CONTAINMENT_TOLERANCE


def locate(mesh: Mesh, points: np.ndarray) -> np.ndarray:
    """
    Triangle index of each point.

    On T_{1/m} the index is read off the grid: points on cell lines go to the
    cell below / to the left, and inside a cell points on or above the
    diagonal go to the upper triangle. Any point whose guessed triangle does
    not contain it (other triangulations) is found by a barycentric search
    over all triangles; the lowest containing index wins.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if mesh.n_triangles == 2 * mesh.m * mesh.m:
        triangles = _structured_guess(mesh, points)
    else:
        triangles = np.zeros(len(points), dtype=np.int64)
    misses = np.flatnonzero(~_contains(mesh, triangles, points))
    if len(misses) == 0:
        return triangles

    everything = np.arange(mesh.n_triangles)
    for index in misses:
        candidates = _contains(mesh, everything, np.repeat(points[index][None, :], mesh.n_triangles, axis=0))
        found = np.flatnonzero(candidates)
        if len(found) == 0:
            raise ValueError(f"point ({points[index, 0]:g}, {points[index, 1]:g}) lies outside the mesh")
        triangles[index] = found[0]
    return triangles


def _evaluate(mesh: Mesh, field, points: np.ndarray) -> np.ndarray:
    if isinstance(field, DiscreteSolution):
        triangles = locate(mesh, points)
        lam = barycentric(mesh, triangles, points[:, None, :])[:, 0, :]
        return np.einsum("na,na->n", np.asarray(field.u)[triangles], lam)
    if isinstance(field, HelmholtzProblem):
        values, _ = field.require_exact()(points)
        return np.asarray(values)
    return np.asarray(field(points))


def trace_sample(mesh: Mesh, field, n: int) -> list[tuple[float, float]]:
    """(x, Re u(x, 0)) at n uniformly spaced x in [-0.5, 0.5], endpoints included."""
    if n < 2:
        raise ValueError("trace needs at least 2 samples")
    x = np.linspace(DOMAIN_LOWER, DOMAIN_UPPER, int(n))
    points = np.column_stack([x, np.zeros_like(x)])
    values = _evaluate(mesh, field, points)
    return [(float(a), float(b)) for a, b in zip(x, np.real(values))]
