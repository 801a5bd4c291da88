"""P1 nodal basis (barycentric coordinates) on triangles."""

from __future__ import annotations

import numpy as np

from helmholtz_ldg.geometry.mesh import Mesh

DEGENERACY_TOLERANCE = 1e-14


def _inverse_maps(corners: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Affine map x = x0 + B xi per triangle; returns (B^{-1}, det B)."""
    b = np.stack([corners[..., 1, :] - corners[..., 0, :], corners[..., 2, :] - corners[..., 0, :]], axis=-1)
    det = b[..., 0, 0] * b[..., 1, 1] - b[..., 0, 1] * b[..., 1, 0]
    if np.any(np.abs(det) <= DEGENERACY_TOLERANCE):
        raise ValueError("degenerate (zero-area) triangle")
    inv = np.empty_like(b)
    inv[..., 0, 0] = b[..., 1, 1]
    inv[..., 0, 1] = -b[..., 0, 1]
    inv[..., 1, 0] = -b[..., 1, 0]
    inv[..., 1, 1] = b[..., 0, 0]
    return inv / det[..., None, None], det


def _gradients_from_inverse(inv: np.ndarray) -> np.ndarray:
    grads = np.empty(inv.shape[:-2] + (3, 2))
    grads[..., 1, :] = inv[..., 0, :]
    grads[..., 2, :] = inv[..., 1, :]
    grads[..., 0, :] = -(inv[..., 0, :] + inv[..., 1, :])
    return grads


def p1_eval(triangle, point) -> tuple[np.ndarray, np.ndarray]:
    """
    Values and gradients of the three nodal functions at ``point``.

    ``triangle`` are the (3, 2) vertex coordinates. Values are the
    barycentric coordinates of the point, gradients are constant.
    """
    corners = np.asarray(triangle, dtype=float)
    inv, _ = _inverse_maps(corners)
    xi = inv @ (np.asarray(point, dtype=float) - corners[0])
    values = np.array([1.0 - xi[0] - xi[1], xi[0], xi[1]])
    return values, _gradients_from_inverse(inv)


def p1_gradients(mesh: Mesh) -> np.ndarray:
    """Constant gradients of lambda_a on every triangle, shape (n_triangles, 3, 2)."""
    inv, _ = _inverse_maps(mesh.vertices[mesh.triangles])
    return _gradients_from_inverse(inv)


def barycentric(mesh: Mesh, triangles: np.ndarray, points: np.ndarray) -> np.ndarray:
    """
    Barycentric coordinates of ``points[i, q]`` in triangle ``triangles[i]``.

    points has shape (n, n_q, 2); the result has shape (n, n_q, 3).
    """
    corners = mesh.vertices[mesh.triangles[triangles]]
    inv, _ = _inverse_maps(corners)
    xi = np.einsum("nij,nqj->nqi", inv, points - corners[:, None, 0, :])
    return np.concatenate([1.0 - xi.sum(axis=-1, keepdims=True), xi], axis=-1)


def triangle_points(mesh: Mesh, bary_points: np.ndarray) -> np.ndarray:
    """Physical coordinates of reference barycentric points on every triangle, (n_triangles, n_q, 2)."""
    corners = mesh.vertices[mesh.triangles]
    return np.einsum("qa,tad->tqd", bary_points, corners)


def edge_points(mesh: Mesh, edges: np.ndarray, params: np.ndarray) -> np.ndarray:
    """Physical points at parameters t along the listed edges, (n_edges, n_q, 2)."""
    a = mesh.vertices[mesh.edge_vertices[edges, 0]]
    b = mesh.vertices[mesh.edge_vertices[edges, 1]]
    return a[:, None, :] + params[None, :, None] * (b - a)[:, None, :]
