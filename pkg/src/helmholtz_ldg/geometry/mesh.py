"""
Structured triangulations T_{1/m} of the square [-0.5, 0.5]^2.

Each unit cell is cut by its lower-left -> upper-right diagonal into a lower
and an upper triangle. Triangle labels follow the row-major cell index
(2c for the lower, 2c+1 for the upper triangle); the label decides the jump
orientation on interior edges: n_e is the outward normal of the triangle
with the bigger label.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

DOMAIN_LOWER = -0.5
DOMAIN_UPPER = 0.5


@dataclass(frozen=True)
class EdgeInfo:
    vertices: tuple[int, int]
    kind: str
    triangle_k: int
    triangle_k_prime: int | None
    length: float
    normal: np.ndarray
    midpoint: np.ndarray


@dataclass(frozen=True)
class DomainInfo:
    center: np.ndarray
    star_constant: float


@dataclass(frozen=True)
class Mesh:
    """
    Immutable triangulation with edge adjacency.

    Edge arrays are indexed by edge number. ``edge_triangles[e] = (K, K')``
    holds triangle indices with K the higher-labeled neighbour (K' = -1 on
    the boundary); ``edge_sides[e]`` is the local side number of the edge in
    K and K'. ``triangle_edge_signs[t, s]`` is +1 if t plays the role of K on
    that edge, -1 otherwise.
    """

    m: int
    vertices: np.ndarray
    triangles: np.ndarray
    labels: np.ndarray
    edge_vertices: np.ndarray
    edge_triangles: np.ndarray
    edge_sides: np.ndarray
    edge_lengths: np.ndarray
    edge_normals: np.ndarray
    edge_midpoints: np.ndarray
    triangle_edges: np.ndarray
    triangle_edge_signs: np.ndarray

    @property
    def h(self) -> float:
        return 1.0 / self.m

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edge_vertices)

    @property
    def boundary_mask(self) -> np.ndarray:
        return self.edge_triangles[:, 1] < 0

    @property
    def interior_edges(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary_mask)

    @property
    def boundary_edges(self) -> np.ndarray:
        return np.flatnonzero(self.boundary_mask)

    @property
    def areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def edge(self, index: int) -> EdgeInfo:
        k, k_prime = (int(t) for t in self.edge_triangles[index])
        boundary = k_prime < 0
        return EdgeInfo(
            vertices=(int(self.edge_vertices[index, 0]), int(self.edge_vertices[index, 1])),
            kind="boundary" if boundary else "interior",
            triangle_k=int(self.labels[k]),
            triangle_k_prime=None if boundary else int(self.labels[k_prime]),
            length=float(self.edge_lengths[index]),
            normal=self.edge_normals[index].copy(),
            midpoint=self.edge_midpoints[index].copy(),
        )


def _structured_points_and_cells(m: int) -> tuple[np.ndarray, np.ndarray]:
    coords = np.linspace(DOMAIN_LOWER, DOMAIN_UPPER, m + 1)
    xx, yy = np.meshgrid(coords, coords)
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    j, i = np.divmod(np.arange(m * m), m)
    v00 = j * (m + 1) + i
    v10 = v00 + 1
    v01 = v00 + (m + 1)
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    # interleave so that triangle index == 2c (lower), 2c+1 (upper)
    triangles = np.empty((2 * m * m, 3), dtype=np.int64)
    triangles[0::2] = lower
    triangles[1::2] = upper
    return vertices, triangles


def _connect(m: int, vertices: np.ndarray, triangles: np.ndarray, labels: np.ndarray) -> Mesh:
    n_tri = len(triangles)
    local = np.array([[1, 2], [2, 0], [0, 1]])  # side s is opposite vertex s
    sides = triangles[:, local].reshape(-1, 2)
    keys = np.sort(sides, axis=1)
    edge_vertices, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    n_edges = len(edge_vertices)

    owners = np.repeat(np.arange(n_tri), 3)
    side_ids = np.tile(np.arange(3), n_tri)
    order = np.lexsort((labels[owners], inverse))
    first = np.ones(len(order), dtype=bool)
    first[1:] = inverse[order][1:] != inverse[order][:-1]

    edge_triangles = np.full((n_edges, 2), -1, dtype=np.int64)
    edge_sides = np.full((n_edges, 2), -1, dtype=np.int64)
    counts = np.bincount(inverse, minlength=n_edges)
    if counts.max() > 2:
        raise ValueError("non-manifold edge in triangulation")

    # within one edge the sort is by ascending label: last entry is K
    last = np.ones(len(order), dtype=bool)
    last[:-1] = inverse[order][1:] != inverse[order][:-1]
    e_last = inverse[order][last]
    edge_triangles[e_last, 0] = owners[order][last]
    edge_sides[e_last, 0] = side_ids[order][last]
    pair_first = first & ~last
    e_first = inverse[order][pair_first]
    edge_triangles[e_first, 1] = owners[order][pair_first]
    edge_sides[e_first, 1] = side_ids[order][pair_first]

    triangle_edges = inverse.reshape(n_tri, 3)
    signs = np.where(edge_triangles[triangle_edges, 0] == np.arange(n_tri)[:, None], 1, -1)

    k = edge_triangles[:, 0]
    s = edge_sides[:, 0]
    a = vertices[triangles[k, (s + 1) % 3]]
    b = vertices[triangles[k, (s + 2) % 3]]
    tangent = b - a
    lengths = np.hypot(tangent[:, 0], tangent[:, 1])
    normals = np.column_stack([tangent[:, 1], -tangent[:, 0]]) / lengths[:, None]

    return Mesh(
        m=m,
        vertices=vertices,
        triangles=triangles,
        labels=labels,
        edge_vertices=edge_vertices,
        edge_triangles=edge_triangles,
        edge_sides=edge_sides,
        edge_lengths=lengths,
        edge_normals=normals,
        edge_midpoints=0.5 * (a + b),
        triangle_edges=triangle_edges,
        triangle_edge_signs=signs.astype(np.int64),
    )


def build_structured_mesh(m: int) -> Mesh:
    """Build T_{1/m}: 2m^2 right-angled equicrural triangles with legs 1/m."""
    if int(m) != m or m < 1:
        raise ValueError("m must be >= 1")
    m = int(m)
    vertices, triangles = _structured_points_and_cells(m)
    labels = np.arange(len(triangles), dtype=np.int64)
    return _connect(m, vertices, triangles, labels)


def mesh_from_arrays(vertices, triangles, labels=None, m: int = 1) -> Mesh:
    """
    Triangulation from explicit vertex and triangle arrays (counter-clockwise
    triangles). ``m`` only sets the nominal h = 1/m of the result.
    """
    vertices = np.asarray(vertices, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64)
    if vertices.ndim != 2 or vertices.shape[1] != 2 or triangles.ndim != 2 or triangles.shape[1] != 3:
        raise ValueError("vertices must be (n, 2) and triangles (t, 3)")
    if triangles.min() < 0 or triangles.max() >= len(vertices):
        raise ValueError("triangle references an unknown vertex")
    labels = np.arange(len(triangles), dtype=np.int64) if labels is None else np.asarray(labels, dtype=np.int64)
    return _connect(m, vertices, triangles, labels)


def relabel(mesh: Mesh, labels) -> Mesh:
    """
    Return the same triangulation with new global triangle labels.

    Dof numbering follows the triangle index and is unchanged; only the
    K/K' roles and therefore the interior normals change.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (mesh.n_triangles,) or len(np.unique(labels)) != mesh.n_triangles:
        raise ValueError("labels must be a permutation-like unique integer array, one per triangle")
    return _connect(mesh.m, mesh.vertices, mesh.triangles, labels)


def domain_info(mesh: Mesh) -> DomainInfo:
    """Star center x_Omega = origin and c_Omega = min (x - x_Omega).n over the boundary."""
    center = np.zeros(2)
    boundary = mesh.boundary_edges
    endpoints = mesh.vertices[mesh.edge_vertices[boundary]]
    normals = mesh.edge_normals[boundary]
    dots = np.einsum("epd,ed->ep", endpoints - center, normals)
    return DomainInfo(center=center, star_constant=float(dots.min()))


def mesh_summary(mesh: Mesh) -> dict[str, float]:
    boundary = mesh.boundary_mask
    return {
        "triangles": mesh.n_triangles,
        "vertices": mesh.n_vertices,
        "interior_edges": int((~boundary).sum()),
        "boundary_edges": int(boundary.sum()),
        "min_edge_length": float(mesh.edge_lengths.min()),
        "max_edge_length": float(mesh.edge_lengths.max()),
    }


def write_mesh_ascii(mesh: Mesh, path) -> Path:
    """
    Debug dump: a line ``vertices N`` followed by one ``x y`` line per vertex,
    then ``triangles M`` followed by one ``i j k`` line per triangle.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"vertices {mesh.n_vertices}"]
    lines += [f"{x:.17g} {y:.17g}" for x, y in mesh.vertices]
    lines.append(f"triangles {mesh.n_triangles}")
    lines += [f"{i} {j} {k}" for i, j, k in mesh.triangles]
    path.write_text("\n".join(lines) + "\n")
    return path
