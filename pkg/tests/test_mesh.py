import numpy as np
import pytest

from helmholtz_ldg.geometry.mesh import (
    build_structured_mesh,
    domain_info,
    mesh_from_arrays,
    mesh_summary,
    relabel,
    write_mesh_ascii,
)


@pytest.mark.parametrize("m", [1, 2, 4, 7])
def test_counts(m):
    mesh = build_structured_mesh(m)
    assert mesh.n_triangles == 2 * m * m
    assert mesh.n_vertices == (m + 1) ** 2
    assert mesh.n_edges == 3 * m * m + 2 * m
    assert len(mesh.boundary_edges) == 4 * m
    assert mesh.h == pytest.approx(1.0 / m)


def test_mesh_info_counts_for_m4(mesh4):
    summary = mesh_summary(mesh4)
    assert summary["triangles"] == 32
    assert mesh4.n_edges == 56
    assert summary["interior_edges"] + summary["boundary_edges"] == 56
    assert summary["min_edge_length"] == pytest.approx(0.25)
    assert summary["max_edge_length"] == pytest.approx(np.sqrt(2) / 4)


def test_areas_cover_the_square(mesh4):
    assert np.all(mesh4.areas > 0)
    assert mesh4.areas.sum() == pytest.approx(1.0)


def test_boundary_normals_point_outward(mesh4):
    edges = mesh4.boundary_edges
    dots = np.einsum("ed,ed->e", mesh4.edge_normals[edges], mesh4.edge_midpoints[edges])
    assert np.all(dots > 0)
    assert np.allclose(np.abs(mesh4.edge_normals[edges]).max(axis=1), 1.0)


def test_interior_normal_is_outward_of_higher_label(mesh4):
    for e in mesh4.interior_edges:
        k, k_prime = mesh4.edge_triangles[e]
        assert mesh4.labels[k] > mesh4.labels[k_prime]
        centroid = mesh4.vertices[mesh4.triangles[k]].mean(axis=0)
        assert mesh4.edge_normals[e] @ (mesh4.edge_midpoints[e] - centroid) > 0


def test_triangle_edge_signs_match_roles(mesh4):
    for t in range(mesh4.n_triangles):
        for side in range(3):
            e = mesh4.triangle_edges[t, side]
            expected = 1 if mesh4.edge_triangles[e, 0] == t else -1
            assert mesh4.triangle_edge_signs[t, side] == expected


def test_relabel_swaps_roles_and_flips_normals(mesh4):
    reversed_mesh = relabel(mesh4, mesh4.labels[::-1].copy())
    for e in mesh4.interior_edges:
        assert tuple(reversed_mesh.edge_triangles[e]) == tuple(mesh4.edge_triangles[e][::-1])
        assert np.allclose(reversed_mesh.edge_normals[e], -mesh4.edge_normals[e])


def test_relabel_rejects_duplicates(mesh4):
    with pytest.raises(ValueError):
        relabel(mesh4, np.zeros(mesh4.n_triangles, dtype=int))


@pytest.mark.parametrize("m", [0, -3, 2.5])
def test_invalid_m(m):
    with pytest.raises(ValueError, match="m must be >= 1"):
        build_structured_mesh(m)


def test_star_constant_of_centered_square(mesh4):
    info = domain_info(mesh4)
    assert np.allclose(info.center, 0.0)
    assert info.star_constant == pytest.approx(0.5)


def test_edge_info(mesh4):
    boundary = mesh4.edge(int(mesh4.boundary_edges[0]))
    assert boundary.kind == "boundary"
    assert boundary.triangle_k_prime is None
    interior = mesh4.edge(int(mesh4.interior_edges[0]))
    assert interior.kind == "interior"
    assert interior.triangle_k > interior.triangle_k_prime


def test_single_triangle_has_only_boundary_edges(single_triangle):
    assert single_triangle.n_triangles == 1
    assert len(single_triangle.interior_edges) == 0
    assert len(single_triangle.boundary_edges) == 3


def test_mesh_from_arrays_rejects_unknown_vertex():
    with pytest.raises(ValueError):
        mesh_from_arrays([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 3]])


def test_write_mesh_ascii(tmp_path):
    mesh = build_structured_mesh(2)
    path = write_mesh_ascii(mesh, tmp_path / "mesh.txt")
    lines = path.read_text().splitlines()
    assert lines[0] == "vertices 9"
    assert lines[10] == "triangles 8"
    assert len(lines) == 1 + 9 + 1 + 8
    assert lines[11].split() == [str(i) for i in mesh.triangles[0]]
