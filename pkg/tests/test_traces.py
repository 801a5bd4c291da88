import numpy as np
import pytest

from helmholtz_ldg.discretization.basis import barycentric
from helmholtz_ldg.evaluation.traces import locate, trace_sample
from helmholtz_ldg.geometry.mesh import build_structured_mesh, mesh_from_arrays, relabel
from helmholtz_ldg.model.solve import nodal_interpolant
from helmholtz_ldg.problem.helmholtz import bessel_problem, linear_problem


def test_exact_trace_is_symmetric(mesh4):
    samples = trace_sample(mesh4, bessel_problem(10.0), 101)
    values = np.array([value for _, value in samples])
    assert np.allclose(values, values[::-1], atol=1e-12)


def test_trace_covers_the_domain_width(mesh4):
    samples = trace_sample(mesh4, bessel_problem(10.0), 5)
    assert [x for x, _ in samples] == pytest.approx([-0.5, -0.25, 0.0, 0.25, 0.5])


def test_trace_needs_two_samples(mesh4):
    with pytest.raises(ValueError, match="at least 2"):
        trace_sample(mesh4, bessel_problem(10.0), 1)


def test_discrete_trace_of_linear_interpolant(mesh4):
    interpolant = nodal_interpolant(mesh4, linear_problem(3.0))
    samples = trace_sample(mesh4, interpolant, 33)
    x, values = np.array(samples).T
    assert np.allclose(values, x, atol=1e-13)


def test_callable_field(mesh4):
    samples = trace_sample(mesh4, lambda points: points[:, 0] ** 2, 3)
    assert [value for _, value in samples] == pytest.approx([0.25, 0.0, 0.25])


def test_locate_follows_the_side_rule(mesh4):
    points = np.array([[-0.5, -0.5], [0.0, 0.0], [0.1, -0.2], [0.5, 0.5], [-0.25, 0.0]])
    assert locate(mesh4, points).tolist() == [1, 11, 12, 31, 9]


def test_located_triangle_contains_the_point():
    mesh = build_structured_mesh(7)
    rng = np.random.default_rng(5)
    points = rng.uniform(-0.5, 0.5, size=(200, 2))
    triangles = locate(mesh, points)
    lam = barycentric(mesh, triangles, points[:, None, :])[:, 0, :]
    assert np.all(lam >= -1e-12)


def test_locate_on_reordered_triangulation(mesh4):
    reordered = mesh_from_arrays(mesh4.vertices, mesh4.triangles[::-1], m=4)
    points = np.array([[0.1, -0.2], [0.37, 0.41], [-0.4, 0.3]])
    found = reordered.triangles[locate(reordered, points)]
    expected = mesh4.triangles[locate(mesh4, points)]
    assert np.sort(found, axis=1).tolist() == np.sort(expected, axis=1).tolist()


def test_locate_ignores_labels(mesh4):
    points = np.array([[0.1, -0.2], [0.37, 0.41]])
    shuffled = relabel(mesh4, np.arange(mesh4.n_triangles)[::-1])
    assert locate(shuffled, points).tolist() == locate(mesh4, points).tolist()


def test_locate_rejects_points_outside_the_mesh(mesh4):
    with pytest.raises(ValueError, match="outside the mesh"):
        locate(mesh4, np.array([[0.9, 0.0]]))
