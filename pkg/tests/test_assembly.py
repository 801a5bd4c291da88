import numpy as np
import pytest
from dense_oracle import dense_matrix

from helmholtz_ldg.geometry.mesh import build_structured_mesh, relabel
from helmholtz_ldg.model.assembly import (
    DofMap,
    assemble_conforming_fem,
    assemble_ldg1,
    assemble_ldg2,
    assemble_primal_ipdg,
    assemble_rhs,
    eliminate_sigma,
    reconstruct_flux,
)
from helmholtz_ldg.model.flux_settings import FluxParams, beta_sweep, check_method, delta_sweep
from helmholtz_ldg.model.solve import nodal_interpolant, solve_problem
from helmholtz_ldg.problem.helmholtz import bessel_problem, linear_problem, zero_problem

ASSEMBLERS = {"ldg1": assemble_ldg1, "ldg2": assemble_ldg2, "ipdg-primal": assemble_primal_ipdg}


def _relative_max(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300)


@pytest.mark.parametrize("method", ["ldg1", "ldg2", "ipdg-primal"])
@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("k", [1.0, 10.0])
def test_matches_dense_oracle(method, m, k, paper_params):
    mesh = build_structured_mesh(m)
    matrix = ASSEMBLERS[method](mesh, k, paper_params).matrix.toarray()
    expected = dense_matrix(mesh, k, paper_params, method)
    assert _relative_max(matrix, expected) <= 1e-12


def test_matches_dense_oracle_with_constant_penalties():
    params = FluxParams(beta0=1.0, delta0=10.0, beta_scaling="const", delta_scaling="const")
    mesh = build_structured_mesh(2)
    for method, assemble in ASSEMBLERS.items():
        matrix = assemble(mesh, 3.0, params).matrix.toarray()
        assert _relative_max(matrix, dense_matrix(mesh, 3.0, params, method)) <= 1e-12


def test_dofmap_layout():
    dofmap = DofMap(n_triangles=32)
    assert dofmap.n_u == 96
    assert dofmap.size == 288
    assert dofmap.u_dofs[2, 1] == 7
    assert dofmap.sigma_dofs()[1, 1, 2] == 96 + 6 + 3 + 2
    assert DofMap(n_triangles=32, mixed=False).size == 96


@pytest.mark.parametrize("k", [1.0, 10.0])
@pytest.mark.parametrize("m", [2, 8])
def test_sigma_elimination_gives_primal_matrix(k, m, paper_params):
    mesh = build_structured_mesh(m)
    schur = eliminate_sigma(assemble_ldg1(mesh, k, paper_params)).toarray()
    primal = assemble_primal_ipdg(mesh, k, paper_params).matrix.toarray()
    assert _relative_max(schur, primal) <= 1e-12


@pytest.mark.parametrize("k", [1.0, 10.0])
@pytest.mark.parametrize("m", [2, 8])
def test_mixed_and_primal_solutions_agree(k, m, paper_params):
    mesh = build_structured_mesh(m)
    problem = bessel_problem(k)
    mixed = solve_problem("ldg1", mesh, problem, paper_params).solution
    primal = solve_problem("ipdg-primal", mesh, problem, paper_params).solution
    assert _relative_max(primal.u, mixed.u) <= 1e-8
    assert _relative_max(primal.sigma, mixed.sigma) <= 1e-8


def test_ldg2_sigma_block_cannot_be_condensed(mesh4, paper_params):
    with pytest.raises(ValueError, match="block-diagonal"):
        eliminate_sigma(assemble_ldg2(mesh4, 5.0, paper_params))


def test_single_triangle_methods_coincide(single_triangle, paper_params):
    ldg1 = assemble_ldg1(single_triangle, 2.0, paper_params).matrix.toarray()
    ldg2 = assemble_ldg2(single_triangle, 2.0, paper_params).matrix.toarray()
    assert np.allclose(ldg1, ldg2, atol=1e-14)
    schur = eliminate_sigma(assemble_ldg1(single_triangle, 2.0, paper_params)).toarray()
    primal = assemble_primal_ipdg(single_triangle, 2.0, paper_params).matrix.toarray()
    assert _relative_max(schur, primal) <= 1e-12


@pytest.mark.parametrize("method", ["ldg1", "ldg2", "ipdg-primal", "fem-p1"])
@pytest.mark.parametrize("k", [1.0, 10.0])
@pytest.mark.parametrize("m", [1, 4])
def test_linear_solution_is_reproduced(method, k, m, paper_params):
    mesh = build_structured_mesh(m)
    problem = linear_problem(k)
    solution = solve_problem(method, mesh, problem, paper_params).solution
    expected = nodal_interpolant(mesh, problem)
    assert _relative_max(solution.u, expected.u) <= 1e-9
    sigma = np.broadcast_to(np.array([1.0, 1j])[None, :, None], solution.sigma.shape)
    assert _relative_max(solution.sigma, sigma) <= 1e-9


@pytest.mark.parametrize("method", ["ldg1", "ldg2", "ipdg-primal", "fem-p1"])
@pytest.mark.parametrize("k, m", [(1.0, 2), (10.0, 4), (25.0, 3)])
def test_zero_data_gives_zero_solution(method, k, m, paper_params):
    mesh = build_structured_mesh(m)
    result = solve_problem(method, mesh, zero_problem(k), paper_params)
    assert np.max(np.abs(result.solution.u)) <= 1e-12
    assert np.max(np.abs(result.solution.sigma)) <= 1e-12


@pytest.mark.parametrize("method", ["ldg1", "ldg2", "ipdg-primal"])
def test_matrix_does_not_depend_on_labels(method, mesh4, paper_params):
    rng = np.random.default_rng(3)
    shuffled = relabel(mesh4, rng.permutation(mesh4.n_triangles))
    original = ASSEMBLERS[method](mesh4, 6.0, paper_params).matrix.toarray()
    relabeled = ASSEMBLERS[method](shuffled, 6.0, paper_params).matrix.toarray()
    assert _relative_max(relabeled, original) <= 1e-12


@pytest.mark.parametrize("params", beta_sweep() + delta_sweep())
def test_sweep_parameters_assemble(params, mesh4):
    system = assemble_ldg1(mesh4, 5.0, params)
    assert system.matrix.shape == (288, 288)


def test_flux_reconstruction_of_linear_interpolant(mesh4, paper_params):
    interpolant = nodal_interpolant(mesh4, linear_problem(2.0))
    sigma = reconstruct_flux(mesh4, paper_params, interpolant.u)
    assert np.allclose(sigma[:, 0, :], 1.0)
    assert np.allclose(sigma[:, 1, :], 1j)


def test_rhs_sigma_part_is_zero(mesh4):
    problem = bessel_problem(4.0)
    rhs = assemble_rhs(mesh4, 4.0, problem, DofMap(mesh4.n_triangles))
    assert np.all(rhs[96:] == 0)
    assert np.any(rhs[:96] != 0)


def test_rhs_rejects_mismatched_wave_number(mesh4):
    with pytest.raises(ValueError):
        assemble_rhs(mesh4, 5.0, bessel_problem(4.0), DofMap(mesh4.n_triangles))


def test_fem_rhs_sums_element_loads(mesh4):
    problem = linear_problem(3.0)
    fem = assemble_conforming_fem(mesh4, 3.0, problem)
    dg = assemble_rhs(mesh4, 3.0, problem, DofMap(mesh4.n_triangles, mixed=False))
    assert fem.rhs.sum() == pytest.approx(dg.sum())
    assert fem.matrix.shape == (25, 25)


@pytest.mark.parametrize("k", [0.0, -2.0])
def test_nonpositive_k_rejected(k, mesh4, paper_params):
    with pytest.raises(ValueError, match="k must be positive"):
        assemble_ldg1(mesh4, k, paper_params)


def test_flux_params_validation():
    with pytest.raises(ValueError, match="beta0 must be positive"):
        FluxParams(beta0=0.0)
    with pytest.raises(ValueError, match="delta0 must be positive"):
        FluxParams(delta0=-1.0)
    with pytest.raises(ValueError):
        FluxParams(beta_scaling="quadratic")
    with pytest.raises(ValueError, match="unknown method"):
        check_method("hdg")


def test_flux_params_scaling():
    lengths = np.array([0.5, 0.25])
    params = FluxParams(beta0=0.001, delta0=0.1)
    assert np.allclose(params.beta(lengths), [0.002, 0.004])
    assert np.allclose(params.delta(lengths), [0.05, 0.025])
    assert FluxParams.from_dict(params.as_dict()) == params
    assert params.label == "beta=0.001/h_e, delta=0.1h_e"
