"""
Solve pipeline: assemble -> factorize/solve -> discrete fields.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from helmholtz_ldg.discretization.basis import p1_gradients
from helmholtz_ldg.geometry.mesh import Mesh
from helmholtz_ldg.linalg.sparse import sparse_lu_solve
from helmholtz_ldg.model.assembly import (
    ASSEMBLERS,
    AssembledSystem,
    assemble_conforming_fem,
    assemble_rhs,
    reconstruct_flux,
)
from helmholtz_ldg.model.flux_settings import FluxParams, check_method, default_flux_params
from helmholtz_ldg.problem.helmholtz import HelmholtzProblem


@dataclass(frozen=True)
class DiscreteSolution:
    """u_h coefficients (n_triangles, 3) and sigma_h coefficients (n_triangles, 2, 3), both discontinuous P1."""

    u: np.ndarray
    sigma: np.ndarray
    method: str

    def scaled(self, factor: complex) -> "DiscreteSolution":
        return DiscreteSolution(u=factor * self.u, sigma=factor * self.sigma, method=self.method)

    @classmethod
    def zeros(cls, mesh: Mesh, method: str = "zero") -> "DiscreteSolution":
        n = mesh.n_triangles
        return cls(u=np.zeros((n, 3), dtype=complex), sigma=np.zeros((n, 2, 3), dtype=complex), method=method)


@dataclass
class SolveResult:
    solution: DiscreteSolution
    system: AssembledSystem
    coefficients: np.ndarray
    wall_time: float


def piecewise_gradient_field(mesh: Mesh, u: np.ndarray) -> np.ndarray:
    """grad_h u_h as a (constant) P1 vector field, shape (n_triangles, 2, 3)."""
    grads = np.einsum("ta,tad->td", u, p1_gradients(mesh))
    return np.repeat(grads[:, :, None], 3, axis=2)


def nodal_interpolant(mesh: Mesh, problem: HelmholtzProblem) -> DiscreteSolution:
    """Continuous P1 interpolant of the exact solution at the mesh vertices."""
    exact = problem.require_exact()
    values, _ = exact(mesh.vertices)
    u = np.asarray(values, dtype=complex)[mesh.triangles]
    return DiscreteSolution(u=u, sigma=piecewise_gradient_field(mesh, u), method="interpolant")


def assemble_system(method: str, mesh: Mesh, problem: HelmholtzProblem, params: FluxParams | None = None) -> AssembledSystem:
    check_method(method)
    params = params or default_flux_params()
    k = problem.k
    if method == "fem-p1":
        return assemble_conforming_fem(mesh, k, problem)
    system = ASSEMBLERS[method](mesh, k, params)
    system.rhs = assemble_rhs(mesh, k, problem, system.dofmap)
    return system


def solve_problem(
    method: str, mesh: Mesh, problem: HelmholtzProblem, params: FluxParams | None = None
) -> SolveResult:
    """
    Assemble and solve one (method, mesh, k, params) cell.
    Wall time covers assembly, factorization, solve and flux post-processing.
    """
    params = params or default_flux_params()
    start = time.perf_counter()
    system = assemble_system(method, mesh, problem, params)
    x = sparse_lu_solve(system.matrix, system.rhs)
    n = mesh.n_triangles

    if method in ("ldg1", "ldg2"):
        u = x[: 3 * n].reshape(n, 3)
        sigma = x[3 * n :].reshape(n, 2, 3)
    elif method == "ipdg-primal":
        u = x.reshape(n, 3)
        sigma = reconstruct_flux(mesh, params, x)
    else:
        u = x[mesh.triangles]
        sigma = piecewise_gradient_field(mesh, u)

    wall_time = time.perf_counter() - start
    solution = DiscreteSolution(u=u, sigma=sigma, method=method)
    return SolveResult(solution=solution, system=system, coefficients=x, wall_time=wall_time)
