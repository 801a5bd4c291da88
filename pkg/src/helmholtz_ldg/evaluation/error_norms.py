"""
Broken Sobolev norms, DG norms and error reports.

All integrals use the degree-5 triangle rule and the degree-7 edge rule.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from helmholtz_ldg.discretization.basis import barycentric, edge_points, p1_gradients, triangle_points
from helmholtz_ldg.discretization.quadrature import DATA_EDGE_DEGREE, DATA_TRIANGLE_DEGREE, edge_rule, triangle_rule
from helmholtz_ldg.geometry.mesh import Mesh, domain_info
from helmholtz_ldg.model.flux_settings import FluxParams
from helmholtz_ldg.model.solve import DiscreteSolution, nodal_interpolant
from helmholtz_ldg.problem.helmholtz import HelmholtzProblem

NORM_NAMES = ("h1", "l2", "l2_boundary", "sigma", "dg", "dg_pair")


@dataclass
class ErrorReport:
    method: str
    k: float
    m: int
    h: float
    h1_error: float
    l2_error: float
    l2_boundary_error: float
    sigma_error: float
    dg_error: float
    dg_pair_error: float
    h1_relative: float
    l2_relative: float
    l2_boundary_relative: float
    sigma_relative: float
    dg_relative: float
    dg_pair_relative: float
    uh_dg_norm: float
    uh_sigma_dg_norm: float
    wall_time: float = 0.0
    beta0: float | None = None
    delta0: float | None = None
    beta_scaling: str | None = None
    delta_scaling: str | None = None
    triangle_degree: int = DATA_TRIANGLE_DEGREE
    edge_degree: int = DATA_EDGE_DEGREE

    def error(self, norm: str) -> float:
        return getattr(self, f"{norm}_error")

    def relative(self, norm: str) -> float:
        return getattr(self, f"{norm}_relative")

    def as_record(self) -> dict:
        """Flat record with stable field names; NaN becomes None."""
        return {key: (None if isinstance(value, float) and math.isnan(value) else value) for key, value in asdict(self).items()}


class _Samples:
    """Quadrature samples of a discrete and an exact field on the whole mesh."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        self.rule = triangle_rule(DATA_TRIANGLE_DEGREE)
        self.edge_rule = edge_rule(DATA_EDGE_DEGREE)
        self.points = triangle_points(mesh, self.rule.points)
        self.grads = p1_gradients(mesh)
        self.boundary = mesh.boundary_edges
        self.owners = mesh.edge_triangles[self.boundary, 0]
        self.boundary_points = edge_points(mesh, self.boundary, self.edge_rule.points)
        self.traces = barycentric(mesh, self.owners, self.boundary_points)
        self.volume_weights = mesh.areas[:, None] * self.rule.weights[None, :]
        self.edge_weights = mesh.edge_lengths[self.boundary, None] * self.edge_rule.weights[None, :]

    def discrete(self, solution: DiscreteSolution | None):
        n = self.mesh.n_triangles
        if solution is None:
            zeros = np.zeros
            return (
                zeros(self.points.shape[:2], complex),
                zeros((n, 2), complex),
                zeros(self.points.shape, complex),
                zeros(self.boundary_points.shape[:2], complex),
            )
        u = np.asarray(solution.u)
        values = np.einsum("ta,qa->tq", u, self.rule.points)
        gradient = np.einsum("ta,tad->td", u, self.grads)
        sigma = np.einsum("tca,qa->tqc", np.asarray(solution.sigma), self.rule.points)
        trace = np.einsum("ea,eqa->eq", u[self.owners], self.traces)
        return values, gradient, sigma, trace

    def exact(self, problem: HelmholtzProblem | None):
        if problem is None:
            return None
        exact = problem.require_exact()
        u, grad = exact(self.points)
        u_b, grad_b = exact(self.boundary_points)
        return np.asarray(u, complex), np.asarray(grad, complex), np.asarray(u_b, complex), np.asarray(grad_b, complex)

    def squared_norms(self, solution: DiscreteSolution | None, problem: HelmholtzProblem | None) -> dict[str, float]:
        values, gradient, sigma, trace = self.discrete(solution)
        exact = self.exact(problem)
        if exact is None:
            u_ex = np.zeros_like(values)
            grad_ex = np.zeros(self.points.shape, complex)
            u_b = np.zeros_like(trace)
            grad_b = np.zeros(self.boundary_points.shape, complex)
        else:
            u_ex, grad_ex, u_b, grad_b = exact
        grad_diff = grad_ex - gradient[:, None, :]
        boundary_grad_diff = grad_b - gradient[self.owners][:, None, :]
        return {
            "h1": _weighted(self.volume_weights, np.sum(np.abs(grad_diff) ** 2, axis=-1)),
            "l2": _weighted(self.volume_weights, np.abs(u_ex - values) ** 2),
            "l2_boundary": _weighted(self.edge_weights, np.abs(u_b - trace) ** 2),
            "sigma": _weighted(self.volume_weights, np.sum(np.abs(grad_ex - sigma) ** 2, axis=-1)),
            "boundary_gradient": _weighted(self.edge_weights, np.sum(np.abs(boundary_grad_diff) ** 2, axis=-1)),
        }


def _weighted(weights: np.ndarray, values: np.ndarray) -> float:
    return float(np.sum(weights * values))


def _combine(squared: dict[str, float], k: float, star_constant: float) -> dict[str, float]:
    common = k**2 * squared["l2"] + k**2 * squared["l2_boundary"] + star_constant * squared["boundary_gradient"]
    return {
        "h1": math.sqrt(squared["h1"]),
        "l2": math.sqrt(squared["l2"]),
        "l2_boundary": math.sqrt(squared["l2_boundary"]),
        "sigma": math.sqrt(squared["sigma"]),
        "dg": math.sqrt(common + squared["h1"]),
        "dg_pair": math.sqrt(common + squared["sigma"]),
    }


def field_norms(mesh: Mesh, k: float, solution: DiscreteSolution | None, problem: HelmholtzProblem | None = None) -> dict[str, float]:
    """
    Norms of (u - u_h, sigma - sigma_h); a missing side counts as zero.

    ``dg`` is ||.||_DG = (k²||w||² + k²||w||²_Γ + c_Ω||∇_h w||²_Γ + |w|²_{1,h})^½,
    ``dg_pair`` the pair norm with ||chi||² in place of |w|²_{1,h}.
    """
    samples = _Samples(mesh)
    squared = samples.squared_norms(solution, problem)
    return _combine(squared, k, domain_info(mesh).star_constant)


def dg_norm(mesh: Mesh, k: float, solution: DiscreteSolution) -> float:
    return field_norms(mesh, k, solution)["dg"]


def dg_pair_norm(mesh: Mesh, k: float, solution: DiscreteSolution) -> float:
    return field_norms(mesh, k, solution)["dg_pair"]


def error_norms(
    mesh: Mesh,
    solution: DiscreteSolution,
    problem: HelmholtzProblem,
    k: float | None = None,
    params: FluxParams | None = None,
    wall_time: float = 0.0,
) -> ErrorReport:
    """Absolute and relative errors of a discrete solution against the exact solution."""
    problem.require_exact()
    k = problem.k if k is None else float(k)
    samples = _Samples(mesh)
    star = domain_info(mesh).star_constant
    errors = _combine(samples.squared_norms(solution, problem), k, star)
    exact_norms = _combine(samples.squared_norms(None, problem), k, star)
    own = _combine(samples.squared_norms(solution, None), k, star)

    def relative(name: str) -> float:
        reference = exact_norms[name]
        return errors[name] / reference if reference > 0 else math.nan

    return ErrorReport(
        method=solution.method,
        k=k,
        m=mesh.m,
        h=mesh.h,
        **{f"{name}_error": errors[name] for name in NORM_NAMES},
        **{f"{name}_relative": relative(name) for name in NORM_NAMES},
        uh_dg_norm=own["dg"],
        uh_sigma_dg_norm=own["dg_pair"],
        wall_time=wall_time,
        beta0=None if params is None else params.beta0,
        delta0=None if params is None else params.delta0,
        beta_scaling=None if params is None else params.beta_scaling,
        delta_scaling=None if params is None else params.delta_scaling,
    )


def interpolation_baseline(mesh: Mesh, problem: HelmholtzProblem) -> float:
    """Relative broken H1-seminorm error of the continuous P1 nodal interpolant."""
    interpolant = nodal_interpolant(mesh, problem)
    return error_norms(mesh, interpolant, problem).h1_relative
