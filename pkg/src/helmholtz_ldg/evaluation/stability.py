"""
Stability constants gamma_1 / gamma_2, the data functional M(f, g) and
empirical stability audits of the LDG solvers.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from helmholtz_ldg.discretization.basis import edge_points, triangle_points
from helmholtz_ldg.discretization.quadrature import DATA_EDGE_DEGREE, DATA_TRIANGLE_DEGREE, edge_rule, triangle_rule
from helmholtz_ldg.evaluation.error_norms import field_norms
from helmholtz_ldg.geometry.mesh import Mesh
from helmholtz_ldg.model.flux_settings import FluxParams, check_method, default_flux_params
from helmholtz_ldg.model.solve import solve_problem
from helmholtz_ldg.problem.helmholtz import HelmholtzProblem

AUDIT_METHODS = ("ldg1", "ldg2", "ipdg-primal")


@dataclass
class StabilityAudit:
    method: str
    k: float
    m: int
    beta0: float
    delta0: float
    beta_scaling: str
    delta_scaling: str
    gamma: float
    data_norm: float
    solution_norm: float
    ratio: float
    sigma_ratio: float | None = None

    def as_record(self) -> dict:
        return asdict(self)


def edge_stability_constants(k: float, lengths, params: FluxParams) -> tuple[float, float]:
    """gamma_1 and gamma_2 over an explicit set of interior edge lengths."""
    if not k > 0:
        raise ValueError("k must be positive")
    h = np.asarray(lengths, dtype=float)
    if h.size == 0:
        raise ValueError("stability constants need at least one interior edge")
    beta = params.beta(h)
    delta = params.delta(h)

    shared = (k**2 + 1) / (beta * h) + 1 / (beta * h**3)
    gamma1 = 1 + k + float(np.max(np.sqrt(beta / delta))) + float(np.max(shared + 1 / h**2))
    gamma2 = k + float(np.max(shared + (beta + delta) / h + delta / h**3))
    return gamma1, gamma2


def stability_constants(k: float, mesh: Mesh, params: FluxParams | None = None) -> tuple[float, float]:
    params = params or default_flux_params()
    return edge_stability_constants(k, mesh.edge_lengths[mesh.interior_edges], params)


def data_functional(mesh: Mesh, problem: HelmholtzProblem) -> float:
    """M(f, g) = ||f||_{L2(Omega)} + ||g||_{L2(Gamma)}."""
    rule = triangle_rule(DATA_TRIANGLE_DEGREE)
    points = triangle_points(mesh, rule.points)
    f = np.asarray(problem.source(points))
    volume = np.sum(mesh.areas[:, None] * rule.weights[None, :] * np.abs(f) ** 2)

    edges = mesh.boundary_edges
    segment = edge_rule(DATA_EDGE_DEGREE)
    boundary_points = edge_points(mesh, edges, segment.points)
    normals = np.broadcast_to(mesh.edge_normals[edges][:, None, :], boundary_points.shape)
    g = np.asarray(problem.boundary(boundary_points, normals))
    boundary = np.sum(mesh.edge_lengths[edges, None] * segment.weights[None, :] * np.abs(g) ** 2)
    return math.sqrt(float(volume)) + math.sqrt(float(boundary))


def stability_audit(
    method: str, mesh: Mesh, k: float, params: FluxParams | None, problem: HelmholtzProblem
) -> StabilityAudit:
    """
    Solve once and compare the discrete solution against the a priori bound.

    ldg1 and ipdg-primal: ratio = ||u_h||_DG k / (gamma_1 M(f,g));
    ldg2: ratio = |||(u_h, sigma_h)|||_DG k / (gamma_2 M(f,g)).
    ldg1 also reports ||sigma_h|| k / (gamma_1 (1 + (delta + 1/k) max 1/h_K) M(f,g)).
    """
    check_method(method)
    if method not in AUDIT_METHODS:
        raise ValueError(f"stability audit is defined for {', '.join(AUDIT_METHODS)}, not '{method}'")
    if problem.k != k:
        raise ValueError(f"problem data built for k={problem.k}, audit requested for k={k}")
    params = params or default_flux_params()
    data_norm = data_functional(mesh, problem)
    if not data_norm > 0:
        raise ValueError("stability ratio undefined for zero data (M(f,g) = 0)")

    gamma1, gamma2 = stability_constants(k, mesh, params)
    solution = solve_problem(method, mesh, problem, params).solution
    norms = field_norms(mesh, k, solution)

    sigma_ratio = None
    if method == "ldg2":
        gamma, solution_norm = gamma2, norms["dg_pair"]
    else:
        gamma, solution_norm = gamma1, norms["dg"]
        if method == "ldg1":
            lengths = mesh.edge_lengths[mesh.interior_edges]
            delta_max = float(np.max(params.delta(lengths)))
            diameters = mesh.edge_lengths[mesh.triangle_edges].max(axis=1)
            inverse_h = 1.0 / float(np.min(diameters))
            scale = gamma1 * (1 + (delta_max + 1 / k) * inverse_h) * data_norm
            sigma_ratio = norms["sigma"] * k / scale

    return StabilityAudit(
        method=method,
        k=float(k),
        m=mesh.m,
        beta0=params.beta0,
        delta0=params.delta0,
        beta_scaling=params.beta_scaling,
        delta_scaling=params.delta_scaling,
        gamma=gamma,
        data_norm=data_norm,
        solution_norm=solution_norm,
        ratio=solution_norm * k / (gamma * data_norm),
        sigma_ratio=sigma_ratio,
    )
