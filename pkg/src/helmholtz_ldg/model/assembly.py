"""
Assembly of the complex linear systems.

Unknowns are discontinuous P1 fields: three scalar dofs per triangle for u_h
and three per component for sigma_h. Mixed systems order all u dofs first
(3t + a), then sigma dofs (N_u + 6t + 3c + a). Forms are conjugate-linear in
the test function; with real nodal bases the matrix entry (i, j) is the form
evaluated at trial basis j and test basis i.

Jumps and averages on an interior edge with neighbours K (bigger label,
normal n) and K':  [[v]] = (v_K - v_K') n,  [[tau]] = (tau_K - tau_K').n,
{.} = arithmetic mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from helmholtz_ldg.discretization.basis import barycentric, edge_points, p1_gradients, triangle_points
from helmholtz_ldg.discretization.quadrature import (
    DATA_EDGE_DEGREE,
    DATA_TRIANGLE_DEGREE,
    POLYNOMIAL_EDGE_DEGREE,
    edge_rule,
    triangle_rule,
)
from helmholtz_ldg.geometry.mesh import Mesh
from helmholtz_ldg.linalg.sparse import from_triplets
from helmholtz_ldg.model.flux_settings import FluxParams
from helmholtz_ldg.problem.helmholtz import HelmholtzProblem

SIDE_SIGNS = np.array([1.0, -1.0])
_P1_MASS = (np.ones((3, 3)) + np.eye(3)) / 12.0


@dataclass(frozen=True)
class DofMap:
    n_triangles: int
    mixed: bool = True

    @property
    def n_u(self) -> int:
        return 3 * self.n_triangles

    @property
    def n_sigma(self) -> int:
        return 6 * self.n_triangles if self.mixed else 0

    @property
    def size(self) -> int:
        return self.n_u + self.n_sigma

    @property
    def u_dofs(self) -> np.ndarray:
        return np.arange(self.n_u).reshape(self.n_triangles, 3)

    def sigma_dofs(self, offset: bool = True) -> np.ndarray:
        start = self.n_u if offset else 0
        return start + np.arange(6 * self.n_triangles).reshape(self.n_triangles, 2, 3)


@dataclass
class AssembledSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray | None
    dofmap: DofMap | None
    method: str
    k: float
    params: FluxParams | None
    metadata: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


class _Triplets:
    def __init__(self):
        self.rows: list[np.ndarray] = []
        self.cols: list[np.ndarray] = []
        self.values: list[np.ndarray] = []

    def add(self, rows: np.ndarray, cols: np.ndarray, values: np.ndarray) -> None:
        rows, cols, values = np.broadcast_arrays(rows, cols, values)
        self.rows.append(rows.ravel())
        self.cols.append(cols.ravel())
        self.values.append(values.ravel())

    def matrix(self, shape: tuple[int, int]) -> sp.csr_matrix:
        if not self.rows:
            return sp.csr_matrix(shape, dtype=complex)
        return from_triplets(self.rows, self.cols, self.values, shape)


def _check_inputs(k: float, params: FluxParams | None) -> float:
    k = float(k)
    if not k > 0:
        raise ValueError("k must be positive")
    if params is not None and not isinstance(params, FluxParams):
        raise ValueError("params must be FluxParams")
    return k


class _ElementData:
    def __init__(self, mesh: Mesh):
        self.areas = mesh.areas
        self.grads = p1_gradients(mesh)
        self.mass = self.areas[:, None, None] * _P1_MASS
        self.stiffness = self.areas[:, None, None] * np.einsum("tad,tbd->tab", self.grads, self.grads)


class _InteriorEdgeData:
    """Traces of both neighbours on every interior edge, side 0 = K, side 1 = K'."""

    def __init__(self, mesh: Mesh, grads: np.ndarray, params: FluxParams | None):
        edges = mesh.interior_edges
        self.triangles = mesh.edge_triangles[edges]
        self.normals = mesh.edge_normals[edges]
        self.lengths = mesh.edge_lengths[edges]
        rule = edge_rule(POLYNOMIAL_EDGE_DEGREE)
        points = edge_points(mesh, edges, rule.points)
        weights = self.lengths[:, None] * rule.weights[None, :]
        traces = np.stack(
            [barycentric(mesh, self.triangles[:, 0], points), barycentric(mesh, self.triangles[:, 1], points)],
            axis=1,
        )
        # int_e lambda^s_a lambda^r_b  and  int_e lambda^s_a
        self.mass = np.einsum("eq,esqa,erqb->esarb", weights, traces, traces)
        self.integral = np.einsum("eq,esqa->esa", weights, traces)
        # grad lambda^s_a . n
        self.grad_normal = np.einsum("esad,ed->esa", grads[self.triangles], self.normals)
        if params is not None:
            self.beta, self.delta = params.on_interior_edges(mesh)

    def __len__(self) -> int:
        return len(self.triangles)


def _boundary_mass(mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
    edges = mesh.boundary_edges
    owners = mesh.edge_triangles[edges, 0]
    rule = edge_rule(POLYNOMIAL_EDGE_DEGREE)
    points = edge_points(mesh, edges, rule.points)
    traces = barycentric(mesh, owners, points)
    weights = mesh.edge_lengths[edges, None] * rule.weights[None, :]
    return owners, np.einsum("eq,eqa,eqb->eab", weights, traces, traces)


def _volume_blocks(triplets: _Triplets, elements: _ElementData, k: float, u_dofs, sigma_dofs, primal: bool) -> None:
    uu = -(k**2) * elements.mass
    if primal:
        uu = uu + elements.stiffness
    triplets.add(u_dofs[:, :, None], u_dofs[:, None, :], uu)
    if sigma_dofs is None:
        return
    # (chi, grad v): test a, trial (c, b)
    coupling = (elements.areas / 3.0)[:, None, None, None] * elements.grads[:, :, :, None]
    coupling = np.broadcast_to(coupling, coupling.shape[:3] + (3,))
    triplets.add(u_dofs[:, :, None, None], sigma_dofs[:, None, :, :], coupling)
    # -(grad w, tau): test (c, a), trial b
    triplets.add(sigma_dofs[:, :, :, None], u_dofs[:, None, None, :], -np.transpose(coupling, (0, 2, 3, 1)))
    # (chi, tau) componentwise
    for c in range(2):
        triplets.add(sigma_dofs[:, c, :, None], sigma_dofs[:, c, None, :], elements.mass)


def _boundary_block(triplets: _Triplets, mesh: Mesh, k: float, u_dofs) -> None:
    owners, mass = _boundary_mass(mesh)
    dofs = u_dofs[owners]
    triplets.add(dofs[:, :, None], dofs[:, None, :], 1j * k * mass)


def _jump_penalty(edges: _InteriorEdgeData) -> np.ndarray:
    """i beta <[[w]], [[v]]> as (e, s, a, r, b)."""
    signs = SIDE_SIGNS[:, None, None, None] * SIDE_SIGNS[None, None, :, None]
    return 1j * edges.beta[:, None, None, None, None] * signs[None] * edges.mass


def _average_gradient_against_jump(edges: _InteriorEdgeData) -> np.ndarray:
    """-<{grad w}, [[v]]>: test (s, a), trial (r, b)."""
    return -0.5 * np.einsum("s,esa,erb->esarb", SIDE_SIGNS, edges.integral, edges.grad_normal)


def _u_to_sigma_edge_terms(edges: _InteriorEdgeData, gradient_jump: bool) -> np.ndarray:
    """
    Edge part of the sigma equation tested by tau, trial w, as (e, c, s, a, r, b):
    -i delta <[[grad w]], [[tau]]> (LDG#1 only) + <[[w]], {tau}>.
    """
    n = edges.normals
    block = 0.5 * np.einsum("r,ec,esarb->ecsarb", SIDE_SIGNS, n, edges.mass)
    if gradient_jump:
        block = block - 1j * np.einsum(
            "e,r,erb,s,ec,esa->ecsarb", edges.delta, SIDE_SIGNS, edges.grad_normal, SIDE_SIGNS, n, edges.integral
        )
    return block


def _edge_dofs(edges: _InteriorEdgeData, u_dofs, sigma_dofs):
    u = u_dofs[edges.triangles]  # (e, s, a)
    sigma = None if sigma_dofs is None else np.transpose(sigma_dofs[edges.triangles], (0, 2, 1, 3))  # (e, c, s, a)
    return u, sigma


def _assemble_mixed(mesh: Mesh, k: float, params: FluxParams, method: str) -> AssembledSystem:
    k = _check_inputs(k, params)
    dofmap = DofMap(mesh.n_triangles)
    u_dofs, sigma_dofs = dofmap.u_dofs, dofmap.sigma_dofs()
    elements = _ElementData(mesh)
    edges = _InteriorEdgeData(mesh, elements.grads, params)
    triplets = _Triplets()

    _volume_blocks(triplets, elements, k, u_dofs, sigma_dofs, primal=False)
    _boundary_block(triplets, mesh, k, u_dofs)

    if len(edges):
        eu, esigma = _edge_dofs(edges, u_dofs, sigma_dofs)
        ldg1 = method == "ldg1"
        uu = _jump_penalty(edges)
        if ldg1:
            uu = uu + _average_gradient_against_jump(edges)
        triplets.add(eu[:, :, :, None, None], eu[:, None, None, :, :], uu)

        sigma_u = _u_to_sigma_edge_terms(edges, gradient_jump=ldg1)
        triplets.add(esigma[:, :, :, :, None, None], eu[:, None, None, None, :, :], sigma_u)

        if not ldg1:
            n = edges.normals
            # -<{chi}, [[v]]>: test v (s, a), trial chi (c, r, b)
            u_sigma = -0.5 * np.einsum("s,ec,esarb->esacrb", SIDE_SIGNS, n, edges.mass)
            triplets.add(eu[:, :, :, None, None, None], esigma[:, None, None, :, :, :], u_sigma)
            # -i delta <[[chi]], [[tau]]>: test (d, s, a), trial (c, r, b)
            sigma_sigma = -1j * np.einsum(
                "e,s,r,ed,ec,esarb->edsacrb", edges.delta, SIDE_SIGNS, SIDE_SIGNS, n, n, edges.mass
            )
            triplets.add(
                esigma[:, :, :, :, None, None, None], esigma[:, None, None, None, :, :, :], sigma_sigma
            )

    matrix = triplets.matrix((dofmap.size, dofmap.size))
    return AssembledSystem(matrix=matrix, rhs=None, dofmap=dofmap, method=method, k=k, params=params)


def assemble_ldg1(mesh: Mesh, k: float, params: FluxParams) -> AssembledSystem:
    """Mixed form A_h: interior fluxes {grad u_h} - i beta [[u_h]] and {u_h} + i delta [[grad u_h]]."""
    return _assemble_mixed(mesh, k, params, "ldg1")


def assemble_ldg2(mesh: Mesh, k: float, params: FluxParams) -> AssembledSystem:
    """Mixed form B_h: interior fluxes {sigma_h} - i beta [[u_h]] and {u_h} + i delta [[sigma_h]]."""
    return _assemble_mixed(mesh, k, params, "ldg2")


def assemble_primal_ipdg(mesh: Mesh, k: float, params: FluxParams) -> AssembledSystem:
    """The u-only form obtained from LDG#1 by eliminating sigma_h elementwise."""
    k = _check_inputs(k, params)
    dofmap = DofMap(mesh.n_triangles, mixed=False)
    u_dofs = dofmap.u_dofs
    elements = _ElementData(mesh)
    edges = _InteriorEdgeData(mesh, elements.grads, params)
    triplets = _Triplets()

    _volume_blocks(triplets, elements, k, u_dofs, None, primal=True)
    _boundary_block(triplets, mesh, k, u_dofs)

    if len(edges):
        eu, _ = _edge_dofs(edges, u_dofs, None)
        signed_gn = SIDE_SIGNS[None, :, None] * edges.grad_normal
        # i delta <[[grad w]], [[grad v]]>, gradients constant along the edge
        gradient_penalty = 1j * (edges.delta * edges.lengths)[:, None, None, None, None] * np.einsum(
            "esa,erb->esarb", signed_gn, signed_gn
        )
        # -<[[w]], {grad v}>
        consistency = -0.5 * np.einsum("r,erb,esa->esarb", SIDE_SIGNS, edges.integral, edges.grad_normal)
        block = gradient_penalty + _jump_penalty(edges) + _average_gradient_against_jump(edges) + consistency
        triplets.add(eu[:, :, :, None, None], eu[:, None, None, :, :], block)

    matrix = triplets.matrix((dofmap.size, dofmap.size))
    return AssembledSystem(matrix=matrix, rhs=None, dofmap=dofmap, method="ipdg-primal", k=k, params=params)


def element_load(mesh: Mesh, problem: HelmholtzProblem) -> np.ndarray:
    """(f, lambda_a)_K + <g, lambda_a>_{dK ∩ Γ} for every triangle, shape (n_triangles, 3)."""
    rule = triangle_rule(DATA_TRIANGLE_DEGREE)
    points = triangle_points(mesh, rule.points)
    f = np.asarray(problem.source(points), dtype=complex)
    load = mesh.areas[:, None] * np.einsum("tq,q,qa->ta", f, rule.weights, rule.points)

    edges = mesh.boundary_edges
    owners = mesh.edge_triangles[edges, 0]
    erule = edge_rule(DATA_EDGE_DEGREE)
    epoints = edge_points(mesh, edges, erule.points)
    normals = np.broadcast_to(mesh.edge_normals[edges, None, :], epoints.shape)
    g = np.asarray(problem.boundary(epoints, normals), dtype=complex)
    traces = barycentric(mesh, owners, epoints)
    contribution = mesh.edge_lengths[edges, None] * np.einsum("eq,q,eqa->ea", g, erule.weights, traces)
    np.add.at(load, owners, contribution)
    return load


def assemble_rhs(mesh: Mesh, k: float, problem: HelmholtzProblem, dofmap: DofMap) -> np.ndarray:
    """F(v, tau) = (f, v) + <g, v>_Γ; all sigma test entries are zero."""
    _check_inputs(k, None)
    if abs(problem.k - k) > 1e-14 * max(1.0, abs(k)):
        raise ValueError(f"problem wave number {problem.k} does not match k={k}")
    if dofmap.n_triangles != mesh.n_triangles:
        raise ValueError("dofmap does not match mesh")
    rhs = np.zeros(dofmap.size, dtype=complex)
    rhs[: dofmap.n_u] = element_load(mesh, problem).ravel()
    return rhs


def _sigma_equation_block(mesh: Mesh, params: FluxParams) -> sp.csr_matrix:
    """A_sigma,u of LDG#1 with unshifted sigma rows, shape (N_sigma, N_u)."""
    dofmap = DofMap(mesh.n_triangles)
    u_dofs, sigma_dofs = dofmap.u_dofs, dofmap.sigma_dofs(offset=False)
    elements = _ElementData(mesh)
    edges = _InteriorEdgeData(mesh, elements.grads, params)
    triplets = _Triplets()
    coupling = (elements.areas / 3.0)[:, None, None, None] * elements.grads[:, :, :, None]
    coupling = np.broadcast_to(coupling, coupling.shape[:3] + (3,))
    triplets.add(sigma_dofs[:, :, :, None], u_dofs[:, None, None, :], -np.transpose(coupling, (0, 2, 3, 1)))
    if len(edges):
        eu, esigma = _edge_dofs(edges, u_dofs, sigma_dofs)
        block = _u_to_sigma_edge_terms(edges, gradient_jump=True)
        triplets.add(esigma[:, :, :, :, None, None], eu[:, None, None, None, :, :], block)
    return triplets.matrix((dofmap.n_sigma, dofmap.n_u))


def reconstruct_flux(mesh: Mesh, params: FluxParams, u_coeffs) -> np.ndarray:
    """
    sigma_h from (sigma_h, tau) = (grad u_h, tau) + sum_e (i delta <[[grad u_h]], [[tau]]> - <[[u_h]], {tau}>).

    Returns coefficients of shape (n_triangles, 2, 3); the solve is elementwise.
    """
    u_coeffs = np.asarray(u_coeffs, dtype=complex).ravel()
    if u_coeffs.shape[0] != 3 * mesh.n_triangles:
        raise ValueError(f"expected {3 * mesh.n_triangles} u coefficients, got {u_coeffs.shape[0]}")
    rhs = -(_sigma_equation_block(mesh, params) @ u_coeffs)
    mass = _ElementData(mesh).mass
    try:
        sigma = np.linalg.solve(mass[:, None, :, :], rhs.reshape(mesh.n_triangles, 2, 3, 1))
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"degenerate element mass matrix: {exc}") from exc
    return sigma[..., 0]


def eliminate_sigma(system: AssembledSystem) -> sp.csr_matrix:
    """Schur complement A_uu - A_u,sigma M^{-1} A_sigma,u of a mixed LDG#1 system."""
    if system.dofmap is None or not system.dofmap.mixed:
        raise ValueError("sigma elimination needs a mixed system")
    n_u = system.dofmap.n_u
    a = system.matrix.tocsr()
    a_uu = a[:n_u, :n_u]
    a_us = a[:n_u, n_u:]
    a_su = a[n_u:, :n_u]
    a_ss = a[n_u:, n_u:]
    n_blocks = system.dofmap.n_sigma // 3
    blocks = np.empty((n_blocks, 3, 3), dtype=complex)
    dense = a_ss.tocoo()
    rows, cols = dense.row, dense.col
    if np.any(rows // 3 != cols // 3):
        raise ValueError("sigma block is not block-diagonal (LDG#2 cannot be condensed elementwise)")
    blocks[:] = 0
    blocks[rows // 3, rows % 3, cols % 3] = dense.data
    inverse = sp.block_diag(list(np.linalg.inv(blocks)), format="csr")
    schur = a_uu - a_us @ inverse @ a_su
    return from_triplets(*_coo_parts(schur), shape=schur.shape)


def _coo_parts(matrix: sp.spmatrix):
    coo = matrix.tocoo()
    return coo.row, coo.col, coo.data


def assemble_conforming_fem(mesh: Mesh, k: float, problem: HelmholtzProblem | None = None) -> AssembledSystem:
    """Continuous P1: (grad u, grad v) - k²(u, v) + ik<u, v>_Γ = (f, v) + <g, v>_Γ on vertex dofs."""
    k = _check_inputs(k, None)
    elements = _ElementData(mesh)
    triplets = _Triplets()
    tri = mesh.triangles
    triplets.add(tri[:, :, None], tri[:, None, :], elements.stiffness - k**2 * elements.mass)
    owners, boundary_mass = _boundary_mass(mesh)
    triplets.add(tri[owners][:, :, None], tri[owners][:, None, :], 1j * k * boundary_mass)
    shape = (mesh.n_vertices, mesh.n_vertices)
    matrix = triplets.matrix(shape)

    rhs = None
    if problem is not None:
        load = element_load(mesh, problem).ravel()
        flat = tri.ravel()
        rhs = np.bincount(flat, weights=load.real, minlength=mesh.n_vertices) + 1j * np.bincount(
            flat, weights=load.imag, minlength=mesh.n_vertices
        )
    return AssembledSystem(matrix=matrix, rhs=rhs, dofmap=None, method="fem-p1", k=k, params=None)


ASSEMBLERS = {
    "ldg1": assemble_ldg1,
    "ldg2": assemble_ldg2,
    "ipdg-primal": assemble_primal_ipdg,
}
