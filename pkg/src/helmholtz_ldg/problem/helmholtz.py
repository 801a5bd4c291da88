"""
Helmholtz problem data: -Δu - k²u = f in Ω, ∂u/∂n + iku = g on Γ.

All callables take point arrays of shape (..., 2) and return arrays of the
leading shape; gradients carry a trailing axis of length 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from helmholtz_ldg.problem.special_functions import bessel_j0, bessel_j1

SMALL_KR = 1e-4
COEFFICIENT_FLOOR = 1e-14

PointFunction = Callable[[np.ndarray], np.ndarray]


class MissingExactSolutionError(ValueError):
    pass


@dataclass(frozen=True)
class HelmholtzProblem:
    k: float
    source: PointFunction
    boundary: Callable[[np.ndarray, np.ndarray], np.ndarray]
    exact: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]] | None = None
    name: str = "custom"

    @property
    def has_exact_solution(self) -> bool:
        return self.exact is not None

    def require_exact(self):
        if self.exact is None:
            raise MissingExactSolutionError(f"problem '{self.name}' has no exact solution")
        return self.exact

    def scaled(self, factor: complex) -> "HelmholtzProblem":
        """Problem with data (c f, c g) and exact solution c u."""
        exact = None
        if self.exact is not None:
            base = self.exact

            def exact(points):
                u, grad = base(points)
                return factor * u, factor * grad

        return HelmholtzProblem(
            k=self.k,
            source=lambda points: factor * self.source(points),
            boundary=lambda points, normals: factor * self.boundary(points, normals),
            exact=exact,
            name=f"{self.name}*{factor}",
        )


def _check_wave_number(k: float) -> float:
    k = float(k)
    if not k > 0:
        raise ValueError("k must be positive")
    return k


def _radius(points) -> tuple[np.ndarray, np.ndarray]:
    points = np.asarray(points, dtype=float)
    return points, np.hypot(points[..., 0], points[..., 1])


def bessel_coefficient(k: float) -> complex:
    """C = (cos k + i sin k) / (k (J0(k) + i J1(k)))."""
    k = _check_wave_number(k)
    denominator = bessel_j0(k) + 1j * bessel_j1(k)
    if abs(denominator) < COEFFICIENT_FLOOR:
        raise ValueError(f"J0(k) + iJ1(k) vanishes for k={k}")
    return np.exp(1j * k) / (k * denominator)


def exact_solution(k: float, points) -> tuple[np.ndarray, np.ndarray]:
    """u = cos(kr)/k - C J0(kr) and its gradient (radial chain rule)."""
    c = bessel_coefficient(k)
    points, r = _radius(points)
    kr = k * r
    u = np.cos(kr) / k - c * bessel_j0(kr)
    du_dr = -np.sin(kr) + c * k * bessel_j1(kr)
    safe_r = np.where(r > 0, r, 1.0)
    factor = np.where(r > 0, du_dr / safe_r, 0.0)
    grad = factor[..., None] * points
    return u, grad


def source_f(k: float, points) -> np.ndarray:
    """f = sin(kr)/r, with value k at the origin."""
    k = _check_wave_number(k)
    _, r = _radius(points)
    kr = k * r
    small = kr < SMALL_KR
    safe_r = np.where(small, 1.0, r)
    series = k * (1.0 - kr * kr / 6.0)
    return np.where(small, series, np.sin(kr) / safe_r).astype(complex)


def boundary_g(k: float, points, normals) -> np.ndarray:
    """g = ∇u·n + iku for the Bessel exact solution."""
    u, grad = exact_solution(k, points)
    return np.einsum("...d,...d->...", grad, np.asarray(normals, dtype=float)) + 1j * k * u


def bessel_problem(k: float) -> HelmholtzProblem:
    """The radial test problem with f = sin(kr)/r."""
    k = _check_wave_number(k)
    return HelmholtzProblem(
        k=k,
        source=lambda points: source_f(k, points),
        boundary=lambda points, normals: boundary_g(k, points, normals),
        exact=lambda points: exact_solution(k, points),
        name="bessel",
    )


def linear_problem(k: float) -> HelmholtzProblem:
    """Manufactured problem with exact solution u = x + iy (lies in every P1 space)."""
    k = _check_wave_number(k)

    def exact(points):
        points = np.asarray(points, dtype=float)
        u = points[..., 0] + 1j * points[..., 1]
        grad = np.broadcast_to(np.array([1.0, 1j]), points.shape).copy()
        return u, grad

    def boundary(points, normals):
        points = np.asarray(points, dtype=float)
        normals = np.asarray(normals, dtype=float)
        return normals[..., 0] + 1j * normals[..., 1] + 1j * k * (points[..., 0] + 1j * points[..., 1])

    return HelmholtzProblem(
        k=k,
        source=lambda points: -(k**2) * exact(points)[0],
        boundary=boundary,
        exact=exact,
        name="linear",
    )


def zero_problem(k: float) -> HelmholtzProblem:
    k = _check_wave_number(k)

    def zeros(points, normals=None):
        return np.zeros(np.asarray(points).shape[:-1], dtype=complex)

    def exact(points):
        shape = np.asarray(points).shape
        return np.zeros(shape[:-1], dtype=complex), np.zeros(shape, dtype=complex)

    return HelmholtzProblem(k=k, source=zeros, boundary=zeros, exact=exact, name="zero")


PROBLEMS = {
    "bessel": bessel_problem,
    "linear": linear_problem,
    "zero": zero_problem,
}


def make_problem(name: str, k: float) -> HelmholtzProblem:
    try:
        factory = PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown problem '{name}' (choose from {', '.join(PROBLEMS)})") from None
    return factory(k)
