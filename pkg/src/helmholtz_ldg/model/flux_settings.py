from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from helmholtz_ldg.geometry.mesh import Mesh

SCALING_MODES = ("inv-edge", "edge", "const")
METHODS = ("ldg1", "ldg2", "ipdg-primal", "fem-p1")


@dataclass(frozen=True)
class FluxParams:
    """
    Penalty parameters of the numerical fluxes.

    beta_e = beta0 / h_e ("inv-edge"), beta0 * h_e ("edge") or beta0 ("const");
    delta_e likewise. h_e is the true edge length, so diagonals use sqrt(2)/m.
    """

    beta0: float = 0.001
    delta0: float = 0.1
    beta_scaling: str = "inv-edge"
    delta_scaling: str = "edge"

    def __post_init__(self):
        if not self.beta0 > 0:
            raise ValueError("beta0 must be positive")
        if not self.delta0 > 0:
            raise ValueError("delta0 must be positive")
        for name in ("beta_scaling", "delta_scaling"):
            if getattr(self, name) not in SCALING_MODES:
                raise ValueError(f"{name} must be one of {', '.join(SCALING_MODES)}")

    @property
    def label(self) -> str:
        return f"beta={_describe(self.beta0, self.beta_scaling)}, delta={_describe(self.delta0, self.delta_scaling)}"

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "FluxParams":
        unknown = set(data) - {"beta0", "delta0", "beta_scaling", "delta_scaling"}
        if unknown:
            raise ValueError(f"unknown flux parameter keys: {', '.join(sorted(unknown))}")
        return cls(**data)

    def beta(self, edge_lengths: np.ndarray) -> np.ndarray:
        return _scale(self.beta0, self.beta_scaling, edge_lengths)

    def delta(self, edge_lengths: np.ndarray) -> np.ndarray:
        return _scale(self.delta0, self.delta_scaling, edge_lengths)

    def on_interior_edges(self, mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
        lengths = mesh.edge_lengths[mesh.interior_edges]
        return self.beta(lengths), self.delta(lengths)


def _scale(value: float, mode: str, lengths: np.ndarray) -> np.ndarray:
    lengths = np.asarray(lengths, dtype=float)
    if mode == "inv-edge":
        return value / lengths
    if mode == "edge":
        return value * lengths
    return np.full_like(lengths, value)


def _describe(value: float, mode: str) -> str:
    if mode == "inv-edge":
        return f"{value:g}/h_e"
    if mode == "edge":
        return f"{value:g}h_e"
    return f"{value:g}"


def default_flux_params() -> FluxParams:
    """delta = 0.1 h_e, beta = 0.001 / h_e."""
    return FluxParams()


def beta_sweep() -> list[FluxParams]:
    """Fixed delta = 0.1 h_e, beta in {0.001/h_e, 0.01/h_e, 1/h_e, 1}."""
    return [
        FluxParams(beta0=0.001, delta0=0.1),
        FluxParams(beta0=0.01, delta0=0.1),
        FluxParams(beta0=1.0, delta0=0.1),
        FluxParams(beta0=1.0, delta0=0.1, beta_scaling="const"),
    ]


def delta_sweep() -> list[FluxParams]:
    """Fixed beta = 0.001/h_e, delta in {0.001 h_e, 0.1 h_e, 10 h_e, 0.1}."""
    return [
        FluxParams(beta0=0.001, delta0=0.001),
        FluxParams(beta0=0.001, delta0=0.1),
        FluxParams(beta0=0.001, delta0=10.0),
        FluxParams(beta0=0.001, delta0=0.1, delta_scaling="const"),
    ]


def check_method(method: str) -> str:
    if method not in METHODS:
        raise ValueError(f"unknown method '{method}' (choose from {', '.join(METHODS)})")
    return method
