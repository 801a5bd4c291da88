import numpy as np
import pytest

from helmholtz_ldg.geometry.mesh import build_structured_mesh, mesh_from_arrays
from helmholtz_ldg.model.flux_settings import FluxParams


@pytest.fixture
def paper_params():
    return FluxParams(beta0=0.001, delta0=0.1, beta_scaling="inv-edge", delta_scaling="edge")


@pytest.fixture
def mesh4():
    return build_structured_mesh(4)


@pytest.fixture
def single_triangle():
    vertices = np.array([[-0.5, -0.5], [0.5, -0.5], [-0.5, 0.5]])
    return mesh_from_arrays(vertices, [[0, 1, 2]])


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Isolated output directory, also exported through the environment."""
    path = tmp_path / "output"
    monkeypatch.setenv("HELMHOLTZ_LDG_OUTPUT", str(path))
    return path
