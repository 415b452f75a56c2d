"""Shared fixtures: default geometry, materials, and small meshes."""

import numpy as np
import pytest

from crossmag.experiments import Geometry
from crossmag.materials import get_material
from crossmag.mesh import CrossSpec, Mesh


@pytest.fixture(scope="session")
def geom():
    return Geometry.default()


@pytest.fixture(scope="session")
def cell_geom():
    """One-cell cross: an isotropic cube whose state is an exact equilibrium."""
    mesh = Mesh(1, 1, 1, 2e-9, 2e-9, 2e-9)
    return Geometry(mesh=mesh, spec=CrossSpec(w=2e-9, l1=2e-9, l2=2e-9))


@pytest.fixture(scope="session")
def cfas():
    return get_material("CFAS")


@pytest.fixture(scope="session")
def cms():
    return get_material("CMS")


@pytest.fixture(scope="session")
def co():
    return get_material("Co")


@pytest.fixture
def cell_mesh():
    """Single cubic cell, 2 nm."""
    return Mesh(1, 1, 1, 2e-9, 2e-9, 2e-9)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_unit_field(rng, shape):
    m = rng.normal(size=shape + (3,))
    return m / np.linalg.norm(m, axis=-1, keepdims=True)
