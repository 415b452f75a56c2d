"""Exchange field, effective-field assembly, and energy bookkeeping."""

import numpy as np
import pytest

from crossmag.constants import MU0
from crossmag.errors import InvalidArgumentError
from crossmag.fields import (effective_field, energy_terms, exchange_field,
                             kernel_for, normalize_state, uniform_state)
from crossmag.materials import get_material
from crossmag.mesh import Mesh
from conftest import random_unit_field


def test_uniform_state_has_zero_exchange(cfas):
    mesh = Mesh(4, 4, 1, 2e-9, 2e-9, 2e-9)
    m = uniform_state(mesh, (0.6, 0.8, 0.0))
    H = exchange_field(mesh, None, cfas, m)
    assert np.abs(H).max() < 1e-6


def test_two_cell_exchange_value(cfas):
    # opposite spins two cells apart: |H_ex| = (2A/(mu0 Ms)) * 2/dx^2
    mesh = Mesh(2, 1, 1, 2e-9, 2e-9, 2e-9)
    m = np.zeros(mesh.shape + (3,))
    m[0, 0, 0] = (1.0, 0.0, 0.0)
    m[1, 0, 0] = (-1.0, 0.0, 0.0)
    H = exchange_field(mesh, None, cfas, m)
    assert H[0, 0, 0, 0] == pytest.approx(-17683882.565766145, rel=1e-12)
    assert H[1, 0, 0, 0] == pytest.approx(+17683882.565766145, rel=1e-12)


def test_exchange_respects_mask(cfas):
    # a vacuum gap decouples the two sides completely
    mesh = Mesh(3, 1, 1, 2e-9, 2e-9, 2e-9)
    mask = np.array([True, False, True]).reshape(3, 1, 1)
    m = np.zeros(mesh.shape + (3,))
    m[0, 0, 0] = (1.0, 0.0, 0.0)
    m[2, 0, 0] = (-1.0, 0.0, 0.0)
    H = exchange_field(mesh, mask, cfas, m)
    assert np.abs(H).max() == 0.0


def test_exchange_anisotropic_spacing(cms):
    # unequal dy contributes with its own 1/dy^2
    mesh = Mesh(1, 2, 1, 2e-9, 1e-9, 2e-9)
    m = np.zeros(mesh.shape + (3,))
    m[0, 0, 0] = (0.0, 0.0, 1.0)
    m[0, 1, 0] = (0.0, 1.0, 0.0)
    H = exchange_field(mesh, None, cms, m)
    coeff = 2 * cms.A / (MU0 * cms.Ms) / 1e-18
    np.testing.assert_allclose(H[0, 0, 0], (0.0, coeff, -coeff), rtol=1e-12)


def test_effective_field_is_sum_of_parts(geom, cfas, rng):
    from crossmag.demag import demag_field
    m = random_unit_field(rng, geom.mesh.shape)
    m[~geom.mask] = 0.0
    H_app = (1e4, -2e4, 3e3)
    kernel = kernel_for(geom.mesh)
    total = effective_field(geom.mesh, geom.mask, cfas, m, H_app, kernel=kernel)
    parts = exchange_field(geom.mesh, geom.mask, cfas, m)
    parts += demag_field(kernel, m, cfas.Ms, mask=geom.mask)
    parts[geom.mask] += np.asarray(H_app)
    np.testing.assert_allclose(total, parts, atol=1e-9 * np.abs(parts).max())
    assert np.abs(total[~geom.mask]).max() == 0.0


def test_exchange_field_is_energy_gradient(cfas, rng):
    # H_ex = -(1/(mu0 Ms V)) dE/dm, checked by central differences
    mesh = Mesh(4, 4, 1, 2e-9, 2e-9, 2e-9)
    m = random_unit_field(rng, mesh.shape)
    H = exchange_field(mesh, None, cfas, m)
    V = mesh.cell_volume
    h = 1e-6
    for idx in ((0, 0, 0, 0), (2, 1, 0, 1), (3, 3, 0, 2)):
        up = m.copy()
        dn = m.copy()
        up[idx] += h
        dn[idx] -= h
        e_up = energy_terms(mesh, None, cfas, up).exchange
        e_dn = energy_terms(mesh, None, cfas, dn).exchange
        grad = (e_up - e_dn) / (2 * h)
        assert -grad / (MU0 * cfas.Ms * V) == pytest.approx(H[idx], rel=1e-6)


def test_zeeman_energy(cms):
    mesh = Mesh(2, 2, 1, 2e-9, 2e-9, 2e-9)
    m = uniform_state(mesh, (1.0, 0.0, 0.0))
    e = energy_terms(mesh, None, cms, m, (1e5, 0.0, 0.0))
    expected = -MU0 * cms.Ms * mesh.cell_volume * 4 * 1e5
    assert e.zeeman == pytest.approx(expected, rel=1e-12)
    assert e.exchange == 0.0


def test_demag_energy_positive_for_uniform_film(co):
    mesh = Mesh(8, 8, 1, 2e-9, 2e-9, 2e-9)
    m = uniform_state(mesh, (0.0, 0.0, 1.0))
    e = energy_terms(mesh, None, co, m)
    assert e.demag > 0.0


def test_uniform_state_validation(cell_mesh):
    with pytest.raises(InvalidArgumentError):
        uniform_state(cell_mesh, (0.0, 0.0, 0.0))


def test_normalize_state(rng):
    m = rng.normal(size=(3, 2, 1, 3)) * 5.0
    out = normalize_state(m)
    np.testing.assert_allclose(np.linalg.norm(out, axis=-1), 1.0, rtol=1e-12)


def test_shape_mismatch(cfas):
    mesh = Mesh(2, 2, 1, 2e-9, 2e-9, 2e-9)
    with pytest.raises(InvalidArgumentError):
        exchange_field(mesh, None, cfas, np.zeros((1, 1, 1, 3)))
    with pytest.raises(InvalidArgumentError):
        effective_field(mesh, np.ones((3, 3, 1), bool), cfas,
                        np.zeros((2, 2, 1, 3)))
