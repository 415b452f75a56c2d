"""Mesh construction and cross-shape rasterization."""

import numpy as np
import pytest

from crossmag.errors import InvalidArgumentError
from crossmag.mesh import (CrossSpec, Mesh, Region, arm_regions, build_mesh,
                           cross_mask)


def test_mesh_properties():
    mesh = Mesh(4, 5, 2, 1e-9, 2e-9, 3e-9)
    assert mesh.shape == (4, 5, 2)
    assert mesh.n_cells == 40
    assert mesh.cell_volume == pytest.approx(6e-27)
    assert mesh.box == pytest.approx((4e-9, 10e-9, 6e-9))


def test_mesh_validation():
    with pytest.raises(InvalidArgumentError):
        Mesh(0, 1, 1, 1e-9, 1e-9, 1e-9)
    with pytest.raises(InvalidArgumentError):
        Mesh(1, 1, 1, 0.0, 1e-9, 1e-9)


def test_cell_centers():
    mesh = Mesh(2, 3, 1, 2e-9, 2e-9, 2e-9)
    x, y, z = mesh.cell_centers()
    assert x.ravel() == pytest.approx([1e-9, 3e-9])
    assert y.ravel() == pytest.approx([1e-9, 3e-9, 5e-9])
    assert z.ravel() == pytest.approx([1e-9])


def test_build_mesh_default_film():
    mesh = build_mesh(100e-9, 140e-9, 2e-9, 2e-9)
    assert mesh.shape == (50, 70, 1)
    assert mesh.dz == pytest.approx(2e-9)


def test_build_mesh_resolves_thickness():
    mesh = build_mesh(100e-9, 140e-9, 2e-9, 1e-9)
    assert mesh.shape == (100, 140, 2)


def test_build_mesh_rounds_counts():
    mesh = build_mesh(99e-9, 141e-9, 2e-9, 2e-9)
    assert (mesh.nx, mesh.ny) == (50, 70)


def test_cross_spec_validation():
    with pytest.raises(InvalidArgumentError):
        CrossSpec(w=60e-9, l1=50e-9)
    with pytest.raises(InvalidArgumentError):
        CrossSpec(w=0.0)


def test_cross_does_not_fit():
    mesh = build_mesh(40e-9, 40e-9, 2e-9, 2e-9)
    with pytest.raises(InvalidArgumentError):
        cross_mask(mesh, CrossSpec())


def test_default_cross_cell_counts(geom):
    # 50x25 short arm + 25x70 long arm - 25x25 shared block = 2375 cells
    assert int(geom.mask.sum()) == 2375
    regions = geom.regions
    assert int((regions == Region.OVERLAP).sum()) == 625
    assert int((regions == Region.SHORT_ARM).sum()) == 625
    assert int((regions == Region.LONG_ARM).sum()) == 1125
    assert int((regions == Region.VACUUM).sum()) == 50 * 70 - 2375


def test_mask_matches_regions(geom):
    assert np.array_equal(geom.mask, geom.regions != Region.VACUUM)


def test_mask_centrosymmetric_for_even_cell_width():
    # a 24-cell-wide cross centers exactly on the 50x70 grid, so the mask
    # maps onto itself under in-plane point inversion
    mesh = build_mesh(100e-9, 140e-9, 2e-9, 2e-9)
    spec = CrossSpec(w=48e-9, l1=100e-9, l2=140e-9)
    mask = cross_mask(mesh, spec)
    regions = arm_regions(mesh, spec)
    assert np.array_equal(mask, mask[::-1, ::-1, :])
    assert np.array_equal(regions, regions[::-1, ::-1, :])


def test_default_mask_offset_is_one_half_cell(geom):
    # 25-cell arm bands cannot center exactly on 50- and 70-cell axes; the
    # half-open rasterization keeps the low edge, so point inversion equals
    # a one-cell shift toward high indices
    flipped = geom.mask[::-1, ::-1, :]
    assert np.array_equal(flipped, np.roll(geom.mask, (1, 1), axis=(0, 1)))


def test_mask_bounding_extents(geom):
    occ_x = np.where(geom.mask.any(axis=(1, 2)))[0]
    occ_y = np.where(geom.mask.any(axis=(0, 2)))[0]
    assert occ_x.min() == 0 and occ_x.max() == 49     # short arm spans x
    assert occ_y.min() == 0 and occ_y.max() == 69     # long arm spans y


def test_long_arm_column_width(geom):
    # outside the short arm's y band, occupied columns are the 25-wide bar
    col = geom.mask[:, 0, 0]
    assert int(col.sum()) == 25
    assert col[12] and col[36] and not col[11] and not col[37]


def test_off_grid_cross_still_counts():
    # cell size that puts arm edges between cell centers, not on them
    mesh = build_mesh(102e-9, 144e-9, 2e-9, 3e-9)
    mask = cross_mask(mesh, CrossSpec())
    regions = arm_regions(mesh, CrossSpec())
    assert int(mask.sum()) == int((regions != Region.VACUUM).sum())
    assert int(mask.sum()) > 0
