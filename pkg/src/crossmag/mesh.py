"""Regular finite-difference grid and the cross-shaped occupancy geometry.

The free layer is the union of two centered rectangular arms: the short arm
runs along x (length l1, width w in y), the long arm along y (length l2,
width w in x). A cell belongs to the magnet iff its center lies inside that
union, with half-open [lo, hi) interval membership so that arm edges landing
exactly on a row of cell centers select a well-defined side.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import InvalidArgumentError

# Relative slack for "fits inside the box" checks against float noise.
_FIT_RTOL = 1e-9


@dataclass(frozen=True)
class Mesh:
    """Regular grid of nx*ny*nz cuboid cells with edge lengths dx, dy, dz (m)."""

    nx: int
    ny: int
    nz: int
    dx: float
    dy: float
    dz: float
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 1:
            raise InvalidArgumentError(f"cell counts must be >= 1, got {(self.nx, self.ny, self.nz)}")
        if min(self.dx, self.dy, self.dz) <= 0:
            raise InvalidArgumentError(f"cell sizes must be > 0, got {(self.dx, self.dy, self.dz)}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy * self.dz

    @property
    def box(self) -> tuple[float, float, float]:
        """Edge lengths of the bounding box (m)."""
        return (self.nx * self.dx, self.ny * self.dy, self.nz * self.dz)

    def cell_centers(self):
        """Center coordinates as three arrays broadcastable to ``shape``."""
        ox, oy, oz = self.origin
        x = ox + (np.arange(self.nx) + 0.5) * self.dx
        y = oy + (np.arange(self.ny) + 0.5) * self.dy
        z = oz + (np.arange(self.nz) + 0.5) * self.dz
        return x[:, None, None], y[None, :, None], z[None, None, :]


@dataclass(frozen=True)
class CrossSpec:
    """Cross geometry: arm width w, short-arm length l1 (x), long-arm length l2 (y), in meters."""

    w: float = 50e-9
    l1: float = 100e-9
    l2: float = 140e-9

    def __post_init__(self):
        if self.w <= 0:
            raise InvalidArgumentError(f"arm width must be > 0, got {self.w}")
        if self.l1 < self.w or self.l2 < self.w:
            raise InvalidArgumentError(
                f"arm lengths must be >= width: w={self.w}, l1={self.l1}, l2={self.l2}"
            )


class Region(IntEnum):
    """Per-cell region label; OVERLAP is the shared central w x w block."""

    VACUUM = 0
    SHORT_ARM = 1
    LONG_ARM = 2
    OVERLAP = 3


def build_mesh(box_x: float, box_y: float, box_z: float, cell: float) -> Mesh:
    """Build a mesh covering box_x * box_y * box_z with isotropic in-plane cells.

    Cell counts are the box dimensions over the cell size, rounded to nearest.
    When box_z <= cell the film is resolved as a single layer with dz = box_z.
    """
    if min(box_x, box_y, box_z) <= 0 or cell <= 0:
        raise InvalidArgumentError(
            f"box dimensions and cell size must be > 0, got box=({box_x}, {box_y}, {box_z}), cell={cell}"
        )
    nx = max(1, round(box_x / cell))
    ny = max(1, round(box_y / cell))
    if box_z <= cell:
        nz, dz = 1, box_z
    else:
        nz, dz = max(1, round(box_z / cell)), cell
    return Mesh(nx=nx, ny=ny, nz=nz, dx=cell, dy=cell, dz=dz)


def _check_fit(mesh: Mesh, spec: CrossSpec) -> None:
    bx, by, _ = mesh.box
    slack_x = _FIT_RTOL * bx
    slack_y = _FIT_RTOL * by
    if spec.l1 > bx + slack_x or spec.w > bx + slack_x:
        raise InvalidArgumentError(
            f"short arm (l1={spec.l1}) or width (w={spec.w}) exceeds box x extent {bx}"
        )
    if spec.l2 > by + slack_y or spec.w > by + slack_y:
        raise InvalidArgumentError(
            f"long arm (l2={spec.l2}) or width (w={spec.w}) exceeds box y extent {by}"
        )


def _arm_rectangles(mesh: Mesh, spec: CrossSpec):
    """In-mask predicates for the two arms, evaluated at cell centers."""
    bx, by, _ = mesh.box
    ox, oy, _ = mesh.origin
    cx, cy = ox + bx / 2, oy + by / 2
    x, y, _ = mesh.cell_centers()
    # Edges often land exactly on a row of centers; compare with a slack far
    # below the cell size so roundoff in lo/hi cannot flip the half-open rule.
    tol = 1e-6 * min(mesh.dx, mesh.dy)

    def inside(lo_x, hi_x, lo_y, hi_y):
        return ((x >= lo_x - tol) & (x < hi_x - tol)
                & (y >= lo_y - tol) & (y < hi_y - tol))

    in_short = inside(cx - spec.l1 / 2, cx + spec.l1 / 2, cy - spec.w / 2, cy + spec.w / 2)
    in_long = inside(cx - spec.w / 2, cx + spec.w / 2, cy - spec.l2 / 2, cy + spec.l2 / 2)
    shape = mesh.shape
    return np.broadcast_to(in_short, shape), np.broadcast_to(in_long, shape)


def cross_mask(mesh: Mesh, spec: CrossSpec) -> np.ndarray:
    """Boolean occupancy array of ``mesh.shape``: True inside the cross."""
    _check_fit(mesh, spec)
    in_short, in_long = _arm_rectangles(mesh, spec)
    return np.asarray(in_short | in_long)


def arm_regions(mesh: Mesh, spec: CrossSpec) -> np.ndarray:
    """Per-cell ``Region`` labels (int8 array of ``mesh.shape``)."""
    _check_fit(mesh, spec)
    in_short, in_long = _arm_rectangles(mesh, spec)
    labels = np.full(mesh.shape, Region.VACUUM, dtype=np.int8)
    labels[in_short] = Region.SHORT_ARM
    labels[in_long] = Region.LONG_ARM
    labels[in_short & in_long] = Region.OVERLAP
    return labels
