"""Magnetostatic (shape-anisotropy) field via the Newell cell-averaged tensor.

The interaction tensor N between two cuboid cells is assembled from the
Newell f/g potentials, reduced to a 27-point stencil per offset with weights
(-1, 2, -1) per axis. The field of a magnetization state is H = -N * (Ms m),
evaluated either by zero-padded FFT convolution (production path) or by
direct pairwise summation (reference path for small grids).

All tensor algebra is carried out in double precision; lengths are rescaled
by the largest cell edge before evaluating f/g, which keeps the guard
epsilons scale-free (N is dimensionless and invariant under uniform scaling).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _fft

from .errors import InvalidArgumentError
from .mesh import Mesh

# Guards against 0/0 in f/g; coordinates are O(1)..O(grid size) after rescaling.
_EPS = 1e-30

# Component order in the 6-vector: xx, yy, zz, xy, xz, yz.
COMP_XX, COMP_YY, COMP_ZZ, COMP_XY, COMP_XZ, COMP_YZ = range(6)


def _newell_f(x, y, z):
    x, y, z = np.abs(x), np.abs(y), np.abs(z)
    r = np.sqrt(x * x + y * y + z * z)
    return (
        0.5 * y * (z * z - x * x) * np.arcsinh(y / (np.sqrt(x * x + z * z) + _EPS))
        + 0.5 * z * (y * y - x * x) * np.arcsinh(z / (np.sqrt(x * x + y * y) + _EPS))
        - x * y * z * np.arctan(y * z / (x * r + _EPS))
        + (2.0 * x * x - y * y - z * z) * r / 6.0
    )


def _newell_g(x, y, z):
    z = np.abs(z)
    r = np.sqrt(x * x + y * y + z * z)
    return (
        x * y * z * np.arcsinh(z / (np.sqrt(x * x + y * y) + _EPS))
        + y / 6.0 * (3.0 * z * z - y * y) * np.arcsinh(x / (np.sqrt(y * y + z * z) + _EPS))
        + x / 6.0 * (3.0 * z * z - x * x) * np.arcsinh(y / (np.sqrt(x * x + z * z) + _EPS))
        - z * z * z / 6.0 * np.arctan(x * y / (z * r + _EPS))
        - 0.5 * z * y * y * np.arctan(x * z / (y * r + _EPS))
        - 0.5 * z * x * x * np.arctan(y * z / (x * r + _EPS))
        - x * y * r / 3.0
    )


def demag_tensor_table(mesh: Mesh) -> np.ndarray:
    """Cell-to-cell tensor over all offsets, shape (2nx-1, 2ny-1, 2nz-1, 6).

    Entry [nx-1+di, ny-1+dj, nz-1+dk] is N between cells separated by
    (di*dx, dj*dy, dk*dz); N(0) for a cube is diag(1/3, 1/3, 1/3).
    """
    n = mesh.shape
    scale = max(mesh.dx, mesh.dy, mesh.dz)
    d = (mesh.dx / scale, mesh.dy / scale, mesh.dz / scale)
    off = [d[a] * np.arange(-(n[a] - 1), n[a]) for a in range(3)]
    X = off[0][:, None, None]
    Y = off[1][None, :, None]
    Z = off[2][None, None, :]

    shape = (2 * n[0] - 1, 2 * n[1] - 1, 2 * n[2] - 1)
    table = np.zeros(shape + (6,))
    weights = {-1: -1.0, 0: 2.0, 1: -1.0}
    for sx in (-1, 0, 1):
        for sy in (-1, 0, 1):
            for sz in (-1, 0, 1):
                w = weights[sx] * weights[sy] * weights[sz]
                x = X + sx * d[0]
                y = Y + sy * d[1]
                z = Z + sz * d[2]
                table[..., COMP_XX] += w * _newell_f(x, y, z)
                table[..., COMP_YY] += w * _newell_f(y, z, x)
                table[..., COMP_ZZ] += w * _newell_f(z, x, y)
                table[..., COMP_XY] += w * _newell_g(x, y, z)
                table[..., COMP_XZ] += w * _newell_g(x, z, y)
                table[..., COMP_YZ] += w * _newell_g(y, z, x)
    table /= 4.0 * np.pi * d[0] * d[1] * d[2]
    return table


@dataclass
class DemagKernel:
    """Spectral demag tensor on the zero-padded grid, ready for convolution.

    spectra holds the six real tensor spectra component-first, which keeps
    every FFT and spectral product contiguous.  The kernel owns reusable
    convolution scratch, so one kernel must not be convolved from two threads
    at once; separate processes each build their own.
    """

    shape: tuple[int, int, int]          # unpadded cell counts
    padded: tuple[int, int, int]
    fft_axes: tuple[int, ...]            # axes with more than one cell
    spectra: np.ndarray                  # (6,) + padded spectral shape, real
    table: np.ndarray = field(repr=False)  # real-space offset table (direct path)
    _pad: np.ndarray | None = field(default=None, repr=False)
    _spec: np.ndarray | None = field(default=None, repr=False)
    _tmp: np.ndarray | None = field(default=None, repr=False)

    def _scratch(self):
        if self._pad is None:
            self._pad = np.zeros((3,) + self.padded)
            spec_shape = self.spectra.shape[1:]
            self._spec = np.empty((3,) + spec_shape, dtype=complex)
            self._tmp = np.empty(spec_shape, dtype=complex)
        return self._pad, self._spec, self._tmp


def build_demag_kernel(mesh: Mesh) -> DemagKernel:
    """Precompute the padded spectral tensor for ``mesh``."""
    n = mesh.shape
    padded = tuple(2 * c if c > 1 else 1 for c in n)
    fft_axes = tuple(a for a in range(3) if n[a] > 1)

    table = demag_tensor_table(mesh)
    wrapped = np.zeros(padded + (6,))
    idx = [(np.arange(-(n[a] - 1), n[a])) % padded[a] for a in range(3)]
    wrapped[np.ix_(idx[0], idx[1], idx[2])] = table
    # The tensor is even in the offset, but cancellation in the Newell sums
    # breaks that at ~1e-11; symmetrize so the spectrum is real to roundoff.
    rev = [(-np.arange(p)) % p for p in padded]
    wrapped += wrapped[np.ix_(rev[0], rev[1], rev[2])]
    wrapped *= 0.5

    if fft_axes:
        spectra_c = _fft.rfftn(wrapped, axes=fft_axes)
    else:
        spectra_c = wrapped.astype(complex)
    scale = np.abs(spectra_c).max()
    if scale > 0 and np.abs(spectra_c.imag).max() > 1e-12 * scale:
        raise AssertionError("demag kernel spectrum has unexpected imaginary part")
    spectra = np.ascontiguousarray(np.moveaxis(spectra_c.real, -1, 0))
    return DemagKernel(shape=n, padded=padded, fft_axes=fft_axes,
                       spectra=spectra, table=table)


def _check_field_shape(kernel: DemagKernel, m: np.ndarray) -> None:
    if m.shape != kernel.shape + (3,):
        raise InvalidArgumentError(
            f"magnetization shape {m.shape} does not match kernel grid {kernel.shape}"
        )


def demag_field(kernel: DemagKernel, m: np.ndarray, Ms: float,
                mask: np.ndarray | None = None) -> np.ndarray:
    """H_d = -N * (Ms m) by spectral convolution; zeroed outside ``mask`` if given."""
    _check_field_shape(kernel, m)
    if not kernel.fft_axes:
        return demag_field_direct(kernel, m, Ms, mask=mask)
    n = kernel.shape
    pad, H, tmp = kernel._scratch()
    # The padding stays zero: only the occupied block is rewritten per call.
    pad[:, : n[0], : n[1], : n[2]] = np.moveaxis(m, -1, 0)
    axes = tuple(a + 1 for a in kernel.fft_axes)
    F = _fft.rfftn(pad, axes=axes)
    K = kernel.spectra
    for c, (ca, cb, cc) in enumerate(((COMP_XX, COMP_XY, COMP_XZ),
                                      (COMP_XY, COMP_YY, COMP_YZ),
                                      (COMP_XZ, COMP_YZ, COMP_ZZ))):
        np.multiply(K[ca], F[0], out=H[c])
        np.multiply(K[cb], F[1], out=tmp)
        H[c] += tmp
        np.multiply(K[cc], F[2], out=tmp)
        H[c] += tmp
    sizes = [kernel.padded[a] for a in kernel.fft_axes]
    H_real = _fft.irfftn(H, s=sizes, axes=axes)
    out = np.moveaxis(H_real[:, : n[0], : n[1], : n[2]], 0, -1) * (-Ms)
    if mask is not None:
        out[~mask] = 0.0
    return out


def demag_field_direct(kernel: DemagKernel, m: np.ndarray, Ms: float,
                       mask: np.ndarray | None = None) -> np.ndarray:
    """H_d by explicit pairwise summation over the offset table (small grids)."""
    _check_field_shape(kernel, m)
    n = kernel.shape
    T = kernel.table
    out = np.zeros_like(m)
    for i in range(n[0]):
        for j in range(n[1]):
            for k in range(n[2]):
                # slice of the table aligned so source (p,q,r) sees offset (i-p, j-q, k-r)
                blk = T[i: n[0] + i, j: n[1] + j, k: n[2] + k][::-1, ::-1, ::-1]
                hx = (blk[..., COMP_XX] * m[..., 0] + blk[..., COMP_XY] * m[..., 1]
                      + blk[..., COMP_XZ] * m[..., 2]).sum()
                hy = (blk[..., COMP_XY] * m[..., 0] + blk[..., COMP_YY] * m[..., 1]
                      + blk[..., COMP_YZ] * m[..., 2]).sum()
                hz = (blk[..., COMP_XZ] * m[..., 0] + blk[..., COMP_YZ] * m[..., 1]
                      + blk[..., COMP_ZZ] * m[..., 2]).sum()
                out[i, j, k] = (hx, hy, hz)
    out *= -Ms
    if mask is not None:
        out[~mask] = 0.0
    return out
