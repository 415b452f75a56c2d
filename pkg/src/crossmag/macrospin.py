"""Single-spin reference model: critical current density and an oracle integrator.

The critical switching current density is evaluated in Gaussian units,

    J_co = 2 e alpha Ms t (H + Hk + 2 pi Ms) / (hbar P),

with Ms in emu/cm^3, fields in Oe, lengths in cm, then converted to A/m^2.
An SI-equivalent closed form is provided for cross-checking the unit
handling.  The trajectory integrator here is a deliberately separate
implementation (fixed-step RK4 in plain scalars) so grid-solver agreement is
a genuine cross-check rather than shared code agreeing with itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_CGS, E_CHARGE, GAMMA_LL, HBAR, MU0
from .dynamics import TorqueParams, Trajectory
from .errors import InvalidArgumentError
from .materials import Material

# A/m to Oe
_OE_PER_APM = 4.0e-3 * math.pi


@dataclass(frozen=True)
class MacrospinParams:
    """Parameters of the single-spin model.

    H is the applied field magnitude along +x (the easy axis); Hk the
    uniaxial anisotropy field along x; demag_diag the diagonal of the
    self-demagnetization tensor (thin-film limit by default).
    """

    material: Material
    t_free: float = 2e-9
    H: float = 0.0
    Hk: float = 0.0
    torque: TorqueParams | None = None
    demag_diag: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if self.t_free <= 0:
            raise InvalidArgumentError(f"t_free must be positive, got {self.t_free}")
        if self.H < 0 or self.Hk < 0:
            raise InvalidArgumentError("H and Hk must be non-negative")
        if len(self.demag_diag) != 3:
            raise InvalidArgumentError("demag_diag must have three entries")


def critical_current_density(p: MacrospinParams) -> float:
    """Zero-temperature critical switching current density (A/m^2)."""
    mat = p.material
    if mat.P <= 0:
        raise InvalidArgumentError("spin polarization P must be positive")
    Ms_G = mat.Ms / 1e3                      # emu/cm^3
    t_G = p.t_free * 1e2                     # cm
    field_Oe = (p.H + p.Hk) * _OE_PER_APM + 2.0 * math.pi * Ms_G
    e_esu = E_CHARGE * C_CGS / 10.0
    hbar_erg = HBAR * 1e7
    j_stat = 2.0 * e_esu * mat.alpha * Ms_G * t_G * field_Oe / (hbar_erg * mat.P)
    return j_stat * (10.0 / C_CGS) * 1e4     # statA/cm^2 -> A/m^2


def critical_current_density_si(p: MacrospinParams) -> float:
    """Same quantity evaluated directly in SI; used to cross-check units."""
    mat = p.material
    if mat.P <= 0:
        raise InvalidArgumentError("spin polarization P must be positive")
    field = p.H + p.Hk + 0.5 * mat.Ms
    return 2.0 * E_CHARGE * mat.alpha * MU0 * mat.Ms * p.t_free * field / (HBAR * mat.P)


def macrospin_trajectory(p: MacrospinParams, m0, duration: float,
                         dt: float = 1e-14, sample_dt: float = 1e-12,
                         gamma: float = GAMMA_LL) -> Trajectory:
    """Integrate the single-spin equation of motion with fixed-step RK4.

    The effective field is H x_hat + Hk m_x x_hat - Ms diag(demag_diag) m
    plus the usual spin-torque terms from p.torque.  The spin is
    renormalized after every step.
    """
    m0 = np.asarray(m0, dtype=float)
    norm = float(np.linalg.norm(m0))
    if m0.shape != (3,) or abs(norm - 1.0) > 1e-9:
        raise InvalidArgumentError("m0 must be a unit 3-vector")
    if duration <= 0 or dt <= 0:
        raise InvalidArgumentError("duration and dt must be positive")

    mat = p.material
    Ms = mat.Ms
    alpha = mat.alpha
    nx, ny, nz = (float(v) for v in p.demag_diag)
    happ = p.H
    hk = p.Hk
    pref = -gamma / (1.0 + alpha * alpha)
    tq = p.torque
    if tq is not None and tq.J != 0.0:
        beta = (HBAR / (MU0 * E_CHARGE)) * tq.J / (tq.t_free * Ms)
        mpx, mpy, mpz = (float(v) for v in tq.m_p)
        L2 = tq.Lambda * tq.Lambda
        P = tq.P
        bep = beta * tq.eps_prime
    else:
        beta = bep = mpx = mpy = mpz = P = 0.0
        L2 = 1.0

    def rhs(mx, my, mz):
        hx = happ + hk * mx - Ms * nx * mx
        hy = -Ms * ny * my
        hz = -Ms * nz * mz
        if beta != 0.0:
            eps = P * L2 / ((L2 + 1.0) + (L2 - 1.0) * (mx * mpx + my * mpy + mz * mpz))
            be = beta * eps
            hx += be * (my * mpz - mz * mpy) + bep * mpx
            hy += be * (mz * mpx - mx * mpz) + bep * mpy
            hz += be * (mx * mpy - my * mpx) + bep * mpz
        cx = my * hz - mz * hy
        cy = mz * hx - mx * hz
        cz = mx * hy - my * hx
        return (pref * (cx + alpha * (my * cz - mz * cy)),
                pref * (cy + alpha * (mz * cx - mx * cz)),
                pref * (cz + alpha * (mx * cy - my * cx)))

    n_steps = int(round(duration / dt))
    stride = max(1, int(round(sample_dt / dt)))
    mx, my, mz = (float(v) for v in m0)
    times = [0.0]
    samples = [(mx, my, mz)]
    for i in range(1, n_steps + 1):
        k1 = rhs(mx, my, mz)
        k2 = rhs(mx + 0.5 * dt * k1[0], my + 0.5 * dt * k1[1], mz + 0.5 * dt * k1[2])
        k3 = rhs(mx + 0.5 * dt * k2[0], my + 0.5 * dt * k2[1], mz + 0.5 * dt * k2[2])
        k4 = rhs(mx + dt * k3[0], my + dt * k3[1], mz + dt * k3[2])
        mx += dt / 6.0 * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0])
        my += dt / 6.0 * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1])
        mz += dt / 6.0 * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2])
        inv = 1.0 / math.sqrt(mx * mx + my * my + mz * mz)
        mx *= inv
        my *= inv
        mz *= inv
        if i % stride == 0:
            times.append(i * dt)
            samples.append((mx, my, mz))

    t = np.array(times)
    m = np.array(samples)
    zeros = np.zeros(len(t))
    return Trajectory(t=t, m_avg=m, mx_short=m[:, 0], my_long=m[:, 1],
                      E_exchange=zeros, E_demag=zeros.copy(), E_zeeman=zeros.copy())
