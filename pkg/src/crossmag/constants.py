"""Physical constants used throughout (SI)."""

import math

# Landau-Lifshitz gyromagnetic ratio, m A^-1 s^-1 (OOMMF convention).
# The only constant meant to be overridden per run.
GAMMA_LL = 2.211e5

# Reduced Planck constant, J s
HBAR = 1.0546e-34

# Elementary charge, C
E_CHARGE = 1.602e-19

# Vacuum permeability, T m / A
MU0 = 4e-7 * math.pi

# Speed of light in cm/s, used only for SI <-> Gaussian conversions.
C_CGS = 2.99792458e10
